import type { ApiErrorBody, ProfileResponse, SearchResponse, TagsResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface SearchParams {
  gi?: string[];
  level?: string;
  lang?: string;
}

export function searchQuery(params: SearchParams): string {
  const q = new URLSearchParams();
  for (const tag of params.gi ?? []) q.append("gi", tag);
  if (params.level) q.set("level", params.level);
  if (params.lang) q.set("lang", params.lang);
  return q.toString();
}

/** Thin fetch wrapper for the /v1 routes. Non-2xx responses become ApiError
 * carrying the server's error envelope, so views can show the message as-is. */
export class Client {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.base + path, init);
    let body: unknown = null;
    try {
      body = await resp.json();
    } catch {
      body = null;
    }
    if (!resp.ok) {
      const env = body as ApiErrorBody | null;
      if (env && typeof env === "object" && env.error) {
        throw new ApiError(env.error.status, env.error.code, env.error.message);
      }
      throw new ApiError(resp.status, "http_error", `request failed with status ${resp.status}`);
    }
    return body as T;
  }

  tags(): Promise<TagsResponse> {
    return this.request<TagsResponse>("/v1/tags");
  }

  profile(text: string, lang: string, threshold?: number): Promise<ProfileResponse> {
    const payload: Record<string, unknown> = { text, lang };
    if (threshold !== undefined) payload.threshold = threshold;
    return this.request<ProfileResponse>("/v1/profile", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  search(params: SearchParams): Promise<SearchResponse> {
    const q = searchQuery(params);
    return this.request<SearchResponse>(q ? `/v1/search?${q}` : "/v1/search");
  }
}
