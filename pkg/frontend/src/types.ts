// Mirrors of the /v1 JSON payloads. The UI displays these verbatim; it never
// re-tokenizes or re-scores anything.

export interface TokenOut {
  text: string;
  start: number; // char offsets into the submitted text
  end: number;
}

export interface SpanOut {
  start: number; // token indices, inclusive
  end: number;
  tag: string;
  prob: number;
  char_start: number; // char offsets into the submitted text
  char_end: number;
}

export interface LevelOut {
  name: string;
  prob: number;
}

export interface SentenceOut {
  id: string;
  text: string;
  offset: number; // char offset of this sentence within the submitted text
  tokens: TokenOut[];
  spans: SpanOut[];
  level: LevelOut | null;
}

export interface ProfileResponse {
  sentences: SentenceOut[];
}

export interface TagsResponse {
  tags: string[];
}

export interface DocumentSummary {
  id: string;
  lang: string;
  difficulty: string;
  gi: string[];
  n_sentences: number;
  snippet: string;
}

export interface SearchResponse {
  documents: DocumentSummary[];
}

export interface ApiErrorBody {
  error: { status: number; code: string; message: string };
}

/** One span prepared for stacked rendering. Char offsets are absolute
 * (into the submitted text), same as the API's. Overlapping layers get
 * distinct depths so every span stays visible. */
export interface HighlightLayer {
  charStart: number;
  charEnd: number;
  tag: string;
  prob: number;
  depth: number;
}
