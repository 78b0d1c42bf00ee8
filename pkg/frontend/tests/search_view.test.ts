import { afterAll, afterEach, beforeAll, describe, expect, it } from "vitest";
import { Client } from "../src/api.js";
import { SearchView } from "../src/search_view.js";
import { CEFR_LEVELS, init } from "../src/main.js";
import { startFixtureService, type FixtureService } from "./fixture_service.js";
import { DOCUMENTS, TAGS } from "./fixtures.js";

describe("SearchView against the fixture service", () => {
  let service: FixtureService;

  beforeAll(async () => {
    service = await startFixtureService();
  });
  afterAll(() => service.close());
  afterEach(() => {
    document.body.replaceChildren();
  });

  function fresh(): SearchView {
    const root = document.createElement("div");
    document.body.append(root);
    return new SearchView(root, new Client(service.url), TAGS.tags, CEFR_LEVELS);
  }

  it("offers exactly the /v1/tags inventory in the GI dropdown", () => {
    const view = fresh();
    const values = [...view.giSelect.options].map((o) => o.value);
    expect(values).toEqual(["", ...TAGS.tags]);
  });

  it("offers the six difficulty levels", () => {
    const view = fresh();
    const values = [...view.levelSelect.options].map((o) => o.value);
    expect(values).toEqual(["", "A1", "A2", "B1", "B2", "C1", "C2"]);
  });

  it("renders every indexed document when no filter is set", async () => {
    const view = fresh();
    await view.submit();
    const ids = [...view.results.querySelectorAll<HTMLElement>(".card")].map((c) => c.dataset.docId);
    expect(ids).toEqual(DOCUMENTS.map((d) => d.id));
  });

  it("renders cards with snippet, difficulty badge, and GI chips", async () => {
    const view = fresh();
    view.giSelect.value = "PP";
    await view.submit();
    const card = view.results.querySelector(".card");
    expect(card).not.toBeNull();
    expect(card!.querySelector(".snippet")!.textContent!.length).toBeGreaterThan(0);
    expect(card!.querySelector(".level-badge")!.textContent).toBe("A1");
    const chips = [...card!.querySelectorAll(".chip")].map((c) => c.textContent);
    expect(chips).toEqual(["ADV", "NP.DEF", "PP", "PRON", "V.PAST", "V.PROG"]);
  });

  it("renders the empty state when nothing matches", async () => {
    const view = fresh();
    view.giSelect.value = "PP";
    view.levelSelect.value = "A2"; // no fixture document is A2
    await view.submit();
    expect(view.results.querySelectorAll(".card")).toHaveLength(0);
    const empty = view.results.querySelector(".empty-state");
    expect(empty).not.toBeNull();
    expect(empty!.textContent).toContain("no materials");
  });

  it("treats the empty state as a result, not an error", async () => {
    const view = fresh();
    view.levelSelect.value = "A2";
    await view.submit();
    expect(view.banner.hidden).toBe(true);
  });

  it("re-queries with a chip's tag when clicked", async () => {
    const view = fresh();
    view.levelSelect.value = "B2";
    await view.submit();
    expect(view.results.querySelectorAll(".card").length).toBe(2);

    const before = service.hits.length;
    const chip = [...view.results.querySelectorAll<HTMLButtonElement>(".chip")].find(
      (c) => c.textContent === "PP",
    );
    chip!.click();
    await new Promise((r) => setTimeout(r, 20)); // chip click fires an async submit
    expect(view.giSelect.value).toBe("PP");
    expect(service.hits.length).toBe(before + 1);
    expect(service.hits.at(-1)).toContain("gi=PP");
    expect(service.hits.at(-1)).toContain("level=B2");
    const ids = [...view.results.querySelectorAll<HTMLElement>(".card")].map((c) => c.dataset.docId);
    expect(ids).toEqual(["doc-en-9-0005"]);
  });

  it("filters by language", async () => {
    const view = fresh();
    view.langInput.value = "zh";
    await view.submit();
    expect(view.results.querySelector(".empty-state")).not.toBeNull();
  });

  it("shows server errors in the banner", async () => {
    const view = fresh();
    // the level select only offers valid values, so drive the client directly
    // through a hand-added option to simulate a stale page
    view.levelSelect.append(new Option("EASY", "EASY"));
    view.levelSelect.value = "EASY";
    await view.submit();
    expect(view.banner.hidden).toBe(false);
    expect(view.banner.textContent).toContain("unknown_level");
  });
});

describe("init", () => {
  let service: FixtureService;

  beforeAll(async () => {
    service = await startFixtureService();
  });
  afterAll(() => service.close());
  afterEach(() => {
    document.body.replaceChildren();
  });

  it("builds both views and defaults to the profile tab", async () => {
    const root = document.createElement("div");
    document.body.append(root);
    const app = await init(root, service.url);
    expect(app.profile.root.hidden).toBe(false);
    expect(app.search.root.hidden).toBe(true);

    app.showTab("search");
    expect(app.profile.root.hidden).toBe(true);
    expect(app.search.root.hidden).toBe(false);

    // the GI dropdown was seeded from the live /v1/tags call
    const values = [...app.search.giSelect.options].map((o) => o.value);
    expect(values).toEqual(["", ...TAGS.tags]);
  });
});
