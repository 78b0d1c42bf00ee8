import { ApiError, Client } from "./api.js";
import { tagHue } from "./highlight.js";
import type { DocumentSummary } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function option(value: string, label: string): HTMLOptionElement {
  const o = document.createElement("option");
  o.value = value;
  o.textContent = label;
  return o;
}

/** GI + difficulty + language filters -> GET /v1/search -> result cards.
 * The GI dropdown mirrors /v1/tags exactly; clicking a GI chip on a card
 * re-runs the search with that tag. */
export class SearchView {
  readonly root: HTMLElement;
  readonly giSelect: HTMLSelectElement;
  readonly levelSelect: HTMLSelectElement;
  readonly langInput: HTMLInputElement;
  readonly button: HTMLButtonElement;
  readonly banner: HTMLElement;
  readonly results: HTMLElement;

  private seq = 0;

  constructor(
    root: HTMLElement,
    private readonly client: Client,
    tags: string[],
    levels: string[],
  ) {
    this.root = root;
    root.classList.add("search-view");

    this.giSelect = document.createElement("select");
    this.giSelect.append(option("", "any GI"));
    for (const tag of tags) this.giSelect.append(option(tag, tag));

    this.levelSelect = document.createElement("select");
    this.levelSelect.append(option("", "any level"));
    for (const level of levels) this.levelSelect.append(option(level, level));

    this.langInput = el("input");
    this.langInput.type = "text";
    this.langInput.placeholder = "any language";
    this.langInput.className = "lang";

    this.button = el("button", "", "Search");
    this.button.addEventListener("click", () => void this.submit());

    const row = el("div", "row");
    row.append(
      el("label", "", "GI"),
      this.giSelect,
      el("label", "", "difficulty"),
      this.levelSelect,
      el("label", "", "language"),
      this.langInput,
      this.button,
    );

    this.banner = el("div", "error-banner");
    this.banner.hidden = true;
    this.results = el("div", "results");
    root.append(row, this.banner, this.results);
  }

  async submit(): Promise<void> {
    this.banner.hidden = true;
    const seq = ++this.seq;
    const gi = this.giSelect.value ? [this.giSelect.value] : [];
    const level = this.levelSelect.value || undefined;
    const lang = this.langInput.value.trim() || undefined;
    try {
      const resp = await this.client.search({ gi, level, lang });
      if (seq !== this.seq) return;
      this.render(resp.documents);
    } catch (err) {
      if (seq !== this.seq) return;
      this.showError(err);
    }
  }

  private showError(err: unknown): void {
    const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    this.banner.textContent = message;
    this.banner.hidden = false;
  }

  private render(documents: DocumentSummary[]): void {
    this.results.replaceChildren();
    if (documents.length === 0) {
      this.results.append(el("div", "empty-state", "no materials match this query"));
      return;
    }
    for (const doc of documents) this.results.append(this.renderCard(doc));
  }

  private renderCard(doc: DocumentSummary): HTMLElement {
    const card = el("article", "card");
    card.dataset.docId = doc.id;

    const head = el("header");
    head.append(el("span", "doc-id", doc.id));
    head.append(el("span", "level-badge", doc.difficulty));
    head.append(el("span", "doc-meta", `${doc.lang} · ${doc.n_sentences} sentences`));
    card.append(head);

    card.append(el("p", "snippet", doc.snippet));

    const chips = el("div", "chips");
    for (const tag of doc.gi) {
      const chip = el("button", "chip", tag);
      chip.type = "button";
      chip.style.setProperty("--hl-hue", String(tagHue(tag)));
      // exploration loop: a chip is the next query
      chip.addEventListener("click", () => {
        this.giSelect.value = tag;
        void this.submit();
      });
      chips.append(chip);
    }
    card.append(chips);
    return card;
  }
}
