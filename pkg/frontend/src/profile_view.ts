import { ApiError, Client } from "./api.js";
import { assignDepths, maxDepth, segmentText, tagHue } from "./highlight.js";
import type { SentenceOut } from "./types.js";

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

/** Textarea + language box -> POST /v1/profile -> sentences with depth-layered
 * span underlines, a level badge per sentence, and a legend of tags present.
 * Everything shown comes verbatim from the response. */
export class ProfileView {
  readonly root: HTMLElement;
  readonly input: HTMLTextAreaElement;
  readonly langInput: HTMLInputElement;
  readonly button: HTMLButtonElement;
  readonly banner: HTMLElement;
  readonly results: HTMLElement;
  readonly legend: HTMLElement;

  private seq = 0; // discard responses that arrive after a newer submit

  constructor(root: HTMLElement, private readonly client: Client) {
    this.root = root;
    root.classList.add("profile-view");

    const controls = el("div", "controls");
    this.input = el("textarea");
    this.input.rows = 4;
    this.input.placeholder = "Paste text to profile...";
    this.langInput = el("input");
    this.langInput.type = "text";
    this.langInput.value = "en";
    this.langInput.className = "lang";
    this.button = el("button", "", "Profile");
    this.button.addEventListener("click", () => void this.submit());

    const row = el("div", "row");
    row.append(el("label", "", "language"), this.langInput, this.button);
    controls.append(this.input, row);

    this.banner = el("div", "error-banner");
    this.banner.hidden = true;
    this.legend = el("div", "legend");
    this.results = el("div", "results");
    root.append(controls, this.banner, this.legend, this.results);
  }

  async submit(): Promise<void> {
    this.banner.hidden = true;
    const text = this.input.value;
    if (!text.trim()) {
      // nothing to profile: clear the result area without touching the service
      this.results.replaceChildren();
      this.legend.replaceChildren();
      return;
    }
    const seq = ++this.seq;
    try {
      const resp = await this.client.profile(text, this.langInput.value.trim());
      if (seq !== this.seq) return; // a newer request superseded this one
      this.render(resp.sentences);
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

  private render(sentences: SentenceOut[]): void {
    this.results.replaceChildren();
    const tagsPresent = new Set<string>();
    for (const sent of sentences) {
      this.results.append(this.renderSentence(sent));
      for (const s of sent.spans) tagsPresent.add(s.tag);
    }
    this.renderLegend([...tagsPresent].sort());
  }

  private renderSentence(sent: SentenceOut): HTMLElement {
    const layers = assignDepths(sent.spans);
    const p = el("p", "sentence");
    p.dataset.sentenceId = sent.id;
    // reserve vertical room for the deepest underline stack
    p.style.paddingBottom = `${6 + maxDepth(layers) * 5}px`;

    if (sent.level) {
      const badge = el("span", "level-badge", sent.level.name);
      badge.title = `difficulty ${sent.level.name} (p=${sent.level.prob.toFixed(2)})`;
      p.append(badge);
    }
    for (const seg of segmentText(sent.text, sent.offset, layers)) {
      const span = el("span", "seg", seg.text);
      for (const layer of seg.layers) {
        const bar = el("i", "hl");
        bar.dataset.tag = layer.tag;
        bar.dataset.depth = String(layer.depth);
        bar.dataset.spanStart = String(layer.charStart);
        bar.dataset.spanEnd = String(layer.charEnd);
        bar.title = `${layer.tag} p=${layer.prob.toFixed(2)}`;
        bar.style.setProperty("--hl-depth", String(layer.depth));
        bar.style.setProperty("--hl-hue", String(tagHue(layer.tag)));
        span.append(bar);
      }
      p.append(span);
    }
    return p;
  }

  private renderLegend(tags: string[]): void {
    this.legend.replaceChildren();
    for (const tag of tags) {
      const chip = el("span", "chip", tag);
      chip.style.setProperty("--hl-hue", String(tagHue(tag)));
      this.legend.append(chip);
    }
  }
}
