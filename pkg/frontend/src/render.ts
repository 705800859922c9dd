import type { UiState } from "./directive.js";
import { buildRainLayer } from "./rain.js";

export interface RenderOptions {
  rainSeed?: number; // fixed in tests for deterministic particle layout
}

/**
 * Paint the UI state into the page. Idempotent: rendering the same state
 * twice leaves the DOM unchanged (the rain layer is rebuilt only when the
 * animation kind or running flag changes).
 */
export function render(root: HTMLElement, state: UiState, opts: RenderOptions = {}): void {
  const doc = root.ownerDocument;
  root.style.backgroundColor = state.backgroundHex;
  root.dataset.emotion = state.emotion;

  setText(root, ".quote", state.quote);
  setText(root, ".mood-message", state.message);

  const shelf = ensure(root, ".book-shelf", "div");
  const bookKey = JSON.stringify(state.books);
  if (shelf.dataset.key !== bookKey) {
    shelf.dataset.key = bookKey;
    shelf.replaceChildren();
    for (const book of state.books) {
      const card = doc.createElement("div");
      card.className = "book-card";
      const title = doc.createElement("strong");
      title.textContent = book.title;
      const author = doc.createElement("span");
      author.textContent = book.author;
      card.append(title, author);
      shelf.appendChild(card);
    }
  }

  const existing = root.querySelector<HTMLElement>(".emoji-rain");
  if (state.animationRunning) {
    if (!existing || existing.dataset.kind !== state.animationKind) {
      existing?.remove();
      root.appendChild(buildRainLayer(doc, state.animationKind, { seed: opts.rainSeed }));
    }
  } else {
    existing?.remove(); // disabled: no rain layer in the render tree
  }
}

function ensure(root: HTMLElement, selector: string, tag: string): HTMLElement {
  let el = root.querySelector<HTMLElement>(selector);
  if (!el) {
    el = root.ownerDocument.createElement(tag);
    el.className = selector.slice(1);
    root.appendChild(el);
  }
  return el;
}

function setText(root: HTMLElement, selector: string, text: string): void {
  const el = ensure(root, selector, "p");
  if (el.textContent !== text) el.textContent = text;
}
