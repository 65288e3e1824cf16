// Verse card rendering. The tripartite layout is fixed: verse (Devanagari +
// IAST), then translations, then — when generation was requested — the
// explanation panel, which shows an "explanation unavailable" state rather
// than disappearing when the backend degraded.

import type { Verse } from "./api.js";

export interface CardOptions {
  // undefined: no explanation panel (generation off / daily / browse)
  // null: panel with the unavailable state; string: panel with content
  explanation?: string | null;
  onTagClick?: (tag: string) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderVerseCard(verse: Verse, options: CardOptions = {}): HTMLElement {
  const card = el("article", "verse-card");
  card.dataset.verseId = String(verse.verse_id);

  const verseSection = el("section", "card-section verse-section");
  verseSection.appendChild(el("p", "devanagari", verse.devanagari));
  verseSection.appendChild(el("p", "iast", verse.iast));
  card.appendChild(verseSection);

  const translations = el("section", "card-section translation-section");
  if (verse.marathi) {
    const marathi = el("p", "translation marathi");
    marathi.appendChild(el("span", "lang-label", "Marathi"));
    marathi.appendChild(document.createTextNode(" " + verse.marathi));
    translations.appendChild(marathi);
  }
  const english = el("p", "translation english");
  english.appendChild(el("span", "lang-label", "English"));
  english.appendChild(document.createTextNode(" " + verse.english));
  translations.appendChild(english);
  card.appendChild(translations);

  if (options.explanation !== undefined) {
    const panel = el("details", "card-section explanation-section");
    panel.open = options.explanation !== null;
    panel.appendChild(el("summary", "explanation-summary", "Explanation"));
    if (options.explanation === null) {
      panel.appendChild(el("p", "explanation-text unavailable", "explanation unavailable"));
    } else {
      panel.appendChild(el("p", "explanation-text", options.explanation));
    }
    card.appendChild(panel);
  }

  const meta = el("footer", "card-meta");
  const chips = el("span", "tag-chips");
  for (const tag of verse.tags) {
    const chip = el("button", "tag-chip", tag);
    chip.type = "button";
    if (options.onTagClick) {
      chip.addEventListener("click", () => options.onTagClick?.(tag));
    }
    chips.appendChild(chip);
  }
  meta.appendChild(chips);
  if (verse.score !== undefined) {
    meta.appendChild(el("span", "score-badge", `score ${verse.score.toFixed(3)}`));
  }
  card.appendChild(meta);
  return card;
}

export function renderErrorBanner(message: string): HTMLElement {
  return el("div", "error-banner", message);
}

export function renderPlaceholderCard(message: string): HTMLElement {
  const card = el("article", "verse-card placeholder");
  card.appendChild(el("p", "placeholder-text", message));
  return card;
}
