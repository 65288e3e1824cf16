import { describe, expect, it, vi } from "vitest";

import type { Verse } from "../src/api.js";
import { renderVerseCard } from "../src/cards.js";

const VERSE: Verse = {
  verse_id: 7,
  devanagari: "विद्या ददाति विनयम्",
  iast: "vidyā dadāti vinayam",
  marathi: "विद्येमुळे नम्रता येते",
  english: "Knowledge gives humility.",
  tags: ["knowledge", "humility"],
  score: 0.91,
  rank: 1,
};

describe("renderVerseCard", () => {
  it("renders the tripartite sections in order: verse, translations, explanation", () => {
    const card = renderVerseCard(VERSE, { explanation: "It links learning to character." });
    const sections = [...card.querySelectorAll(".card-section")].map((node) => node.className);
    expect(sections).toHaveLength(3);
    expect(sections[0]).toContain("verse-section");
    expect(sections[1]).toContain("translation-section");
    expect(sections[2]).toContain("explanation-section");

    expect(card.querySelector(".devanagari")?.textContent).toBe(VERSE.devanagari);
    expect(card.querySelector(".iast")?.textContent).toBe(VERSE.iast);
    expect(card.querySelector(".marathi")?.textContent).toContain(VERSE.marathi);
    expect(card.querySelector(".english")?.textContent).toContain(VERSE.english);
    expect(card.querySelector(".explanation-text")?.textContent).toBe(
      "It links learning to character.",
    );
  });

  it("shows the unavailable state when generation degraded", () => {
    const card = renderVerseCard(VERSE, { explanation: null });
    const text = card.querySelector(".explanation-text");
    expect(text?.classList.contains("unavailable")).toBe(true);
    expect(text?.textContent).toBe("explanation unavailable");
  });

  it("omits the explanation panel when generation was off", () => {
    const card = renderVerseCard(VERSE);
    expect(card.querySelector(".explanation-section")).toBeNull();
    expect(card.querySelectorAll(".card-section")).toHaveLength(2);
  });

  it("shows tag chips and the score badge", () => {
    const onTagClick = vi.fn();
    const card = renderVerseCard(VERSE, { onTagClick });
    const chips = [...card.querySelectorAll(".tag-chip")];
    expect(chips.map((chip) => chip.textContent)).toEqual(["knowledge", "humility"]);
    (chips[1] as HTMLButtonElement).click();
    expect(onTagClick).toHaveBeenCalledWith("humility");
    expect(card.querySelector(".score-badge")?.textContent).toContain("0.910");
  });

  it("skips the marathi line when the translation is empty", () => {
    const card = renderVerseCard({ ...VERSE, marathi: "" });
    expect(card.querySelector(".marathi")).toBeNull();
    expect(card.querySelector(".english")).not.toBeNull();
  });
});
