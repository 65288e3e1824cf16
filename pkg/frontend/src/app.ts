// Three views behind a tab bar: query, daily verse, browse by tag.
// One query in flight at a time; a new submission aborts the pending one.

import { ApiClient, ApiError, type QueryBody, type QueryResponse } from "./api.js";
import { renderErrorBanner, renderPlaceholderCard, renderVerseCard } from "./cards.js";
import { apiBase, setApiBase } from "./config.js";

export type TabName = "query" | "daily" | "browse";

const QUERY_SUGGESTIONS = [
  "teachings about friendship",
  "guidance on courage",
  "importance of truth",
];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  readonly root: HTMLElement;
  client: ApiClient;

  private panes: Record<TabName, HTMLElement>;
  private tabs: Record<TabName, HTMLButtonElement>;
  private inflight: AbortController | null = null;
  private history: string[] = [];

  private queryForm!: HTMLFormElement;
  private queryInput!: HTMLInputElement;
  private kSelect!: HTMLSelectElement;
  private modeSelect!: HTMLSelectElement;
  private generateToggle!: HTMLInputElement;
  private queryResults!: HTMLElement;
  private historyList!: HTMLElement;

  constructor(root: HTMLElement, client?: ApiClient) {
    this.root = root;
    this.client = client ?? new ApiClient(apiBase());
    this.panes = { query: el("div"), daily: el("div"), browse: el("div") };
    this.tabs = {
      query: el("button", "tab", "Ask"),
      daily: el("button", "tab", "Daily verse"),
      browse: el("button", "tab", "Browse themes"),
    };
    this.build();
  }

  private build(): void {
    this.root.innerHTML = "";
    const header = el("header", "app-header");
    header.appendChild(el("h1", "app-title", "Pragya"));
    header.appendChild(el("p", "app-subtitle", "Subhāṣita wisdom, found by meaning"));
    header.appendChild(this.buildSettings());
    this.root.appendChild(header);

    const bar = el("nav", "tab-bar");
    (Object.keys(this.tabs) as TabName[]).forEach((name) => {
      const tab = this.tabs[name];
      tab.type = "button";
      tab.dataset.tab = name;
      tab.addEventListener("click", () => this.show(name));
      bar.appendChild(tab);
    });
    this.root.appendChild(bar);

    const main = el("main", "app-main");
    (Object.keys(this.panes) as TabName[]).forEach((name) => {
      this.panes[name].className = `pane pane-${name}`;
      this.panes[name].hidden = true;
      main.appendChild(this.panes[name]);
    });
    this.root.appendChild(main);

    this.buildQueryPane();
    this.show("query");
  }

  private buildSettings(): HTMLElement {
    const wrap = el("div", "settings");
    const input = el("input", "settings-url") as HTMLInputElement;
    input.value = apiBase();
    input.title = "Backend base URL";
    input.addEventListener("change", () => {
      setApiBase(input.value.trim());
      this.client = new ApiClient(input.value.trim() || apiBase());
    });
    wrap.appendChild(el("span", "settings-label", "API"));
    wrap.appendChild(input);
    return wrap;
  }

  show(name: TabName): void {
    (Object.keys(this.panes) as TabName[]).forEach((pane) => {
      this.panes[pane].hidden = pane !== name;
      this.tabs[pane].classList.toggle("active", pane === name);
    });
    if (name === "daily") void this.loadDaily();
    if (name === "browse") void this.loadTags();
  }

  // --- query view ------------------------------------------------------------

  private buildQueryPane(): void {
    const pane = this.panes.query;
    this.queryForm = el("form", "query-form");

    this.queryInput = el("input", "query-input") as HTMLInputElement;
    this.queryInput.name = "text";
    this.queryInput.placeholder = `try "${QUERY_SUGGESTIONS[0]}"`;
    this.queryForm.appendChild(this.queryInput);

    this.kSelect = el("select", "k-select") as HTMLSelectElement;
    this.kSelect.name = "k";
    for (let k = 1; k <= 10; k += 1) {
      const option = el("option", "", String(k)) as HTMLOptionElement;
      option.value = String(k);
      if (k === 3) option.selected = true;
      this.kSelect.appendChild(option);
    }
    this.queryForm.appendChild(this.kSelect);

    this.modeSelect = el("select", "mode-select") as HTMLSelectElement;
    this.modeSelect.name = "mode";
    for (const mode of ["semantic", "keyword"]) {
      const option = el("option", "", mode) as HTMLOptionElement;
      option.value = mode;
      this.modeSelect.appendChild(option);
    }
    this.queryForm.appendChild(this.modeSelect);

    const generateLabel = el("label", "generate-label");
    this.generateToggle = el("input") as HTMLInputElement;
    this.generateToggle.type = "checkbox";
    this.generateToggle.name = "generate";
    generateLabel.appendChild(this.generateToggle);
    generateLabel.appendChild(document.createTextNode(" explain"));
    this.queryForm.appendChild(generateLabel);

    const submit = el("button", "submit-button", "Search") as HTMLButtonElement;
    submit.type = "submit";
    this.queryForm.appendChild(submit);

    this.queryForm.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitQuery();
    });
    pane.appendChild(this.queryForm);

    this.historyList = el("ul", "query-history");
    pane.appendChild(this.historyList);
    this.queryResults = el("div", "query-results");
    pane.appendChild(this.queryResults);
  }

  async submitQuery(): Promise<void> {
    const text = this.queryInput.value.trim();
    if (!text) return;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;

    const body: QueryBody = {
      text,
      k: Number(this.kSelect.value),
      mode: this.modeSelect.value as QueryBody["mode"],
      generate: this.generateToggle.checked,
    };
    this.queryResults.replaceChildren(el("p", "loading", "searching…"));
    try {
      const response = await this.client.query(body, controller.signal);
      if (controller !== this.inflight) return; // superseded
      this.pushHistory(text);
      this.renderQueryResponse(body, response);
    } catch (error) {
      if (error instanceof DOMException && error.name === "AbortError") return;
      // the input keeps its text so the user can retry as-is
      const message =
        error instanceof ApiError && error.code !== "unreachable"
          ? `The server rejected the request: ${error.message}`
          : "Cannot reach the Pragya server. Check the API URL in settings and retry.";
      this.queryResults.replaceChildren(renderErrorBanner(message));
    } finally {
      if (controller === this.inflight) this.inflight = null;
    }
  }

  private renderQueryResponse(body: QueryBody, response: QueryResponse): void {
    this.queryResults.replaceChildren();

    const latency = el(
      "p",
      "latency-line",
      response.generation_ms !== undefined
        ? `retrieval ${response.retrieval_ms.toFixed(1)} ms · generation ${response.generation_ms.toFixed(0)} ms`
        : `retrieval ${response.retrieval_ms.toFixed(1)} ms`,
    );
    this.queryResults.appendChild(latency);

    if (response.results.length === 0) {
      const empty = el("div", "empty-state");
      empty.appendChild(el("p", "", "No verses matched. Explore the themes instead:"));
      const browse = el("button", "browse-link", "browse by theme");
      browse.type = "button";
      browse.addEventListener("click", () => this.show("browse"));
      empty.appendChild(browse);
      this.queryResults.appendChild(empty);
      return;
    }

    response.results.forEach((verse, position) => {
      let explanation: string | null | undefined;
      if (body.generate && position === 0) {
        explanation = response.explanation ?? null;
      }
      this.queryResults.appendChild(
        renderVerseCard(verse, {
          explanation,
          onTagClick: (tag) => this.openBrowse(tag),
        }),
      );
    });
  }

  private pushHistory(text: string): void {
    if (this.history[0] === text) return;
    this.history = [text, ...this.history.filter((item) => item !== text)].slice(0, 8);
    this.historyList.replaceChildren(
      ...this.history.map((item) => {
        const entry = el("li", "history-item");
        const button = el("button", "history-button", item);
        button.type = "button";
        button.addEventListener("click", () => {
          this.queryInput.value = item;
          void this.submitQuery();
        });
        entry.appendChild(button);
        return entry;
      }),
    );
  }

  // --- daily view ------------------------------------------------------------

  async loadDaily(): Promise<void> {
    const pane = this.panes.daily;
    pane.replaceChildren(el("p", "loading", "fetching the day's verse…"));
    try {
      const verse = await this.client.daily();
      pane.replaceChildren(
        el("h2", "pane-title", "Verse of the day"),
        renderVerseCard(verse, { onTagClick: (tag) => this.openBrowse(tag) }),
      );
    } catch {
      pane.replaceChildren(
        el("h2", "pane-title", "Verse of the day"),
        renderPlaceholderCard("The daily verse is unavailable right now."),
      );
    }
  }

  // --- browse view -----------------------------------------------------------

  openBrowse(tag: string): void {
    this.show("browse");
    void this.loadVersesForTag(tag);
  }

  async loadTags(): Promise<void> {
    const pane = this.panes.browse;
    pane.replaceChildren(el("p", "loading", "loading themes…"));
    try {
      const tags = await this.client.tags();
      const chips = el("div", "tag-cloud");
      for (const entry of tags) {
        const chip = el("button", "tag-chip", `${entry.tag} (${entry.count})`);
        chip.type = "button";
        chip.dataset.tag = entry.tag;
        chip.addEventListener("click", () => void this.loadVersesForTag(entry.tag));
        chips.appendChild(chip);
      }
      pane.replaceChildren(el("h2", "pane-title", "Themes"), chips, el("div", "browse-results"));
    } catch {
      pane.replaceChildren(renderErrorBanner("Cannot load themes from the server."));
    }
  }

  async loadVersesForTag(tag: string): Promise<void> {
    let results = this.panes.browse.querySelector<HTMLElement>(".browse-results");
    if (!results) {
      await this.loadTags();
      results = this.panes.browse.querySelector<HTMLElement>(".browse-results");
      if (!results) return;
    }
    results.replaceChildren(el("p", "loading", `verses on "${tag}"…`));
    try {
      const verses = await this.client.versesByTag(tag);
      results.replaceChildren(
        el("h3", "browse-heading", `${verses.length} verse(s) tagged "${tag}"`),
        ...verses.map((verse) =>
          renderVerseCard(verse, { onTagClick: (next) => void this.loadVersesForTag(next) }),
        ),
      );
    } catch {
      results.replaceChildren(renderErrorBanner(`Cannot load verses for "${tag}".`));
    }
  }
}

export function mount(root: HTMLElement, client?: ApiClient): App {
  return new App(root, client);
}
