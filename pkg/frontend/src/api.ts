// Typed client for the Pragya HTTP API.
//
// Every payload is schema-checked field by field before it reaches the UI:
// unknown fields are ignored, missing required fields throw ApiError, so a
// malformed backend never produces blank cards.

export interface Verse {
  verse_id: number;
  devanagari: string;
  iast: string;
  marathi: string;
  english: string;
  tags: string[];
  score?: number;
  rank?: number;
}

export interface QueryResponse {
  results: Verse[];
  explanation?: string;
  retrieval_ms: number;
  generation_ms?: number;
  mode: string;
  degraded: boolean;
}

export interface TagCount {
  tag: string;
  count: number;
}

export interface QueryBody {
  text: string;
  k: number;
  mode: "semantic" | "keyword";
  generate: boolean;
}

export class ApiError extends Error {
  code: string;
  status: number;

  constructor(code: string, message: string, status = 0) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.status = status;
  }
}

function asRecord(value: unknown, what: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new ApiError("bad_payload", `${what}: expected an object`);
  }
  return value as Record<string, unknown>;
}

function reqNumber(obj: Record<string, unknown>, field: string, what: string): number {
  const value = obj[field];
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new ApiError("bad_payload", `${what}: missing numeric field "${field}"`);
  }
  return value;
}

function reqString(obj: Record<string, unknown>, field: string, what: string): string {
  const value = obj[field];
  if (typeof value !== "string") {
    throw new ApiError("bad_payload", `${what}: missing string field "${field}"`);
  }
  return value;
}

export function parseVerse(value: unknown): Verse {
  const obj = asRecord(value, "verse");
  const tags = obj.tags;
  if (!Array.isArray(tags) || tags.some((t) => typeof t !== "string")) {
    throw new ApiError("bad_payload", 'verse: missing string[] field "tags"');
  }
  const verse: Verse = {
    verse_id: reqNumber(obj, "verse_id", "verse"),
    devanagari: reqString(obj, "devanagari", "verse"),
    iast: reqString(obj, "iast", "verse"),
    marathi: reqString(obj, "marathi", "verse"),
    english: reqString(obj, "english", "verse"),
    tags: tags as string[],
  };
  if (typeof obj.score === "number") verse.score = obj.score;
  if (typeof obj.rank === "number") verse.rank = obj.rank;
  return verse;
}

export function parseQueryResponse(value: unknown): QueryResponse {
  const obj = asRecord(value, "query response");
  if (!Array.isArray(obj.results)) {
    throw new ApiError("bad_payload", 'query response: missing array field "results"');
  }
  const parsed: QueryResponse = {
    results: obj.results.map(parseVerse),
    retrieval_ms: reqNumber(obj, "retrieval_ms", "query response"),
    mode: reqString(obj, "mode", "query response"),
    degraded: obj.degraded === true,
  };
  if (typeof obj.explanation === "string") parsed.explanation = obj.explanation;
  if (typeof obj.generation_ms === "number") parsed.generation_ms = obj.generation_ms;
  return parsed;
}

export function parseTagCount(value: unknown): TagCount {
  const obj = asRecord(value, "tag");
  return { tag: reqString(obj, "tag", "tag"), count: reqNumber(obj, "count", "tag") };
}

async function errorFrom(response: Response): Promise<ApiError> {
  try {
    const body = asRecord(await response.json(), "error body");
    const err = asRecord(body.error, "error body");
    return new ApiError(
      reqString(err, "code", "error body"),
      reqString(err, "message", "error body"),
      response.status,
    );
  } catch {
    return new ApiError("http_error", `HTTP ${response.status}`, response.status);
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (cause) {
      if (cause instanceof DOMException && cause.name === "AbortError") throw cause;
      throw new ApiError("unreachable", "cannot reach the Pragya server");
    }
    if (!response.ok) throw await errorFrom(response);
    return response.json();
  }

  async query(body: QueryBody, signal?: AbortSignal): Promise<QueryResponse> {
    const raw = await this.request("/api/query", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    return parseQueryResponse(raw);
  }

  async daily(): Promise<Verse> {
    return parseVerse(await this.request("/api/daily"));
  }

  async verse(id: number): Promise<Verse> {
    return parseVerse(await this.request(`/api/verses/${id}`));
  }

  async versesByTag(tag: string): Promise<Verse[]> {
    const raw = await this.request(`/api/verses?tag=${encodeURIComponent(tag)}`);
    if (!Array.isArray(raw)) throw new ApiError("bad_payload", "verse list: expected an array");
    return raw.map(parseVerse);
  }

  async tags(): Promise<TagCount[]> {
    const raw = await this.request("/api/tags");
    if (!Array.isArray(raw)) throw new ApiError("bad_payload", "tag list: expected an array");
    return raw.map(parseTagCount);
  }
}
