import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError, parseQueryResponse, parseVerse } from "../src/api.js";

const VERSE = {
  verse_id: 4,
  devanagari: "उत्सवे व्यसने चैव",
  iast: "utsave vyasane caiva",
  marathi: "खरा बांधव",
  english: "A true friend stands by you.",
  tags: ["friendship", "loyalty"],
  score: 0.42,
  rank: 1,
};

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("payload parsing", () => {
  it("accepts a full verse and ignores unknown fields", () => {
    const verse = parseVerse({ ...VERSE, totally_new_field: "ignored" });
    expect(verse.verse_id).toBe(4);
    expect(verse.tags).toEqual(["friendship", "loyalty"]);
    expect((verse as Record<string, unknown>).totally_new_field).toBeUndefined();
  });

  it("rejects a verse missing a required field", () => {
    const { devanagari, ...rest } = VERSE;
    expect(() => parseVerse(rest)).toThrowError(ApiError);
    expect(() => parseVerse(rest)).toThrowError(/devanagari/);
  });

  it("rejects non-object payloads", () => {
    expect(() => parseVerse(null)).toThrowError(ApiError);
    expect(() => parseVerse([VERSE])).toThrowError(ApiError);
  });

  it("parses a query response with optional fields absent", () => {
    const parsed = parseQueryResponse({
      results: [VERSE],
      retrieval_ms: 1.5,
      mode: "semantic",
      degraded: false,
    });
    expect(parsed.explanation).toBeUndefined();
    expect(parsed.generation_ms).toBeUndefined();
    expect(parsed.results).toHaveLength(1);
  });

  it("requires the results array", () => {
    expect(() =>
      parseQueryResponse({ retrieval_ms: 1, mode: "semantic", degraded: false }),
    ).toThrowError(/results/);
  });
});

describe("ApiClient", () => {
  it("POSTs the query body and parses the response", async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse({ results: [VERSE], retrieval_ms: 2.0, mode: "semantic", degraded: false }),
    );
    vi.stubGlobal("fetch", fetchMock);

    const client = new ApiClient("http://backend:8080");
    const response = await client.query({ text: "friendship", k: 3, mode: "semantic", generate: false });

    expect(response.results[0].verse_id).toBe(4);
    expect(fetchMock).toHaveBeenCalledTimes(1);
    const [url, init] = fetchMock.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("http://backend:8080/api/query");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual({
      text: "friendship",
      k: 3,
      mode: "semantic",
      generate: false,
    });
  });

  it("surfaces the server's error code and message", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () =>
        jsonResponse({ error: { code: "empty_query", message: "query text is empty" } }, 400),
      ),
    );
    const client = new ApiClient("");
    await expect(
      client.query({ text: " ", k: 3, mode: "semantic", generate: false }),
    ).rejects.toMatchObject({ code: "empty_query", status: 400 });
  });

  it("wraps network failures as unreachable", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => {
      throw new TypeError("fetch failed");
    }));
    const client = new ApiClient("http://nowhere:1");
    await expect(client.daily()).rejects.toMatchObject({ code: "unreachable" });
  });

  it("fetches and validates the daily verse", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(VERSE)));
    const client = new ApiClient("");
    const verse = await client.daily();
    expect(verse.english).toMatch(/true friend/);
  });

  it("rejects malformed verse lists", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse({ not: "a list" })));
    const client = new ApiClient("");
    await expect(client.versesByTag("friendship")).rejects.toMatchObject({ code: "bad_payload" });
  });

  it("fetches tag counts", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse([{ tag: "courage", count: 4 }])));
    const client = new ApiClient("");
    expect(await client.tags()).toEqual([{ tag: "courage", count: 4 }]);
  });
});
