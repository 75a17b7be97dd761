import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "./api.js";
import countiesBody from "./__fixtures__/counties.json";
import scenarioBody from "./__fixtures__/scenario_baseline.json";
import errorBody from "./__fixtures__/error_unknown_county.json";

function mockFetch(status: number, body: unknown): ReturnType<typeof vi.fn> {
  const fn = vi.fn(async () =>
    new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    }),
  );
  vi.stubGlobal("fetch", fn);
  return fn;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  it("fetches counties from the right path", async () => {
    const fetchMock = mockFetch(200, countiesBody);
    const body = await new ApiClient().counties();
    expect(fetchMock).toHaveBeenCalledWith("/api/counties");
    expect(body.counties).toHaveLength(21);
    expect(body.counties[0]!.county).toBe("Atlantic");
  });

  it("prefixes a base url", async () => {
    const fetchMock = mockFetch(200, countiesBody);
    await new ApiClient("http://svc:8000").counties();
    expect(fetchMock).toHaveBeenCalledWith("http://svc:8000/api/counties");
  });

  it("posts scenario requests as JSON", async () => {
    const fetchMock = mockFetch(200, scenarioBody);
    const result = await new ApiClient().scenario({
      county: "Atlantic",
      base_year: 2021,
      overrides: { total_afv: { multiply: 2 } },
    });
    const [path, init] = fetchMock.mock.calls[0]!;
    expect(path).toBe("/api/scenario");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body)).toEqual({
      county: "Atlantic",
      base_year: 2021,
      overrides: { total_afv: { multiply: 2 } },
    });
    expect(result.delta).toBe(0.0);
  });

  it("encodes county names in history paths", async () => {
    const fetchMock = mockFetch(200, { county: "Cape May", rows: [] });
    await new ApiClient().history("Cape May");
    expect(fetchMock).toHaveBeenCalledWith("/api/counties/Cape%20May/history");
  });

  it("maps structured error bodies to ApiError", async () => {
    mockFetch(404, errorBody);
    const err = await new ApiClient()
      .scenario({ county: "Atlantis", base_year: 2021, overrides: {} })
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    const apiErr = err as ApiError;
    expect(apiErr.status).toBe(404);
    expect(apiErr.code).toBe("scenario.unknown_county");
    expect(apiErr.isClientError).toBe(true);
  });

  it("flags 5xx as non-client errors", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => new Response("boom", { status: 500 })));
    const err = await new ApiClient().counties().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).isClientError).toBe(false);
  });
});
