import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(status: number, body: object): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function clientWith(handler: (url: string, init?: RequestInit) => Response): {
  client: ApiClient;
  calls: { url: string; init?: RequestInit }[];
} {
  const calls: { url: string; init?: RequestInit }[] = [];
  const fetchImpl = async (input: RequestInfo | URL, init?: RequestInit) => {
    calls.push({ url: String(input), init });
    return handler(String(input), init);
  };
  return { client: new ApiClient("http://api", fetchImpl as typeof fetch), calls };
}

describe("ApiClient", () => {
  it("createSession posts overrides and returns the id", async () => {
    const { client, calls } = clientWith(() => jsonResponse(200, { id: "abc123" }));
    const id = await client.createSession({ oracle: "human" });
    expect(id).toBe("abc123");
    expect(calls[0]?.url).toBe("http://api/sessions");
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({ oracle: "human" });
  });

  it("maps a 400 into ApiError with the server message", async () => {
    const { client } = clientWith(() => jsonResponse(400, { error: "epsilon: must be in (0, 1)" }));
    await expect(client.createSession({})).rejects.toMatchObject({
      status: 400,
      message: "epsilon: must be in (0, 1)",
    });
  });

  it("getQuery returns null on 404 and rethrows other errors", async () => {
    const gone = clientWith(() => jsonResponse(404, { error: "no pending query" }));
    expect(await gone.client.getQuery("s1")).toBeNull();

    const boom = clientWith(() => jsonResponse(500, { error: "kaput" }));
    await expect(boom.client.getQuery("s1")).rejects.toBeInstanceOf(ApiError);
  });

  it("submitSelection carries max_drops out of a 400 body", async () => {
    const { client } = clientWith(() =>
      jsonResponse(400, { error: "dropped 6 exceeds max_drops 5", max_drops: 5 }),
    );
    try {
      await client.submitSelection("s1", { kept: [], dropped: [0, 1, 2, 3, 4, 5] });
      expect.unreachable("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(400);
      expect((err as ApiError).maxDrops).toBe(5);
    }
  });

  it("submitSelection reports a 409 conflict", async () => {
    const { client } = clientWith(() =>
      jsonResponse(409, { error: "no pending query; selection already recorded" }),
    );
    await expect(client.submitSelection("s1", { kept: [0], dropped: [] })).rejects.toMatchObject({
      status: 409,
    });
  });

  it("copes with a non-JSON error body", async () => {
    const { client } = clientWith(() => new Response("<html>bad gateway</html>", { status: 502 }));
    await expect(client.getSession("s1")).rejects.toMatchObject({
      status: 502,
      message: "HTTP 502",
    });
  });

  it("getTrajectories hits the archive route", async () => {
    const { client, calls } = clientWith(() => jsonResponse(200, { episode: 2, candidates: [] }));
    const out = await client.getTrajectories("s1", 2);
    expect(out.episode).toBe(2);
    expect(calls[0]?.url).toBe("http://api/sessions/s1/trajectories/2");
  });
});
