import { describe, expect, it } from "vitest";

import { ApiClient, QueryPayload, TrajectoryJson } from "../src/api.js";
import { ConstraintError, SelectionModel, SessionViewModel } from "../src/model.js";

function traj(env = "bandit4"): TrajectoryJson {
  return { env, pairs: [{ s: [0], a: 0, t: 0 }], costs: {} };
}

function query(n: number, episode = 0): QueryPayload {
  return {
    session: "s1",
    episode,
    candidates: Array.from({ length: n }, () => traj()),
    max_drops: Math.floor(n / 2),
  };
}

/** Deterministic 32-bit LCG so the randomized property is reproducible. */
function lcg(seed: number): () => number {
  let x = seed >>> 0;
  return () => {
    x = (Math.imul(x, 1664525) + 1013904223) >>> 0;
    return x / 2 ** 32;
  };
}

describe("SelectionModel", () => {
  it("starts with everything kept", () => {
    const m = new SelectionModel(query(6));
    expect(m.dropCount).toBe(0);
    expect(m.remainingDrops).toBe(3);
    expect(m.toSelection()).toEqual({ kept: [0, 1, 2, 3, 4, 5], dropped: [] });
  });

  it("drop/keep/toggle update the partition", () => {
    const m = new SelectionModel(query(5));
    m.drop(1);
    m.toggle(3);
    expect(m.toSelection()).toEqual({ kept: [0, 2, 4], dropped: [1, 3] });
    m.keep(1);
    m.toggle(3);
    expect(m.toSelection()).toEqual({ kept: [0, 1, 2, 3, 4], dropped: [] });
  });

  it("dropping an already-dropped candidate is a no-op", () => {
    const m = new SelectionModel(query(4));
    m.drop(2);
    m.drop(2);
    expect(m.dropCount).toBe(1);
  });

  it("rejects drops past the half-drop cap", () => {
    const m = new SelectionModel(query(5)); // max_drops = 2
    m.drop(0);
    m.drop(1);
    expect(() => m.drop(2)).toThrow(ConstraintError);
    expect(m.dropCount).toBe(2);
    m.keep(0);
    m.drop(2); // freed a slot
    expect(m.toSelection().dropped).toEqual([1, 2]);
  });

  it("bounds-checks candidate indices", () => {
    const m = new SelectionModel(query(3));
    expect(() => m.drop(3)).toThrow(RangeError);
    expect(() => m.drop(-1)).toThrow(RangeError);
    expect(() => m.isDropped(99)).toThrow(RangeError);
  });

  it("never exceeds max_drops over 1000 randomized mask sequences", () => {
    const rand = lcg(12345);
    for (let rep = 0; rep < 1000; rep++) {
      const n = 2 + Math.floor(rand() * 19);
      const m = new SelectionModel(query(n));
      const ops = 1 + Math.floor(rand() * 30);
      for (let k = 0; k < ops; k++) {
        const i = Math.floor(rand() * n);
        try {
          if (rand() < 0.7) m.drop(i);
          else if (rand() < 0.5) m.keep(i);
          else m.toggle(i);
        } catch (err) {
          expect(err).toBeInstanceOf(ConstraintError);
          expect(m.remainingDrops).toBe(0);
        }
        expect(m.dropCount).toBeLessThanOrEqual(m.maxDrops);
        const sel = m.toSelection();
        expect(sel.kept.length + sel.dropped.length).toBe(n);
        const all = [...sel.kept, ...sel.dropped].sort((a, b) => a - b);
        expect(all).toEqual(Array.from({ length: n }, (_, j) => j));
      }
    }
  });
});

/** In-memory stand-in for the HTTP API, driven through the real ApiClient
 * so the view model is exercised over the same fetch path as production. */
class FakeServer {
  status = "awaiting_preference";
  episode = 0;
  history: { episode: number; drop_fraction: number; mean_target_cost: number; query_count: number }[] = [];
  query: QueryPayload | null = query(6, 0);
  submissions: { kept: number[]; dropped: number[] }[] = [];
  rejectNext: { status: number; body: object } | null = null;

  fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    const json = (status: number, body: object) =>
      new Response(JSON.stringify(body), { status, headers: { "content-type": "application/json" } });
    if (url.endsWith("/sessions/s1") && !init) {
      return json(200, { id: "s1", status: this.status, episode: this.episode, history: this.history });
    }
    if (url.endsWith("/sessions/s1/query")) {
      if (this.status !== "awaiting_preference" || this.query === null) {
        return json(404, { error: "no pending query" });
      }
      return json(200, this.query);
    }
    if (url.endsWith("/sessions/s1/selection") && init?.method === "POST") {
      if (this.rejectNext) {
        const r = this.rejectNext;
        this.rejectNext = null;
        return json(r.status, r.body);
      }
      if (this.status !== "awaiting_preference") {
        return json(409, { error: "no pending query; selection already recorded" });
      }
      const sel = JSON.parse(String(init.body)) as { kept: number[]; dropped: number[] };
      this.submissions.push(sel);
      this.history.push({
        episode: this.episode,
        drop_fraction: sel.dropped.length / 6,
        mean_target_cost: 1.0,
        query_count: 6,
      });
      this.status = "stopped(epsilon)";
      this.query = null;
      return json(200, { status: this.status, episode: this.episode });
    }
    return json(404, { error: "unknown route" });
  };
}

describe("SessionViewModel", () => {
  it("loads the pending query and submits the marks", async () => {
    const server = new FakeServer();
    const vm = new SessionViewModel(new ApiClient("http://fake", server.fetch), "s1");
    await vm.refresh();
    expect(vm.view.phase).toBe("selecting");
    expect(vm.view.selection?.maxDrops).toBe(3);

    vm.view.selection!.drop(0);
    vm.view.selection!.drop(4);
    await vm.submit();
    expect(server.submissions).toEqual([{ kept: [1, 2, 3, 5], dropped: [0, 4] }]);
    expect(vm.view.phase).toBe("stopped");
    expect(vm.view.history).toHaveLength(1);
    expect(vm.view.selection).toBeNull();
  });

  it("keeps marks across refreshes of the same episode", async () => {
    const server = new FakeServer();
    const vm = new SessionViewModel(new ApiClient("http://fake", server.fetch), "s1");
    await vm.refresh();
    vm.view.selection!.drop(2);
    await vm.refresh();
    expect(vm.view.selection!.isDropped(2)).toBe(true);
  });

  it("surfaces a server 400 as ConstraintError and keeps the query pending", async () => {
    const server = new FakeServer();
    const vm = new SessionViewModel(new ApiClient("http://fake", server.fetch), "s1");
    await vm.refresh();
    server.rejectNext = { status: 400, body: { error: "dropped 4 exceeds max_drops 3", max_drops: 3 } };
    await expect(vm.submit()).rejects.toThrow(ConstraintError);
    expect(vm.view.phase).toBe("selecting");
  });

  it("resolves a 409 conflict by re-syncing instead of failing", async () => {
    const server = new FakeServer();
    const vm = new SessionViewModel(new ApiClient("http://fake", server.fetch), "s1");
    await vm.refresh();
    // another tab answered first
    server.status = "stopped(epsilon)";
    server.query = null;
    const view = await vm.submit();
    expect(view.phase).toBe("stopped");
  });

  it("refuses to submit without a pending query", async () => {
    const server = new FakeServer();
    server.status = "running";
    server.query = null;
    const vm = new SessionViewModel(new ApiClient("http://fake", server.fetch), "s1");
    await vm.refresh();
    expect(vm.view.phase).toBe("waiting");
    await expect(vm.submit()).rejects.toThrow(ConstraintError);
  });
});
