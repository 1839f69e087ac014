import { describe, expect, it } from "vitest";

import { TrajectoryJson } from "../src/api.js";
import { historyRows, trajectoryCaption, trajectoryPath, trajectoryPoints } from "../src/render.js";

const BOX = { width: 200, height: 100 };

function reacher(states: [number, number][]): TrajectoryJson {
  return {
    env: "point_reacher",
    pairs: states.map((s, t) => ({ s, a: [0, 0], t })),
    costs: {},
  };
}

describe("trajectoryPoints", () => {
  it("maps point_reacher world coordinates into the view box", () => {
    const pts = trajectoryPoints(reacher([[0, 0], [1, 1], [-1, -1]]), BOX);
    // world bounds are [-1, 1] on both axes; y is flipped
    expect(pts[0]).toEqual({ x: 100, y: 50 });
    expect(pts[1]).toEqual({ x: 200, y: 0 });
    expect(pts[2]).toEqual({ x: 0, y: 100 });
  });

  it("maps two_peaks (x, v) states against its fixed bounds", () => {
    const traj: TrajectoryJson = {
      env: "two_peaks",
      pairs: [
        { s: [-1.2, 0], a: [0], t: 0 },
        { s: [1.2, 0.1], a: [0], t: 1 },
      ],
      costs: {},
    };
    const pts = trajectoryPoints(traj, BOX);
    expect(pts[0]).toEqual({ x: 0, y: 50 });
    expect(pts[1]).toEqual({ x: 200, y: 0 });
  });

  it("falls back to the trajectory's own bounding box for unknown envs", () => {
    const traj: TrajectoryJson = {
      env: "mystery",
      pairs: [
        { s: [2, 10], a: 0, t: 0 },
        { s: [4, 20], a: 0, t: 1 },
      ],
      costs: {},
    };
    const pts = trajectoryPoints(traj, BOX);
    expect(pts[0]).toEqual({ x: 0, y: 100 });
    expect(pts[1]).toEqual({ x: 200, y: 0 });
  });

  it("centers a single repeated state instead of dividing by zero", () => {
    const traj: TrajectoryJson = {
      env: "mystery",
      pairs: [{ s: [3, 3], a: 0, t: 0 }],
      costs: {},
    };
    const pts = trajectoryPoints(traj, BOX);
    expect(pts[0]).toEqual({ x: 100, y: 50 });
  });
});

describe("trajectoryPath", () => {
  it("emits M/L path data matching the points", () => {
    const d = trajectoryPath(reacher([[0, 0], [1, 1]]), BOX);
    expect(d).toBe("M 100 50 L 200 0");
  });

  it("returns an empty string for an empty trajectory", () => {
    const traj: TrajectoryJson = { env: "point_reacher", pairs: [], costs: {} };
    expect(trajectoryPath(traj, BOX)).toBe("");
  });
});

describe("trajectoryCaption", () => {
  it("reports length and final state", () => {
    const cap = trajectoryCaption(reacher([[0, 0], [0.5, -0.25]]), 7);
    expect(cap).toBe("#7: 2 steps, ends at (0.50, -0.25)");
  });

  it("handles an empty trajectory", () => {
    const traj: TrajectoryJson = { env: "point_reacher", pairs: [], costs: {} };
    expect(trajectoryCaption(traj, 0)).toContain("empty");
  });
});

describe("historyRows", () => {
  it("formats the metrics for display", () => {
    const rows = historyRows([
      { episode: 0, drop_fraction: 0.3333333, mean_target_cost: 1.23456 },
    ]);
    expect(rows).toEqual([
      { episode: 0, dropFraction: "0.33", meanTargetCost: "1.235" },
    ]);
  });
});
