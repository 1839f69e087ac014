/** Pure trajectory-to-geometry functions for the candidate gallery.
 *
 * Everything here maps trajectory JSON into plain numbers/strings (SVG
 * path data, pixel coordinates) so it can be unit-tested without a DOM.
 */

import { TrajectoryJson } from "./api.js";

export interface ViewBox {
  width: number;
  height: number;
}

export interface Point {
  x: number;
  y: number;
}

/** World-coordinate extent per known environment; used to scale states
 * into the view box.  Unknown environments fall back to the bounding box
 * of the trajectory itself. */
const WORLD_BOUNDS: Record<string, { x: [number, number]; y: [number, number] }> = {
  two_peaks: { x: [-1.2, 1.2], y: [-0.1, 0.1] },
  point_reacher: { x: [-1.0, 1.0], y: [-1.0, 1.0] },
};

function stateXY(s: number[]): Point {
  return { x: s[0] ?? 0, y: s[1] ?? 0 };
}

function bounds(traj: TrajectoryJson): { x: [number, number]; y: [number, number] } {
  const known = WORLD_BOUNDS[traj.env];
  if (known) return known;
  let xs = traj.pairs.map((p) => stateXY(p.s).x);
  let ys = traj.pairs.map((p) => stateXY(p.s).y);
  if (xs.length === 0) {
    xs = [0, 1];
    ys = [0, 1];
  }
  const pad = (lo: number, hi: number): [number, number] =>
    lo === hi ? [lo - 0.5, hi + 0.5] : [lo, hi];
  return { x: pad(Math.min(...xs), Math.max(...xs)), y: pad(Math.min(...ys), Math.max(...ys)) };
}

/** Map a trajectory's states to pixel coordinates in the view box
 * (y axis flipped, SVG-style: larger world y is higher on screen). */
export function trajectoryPoints(traj: TrajectoryJson, box: ViewBox): Point[] {
  const b = bounds(traj);
  const scale = (v: number, [lo, hi]: [number, number], size: number) =>
    ((v - lo) / (hi - lo)) * size;
  return traj.pairs.map((p) => {
    const w = stateXY(p.s);
    return {
      x: scale(w.x, b.x, box.width),
      y: box.height - scale(w.y, b.y, box.height),
    };
  });
}

/** SVG path data ("M x y L x y ...") for one trajectory. */
export function trajectoryPath(traj: TrajectoryJson, box: ViewBox): string {
  const pts = trajectoryPoints(traj, box);
  if (pts.length === 0) return "";
  const fmt = (v: number) => Number(v.toFixed(2)).toString();
  return pts
    .map((p, i) => `${i === 0 ? "M" : "L"} ${fmt(p.x)} ${fmt(p.y)}`)
    .join(" ");
}

/** One-line caption for a candidate card. */
export function trajectoryCaption(traj: TrajectoryJson, index: number): string {
  const last = traj.pairs[traj.pairs.length - 1];
  if (!last) return `#${index}: empty trajectory`;
  const end = stateXY(last.s);
  return `#${index}: ${traj.pairs.length} steps, ends at (${end.x.toFixed(2)}, ${end.y.toFixed(2)})`;
}

export interface HistoryRow {
  episode: number;
  dropFraction: string;
  meanTargetCost: string;
}

export function historyRows(
  history: { episode: number; drop_fraction: number; mean_target_cost: number }[],
): HistoryRow[] {
  return history.map((h) => ({
    episode: h.episode,
    dropFraction: h.drop_fraction.toFixed(2),
    meanTargetCost: h.mean_target_cost.toFixed(3),
  }));
}
