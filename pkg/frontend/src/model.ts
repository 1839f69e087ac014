/** Client-side state machine for one preference session.
 *
 * Tracks the pending query and the user's drop marks, enforces the
 * half-drop constraint locally (so the UI can disable further drops
 * before the server would reject them), and serializes the marks into
 * the kept/dropped selection the API expects.
 */

import {
  ApiClient,
  ApiError,
  EpisodeMetrics,
  QueryPayload,
  Selection,
  SessionState,
} from "./api.js";

export class ConstraintError extends Error {}

export class SelectionModel {
  private marks: boolean[];

  constructor(
    public readonly query: QueryPayload,
  ) {
    this.marks = new Array<boolean>(query.candidates.length).fill(false);
  }

  get maxDrops(): number {
    return this.query.max_drops;
  }

  get dropCount(): number {
    return this.marks.filter(Boolean).length;
  }

  get remainingDrops(): number {
    return this.maxDrops - this.dropCount;
  }

  isDropped(index: number): boolean {
    if (index < 0 || index >= this.marks.length) {
      throw new RangeError(`candidate index ${index} out of range`);
    }
    return this.marks[index] as boolean;
  }

  /** Mark a candidate as dropped. Rejects marks past the half-drop cap. */
  drop(index: number): void {
    if (this.isDropped(index)) return;
    if (this.remainingDrops <= 0) {
      throw new ConstraintError(
        `cannot drop more than ${this.maxDrops} of ${this.marks.length} candidates`,
      );
    }
    this.marks[index] = true;
  }

  keep(index: number): void {
    this.isDropped(index); // bounds check
    this.marks[index] = false;
  }

  toggle(index: number): void {
    if (this.isDropped(index)) this.keep(index);
    else this.drop(index);
  }

  toSelection(): Selection {
    const kept: number[] = [];
    const dropped: number[] = [];
    this.marks.forEach((m, i) => (m ? dropped : kept).push(i));
    return { kept, dropped };
  }
}

export type SessionPhase = "loading" | "selecting" | "waiting" | "stopped" | "failed";

export interface ViewState {
  phase: SessionPhase;
  episode: number;
  history: EpisodeMetrics[];
  selection: SelectionModel | null;
  error: string | null;
}

/** Drives a human session: polls status, exposes the pending query as a
 * SelectionModel, and submits the user's marks. */
export class SessionViewModel {
  private state: ViewState = {
    phase: "loading",
    episode: 0,
    history: [],
    selection: null,
    error: null,
  };

  constructor(
    private readonly client: ApiClient,
    public readonly sessionId: string,
  ) {}

  get view(): ViewState {
    return this.state;
  }

  /** Refresh status and (if awaiting) the pending query from the server. */
  async refresh(): Promise<ViewState> {
    const session: SessionState = await this.client.getSession(this.sessionId);
    let selection = this.state.selection;
    let phase: SessionPhase;
    if (session.status === "awaiting_preference") {
      // keep existing marks if the query is for the same episode
      if (selection === null || selection.query.episode !== session.episode) {
        const query = await this.client.getQuery(this.sessionId);
        selection = query === null ? null : new SelectionModel(query);
      }
      phase = selection === null ? "waiting" : "selecting";
    } else {
      selection = null;
      phase =
        session.status.startsWith("stopped") ? "stopped"
        : session.error !== undefined || session.status.startsWith("failed") ? "failed"
        : "waiting";
    }
    this.state = {
      phase,
      episode: session.episode,
      history: session.history,
      selection,
      error: session.error ?? null,
    };
    return this.state;
  }

  /** Submit the current marks. On a 409 (already answered, e.g. from a
   * second tab) the conflict is swallowed and the session re-synced; a
   * 400 surfaces as a ConstraintError so the UI can show the cap. */
  async submit(): Promise<ViewState> {
    const selection = this.state.selection;
    if (selection === null) {
      throw new ConstraintError("no pending query to answer");
    }
    try {
      await this.client.submitSelection(this.sessionId, selection.toSelection());
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        return this.refresh();
      }
      if (err instanceof ApiError && err.status === 400) {
        throw new ConstraintError(err.message);
      }
      throw err;
    }
    return this.refresh();
  }
}
