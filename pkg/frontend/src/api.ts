/** Typed client for the preftransfer HTTP session API. */

export interface TrajectoryPair {
  s: number[];
  a: number | number[];
  t: number;
}

export interface TrajectoryJson {
  env: string;
  pairs: TrajectoryPair[];
  costs: Record<string, number>;
}

export interface QueryPayload {
  session: string;
  episode: number;
  candidates: TrajectoryJson[];
  max_drops: number;
}

export interface EpisodeMetrics {
  episode: number;
  drop_fraction: number;
  mean_target_cost: number;
  query_count: number;
}

export interface SessionState {
  id: string;
  status: string;
  episode: number;
  history: EpisodeMetrics[];
  error?: string;
}

export interface Selection {
  kept: number[];
  dropped: number[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
    public readonly maxDrops?: number,
  ) {
    super(message);
  }
}

async function parseError(res: Response): Promise<ApiError> {
  let message = `HTTP ${res.status}`;
  let maxDrops: number | undefined;
  try {
    const body = (await res.json()) as { error?: string; max_drops?: number };
    if (body.error) message = body.error;
    maxDrops = body.max_drops;
  } catch {
    /* non-JSON error body; keep the status message */
  }
  return new ApiError(res.status, message, maxDrops);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetchImpl(`${this.baseUrl}${path}`);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  async healthz(): Promise<void> {
    await this.get<{ status: string }>("/healthz");
  }

  async createSession(overrides: object = {}): Promise<string> {
    const res = await this.fetchImpl(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(overrides),
    });
    if (!res.ok) throw await parseError(res);
    return ((await res.json()) as { id: string }).id;
  }

  getSession(id: string): Promise<SessionState> {
    return this.get<SessionState>(`/sessions/${id}`);
  }

  /** Pending preference query, or null when none is outstanding. */
  async getQuery(id: string): Promise<QueryPayload | null> {
    try {
      return await this.get<QueryPayload>(`/sessions/${id}/query`);
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) return null;
      throw err;
    }
  }

  async submitSelection(id: string, selection: Selection): Promise<SessionState> {
    const res = await this.fetchImpl(`${this.baseUrl}/sessions/${id}/selection`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(selection),
    });
    if (!res.ok) throw await parseError(res);
    const body = (await res.json()) as { status: string; episode: number };
    return { id, status: body.status, episode: body.episode, history: [] };
  }

  getTrajectories(id: string, episode: number): Promise<{ episode: number; candidates: TrajectoryJson[] }> {
    return this.get(`/sessions/${id}/trajectories/${episode}`);
  }
}
