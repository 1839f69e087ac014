"""Reward-free MDPs, trajectories and rollout machinery.

States/actions are plain ints for tabular environments and float arrays
for continuous ones. Costs are supplied externally as ``cost(s, a)``
callables; environments carry a ground-truth basic and target cost used
only by oracles and evaluation.
"""

from dataclasses import dataclass, field

import numpy as np

from .seeding import as_rng


class InvalidActionError(ValueError):
    pass


class EnumerationCapExceeded(RuntimeError):
    pass


@dataclass
class StateActionPair:
    state: object
    action: object
    step_index: int


@dataclass
class Trajectory:
    pairs: list
    cached_costs: dict = field(default_factory=dict)

    @property
    def horizon(self):
        return len(self.pairs)

    def key(self):
        """Hashable identity of the state-action sequence (exact values)."""
        out = []
        for p in self.pairs:
            s = tuple(np.asarray(p.state).ravel().tolist()) if not np.isscalar(p.state) else p.state
            a = tuple(np.asarray(p.action).ravel().tolist()) if not np.isscalar(p.action) else p.action
            out.append((s, a))
        return tuple(out)

    def states(self):
        return [p.state for p in self.pairs]

    def actions(self):
        return [p.action for p in self.pairs]


@dataclass
class TrajectorySet:
    trajectories: list
    provenance: str = "initial_demos"

    def __len__(self):
        return len(self.trajectories)

    def __iter__(self):
        return iter(self.trajectories)


class EnvSpec:
    """Reward-free MDP: (S, A, T, gamma, mu) plus external cost maps.

    Instances are immutable specifications; rollouts own their generator
    state, so independent rollouts may run concurrently.
    """

    # concrete subclasses define: name, state_dim, action_dim,
    # action_kind ("discrete" | "continuous"), horizon, gamma

    def sample_initial(self, rng):
        raise NotImplementedError

    def step(self, state, action, rng):
        raise NotImplementedError

    def action_valid(self, action):
        raise NotImplementedError

    def basic_cost(self, s, a):
        raise NotImplementedError

    def target_cost(self, s, a):
        raise NotImplementedError


@dataclass
class TabularMDP(EnvSpec):
    """Small finite MDP with explicit transition/cost tables.

    ``transition[s, a]`` is a row-stochastic distribution over next
    states; a one-hot row makes that transition deterministic.
    """

    n_states: int
    n_actions: int
    horizon: int
    transition: np.ndarray          # [S, A, S]
    initial: np.ndarray             # [S]
    basic_cost_table: np.ndarray    # [S, A]
    target_cost_table: np.ndarray   # [S, A]
    gamma: float = 0.99
    name: str = "tabular"

    def __post_init__(self):
        self.transition = np.asarray(self.transition, dtype=float)
        self.initial = np.asarray(self.initial, dtype=float)
        self.basic_cost_table = np.asarray(self.basic_cost_table, dtype=float)
        self.target_cost_table = np.asarray(self.target_cost_table, dtype=float)
        assert self.transition.shape == (self.n_states, self.n_actions, self.n_states)
        rows = self.transition.sum(axis=2)
        if not np.allclose(rows, 1.0, rtol=0.0, atol=1e-9):
            raise ValueError("transition rows must sum to 1 within 1e-9")
        if not np.isclose(self.initial.sum(), 1.0, rtol=0.0, atol=1e-9):
            raise ValueError("initial distribution must sum to 1")
        if not (np.isfinite(self.basic_cost_table).all() and np.isfinite(self.target_cost_table).all()):
            raise ValueError("cost tables must be finite")
        self.state_dim = self.n_states   # one-hot feature width
        self.action_dim = self.n_actions
        self.action_kind = "discrete"

    def sample_initial(self, rng):
        return int(rng.choice(self.n_states, p=self.initial))

    def step(self, state, action, rng):
        return int(rng.choice(self.n_states, p=self.transition[state, action]))

    def action_valid(self, action):
        return isinstance(action, (int, np.integer)) and 0 <= action < self.n_actions

    def basic_cost(self, s, a):
        return float(self.basic_cost_table[s, a])

    def target_cost(self, s, a):
        return float(self.target_cost_table[s, a])

    def is_deterministic(self):
        return bool((self.transition.max(axis=2) == 1.0).all())


def _policy_act(policy, state, t, rng):
    if hasattr(policy, "act"):
        return policy.act(state, t, rng)
    return policy(state, t, rng)


def rollout(env, policy, seed):
    """Execute one fixed-horizon episode; bit-identical under equal seeds.

    ``policy`` is either an object with ``act(state, t, rng)`` or a
    callable with the same signature.
    """
    rng = as_rng(seed)
    s = env.sample_initial(rng)
    pairs = []
    for t in range(env.horizon):
        a = _policy_act(policy, s, t, rng)
        if not env.action_valid(a):
            raise InvalidActionError(f"policy emitted out-of-space action {a!r} at step {t}")
        pairs.append(StateActionPair(state=s, action=a, step_index=t))
        if t + 1 < env.horizon:
            s = env.step(s, a, rng)
    return Trajectory(pairs=pairs)


def trajectory_cost(traj, cost, cache_id=None):
    """Sum of per-step costs over the trajectory; optionally cached."""
    if cache_id is not None and cache_id in traj.cached_costs:
        return traj.cached_costs[cache_id]
    total = float(sum(cost(p.state, p.action) for p in traj.pairs))
    if cache_id is not None:
        traj.cached_costs[cache_id] = total
    return total


def enumerate_trajectories(env, policy=None, cap=1_000_000):
    """All horizon-length trajectories of a TabularMDP with exact probabilities.

    Probability of a trajectory is mu(s0) * prod_t pi(a_t|s_t, t) *
    p(s_{t+1}|s_t, a_t); with ``policy=None`` the policy factor is uniform.
    Only dynamics-feasible branches (positive probability) are expanded.
    """
    if not isinstance(env, TabularMDP):
        raise TypeError("enumeration requires a TabularMDP")
    out = []

    def action_probs(s, t):
        if policy is None:
            return np.full(env.n_actions, 1.0 / env.n_actions)
        return np.asarray(policy.action_probs(s, t), dtype=float)

    def expand(s, t, prefix, prob):
        if len(out) > cap:
            raise EnumerationCapExceeded(f"enumeration exceeds cap {cap}")
        probs_a = action_probs(s, t)
        for a in range(env.n_actions):
            pa = probs_a[a]
            if pa == 0.0:
                continue
            pair = StateActionPair(state=s, action=a, step_index=t)
            if t + 1 == env.horizon:
                out.append((Trajectory(pairs=prefix + [pair]), prob * pa))
            else:
                row = env.transition[s, a]
                for s2 in np.nonzero(row)[0]:
                    expand(int(s2), t + 1, prefix + [pair], prob * pa * row[s2])

    for s0 in np.nonzero(env.initial)[0]:
        expand(int(s0), 0, [], float(env.initial[s0]))
    if len(out) > cap:
        raise EnumerationCapExceeded(f"enumeration exceeds cap {cap}")
    return out
