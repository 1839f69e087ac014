"""Named tabular fixtures used by tests, the CLI and experiment scripts.

Layered MDPs (one state per (layer, position) with deterministic
position = action transitions) keep each state visited at exactly one
time step, so a stationary per-pair cost can represent the soft-optimal
policy's log-density exactly.
"""

import numpy as np

from .envs import TabularMDP


def layered_mdp(n_pos, horizon, basic_cost, target_cost, name="layered", gamma=0.99):
    """Deterministic layered MDP: single start state, then ``n_pos`` states
    per layer; action a moves to position a of the next layer.

    ``basic_cost``/``target_cost`` are (state, action) -> float callables
    over the encoded state indices (0 = start, 1 + (t-1)*n_pos + pos).
    """
    n_states = 1 + (horizon - 1) * n_pos if horizon > 1 else 1
    n_actions = n_pos
    T = np.zeros((n_states, n_actions, n_states))

    def enc(t, pos):
        return 0 if t == 0 else 1 + (t - 1) * n_pos + pos

    for t in range(horizon):
        states = [0] if t == 0 else [enc(t, p) for p in range(n_pos)]
        for s in states:
            for a in range(n_actions):
                if t + 1 < horizon:
                    T[s, a, enc(t + 1, a)] = 1.0
                else:
                    T[s, a, s] = 1.0  # padding row; rollout never uses it
    mu = np.zeros(n_states)
    mu[0] = 1.0
    cb = np.array([[basic_cost(s, a) for a in range(n_actions)] for s in range(n_states)])
    ct = np.array([[target_cost(s, a) for a in range(n_actions)] for s in range(n_states)])
    return TabularMDP(n_states=n_states, n_actions=n_actions, horizon=horizon,
                      transition=T, initial=mu, basic_cost_table=cb,
                      target_cost_table=ct, gamma=gamma, name=name)


def bandit4():
    """Single-state 4-armed bandit, H=1; target cost reverses the arm order."""
    T = np.ones((1, 4, 1))
    return TabularMDP(n_states=1, n_actions=4, horizon=1, transition=T,
                      initial=np.array([1.0]),
                      basic_cost_table=np.array([[0.0, 0.5, 1.0, 1.5]]),
                      target_cost_table=np.array([[1.5, 1.0, 0.5, 0.0]]),
                      name="bandit4")


def chain2():
    """Two-position layered chain, H=3, 8 trajectories, mixed costs."""
    def basic(s, a):
        return 0.3 + 0.45 * a + 0.2 * (s % 2)

    def target(s, a):
        return 1.1 - 0.45 * a + 0.15 * (s % 2)

    return layered_mdp(2, 3, basic, target, name="chain2")


def twogoal():
    """Two-goal transfer fixture: basic cost indifferent between the goals,
    target cost heavily penalizes moves toward goal B (action 1)."""

    def basic(s, a):
        return 1.0

    def target(s, a):
        return 1.0 + 4.0 * (a == 1)

    return layered_mdp(2, 3, basic, target, name="twogoal")


def random_layered(rng, n_pos=2, horizon=3, cost_scale=1.5, name="random_layered"):
    """Random-cost deterministic layered MDP for property tests."""
    n_states = 1 + (horizon - 1) * n_pos if horizon > 1 else 1
    cb = rng.uniform(0.0, cost_scale, size=(n_states, n_pos))
    ct = rng.uniform(0.0, cost_scale, size=(n_states, n_pos))
    return layered_mdp(n_pos, horizon, lambda s, a: cb[s, a], lambda s, a: ct[s, a], name=name)


def random_tabular(rng, n_states=3, n_actions=2, horizon=3, deterministic=True, name="random_tabular"):
    """Random (optionally stochastic) tabular MDP with a single start state."""
    T = np.zeros((n_states, n_actions, n_states))
    for s in range(n_states):
        for a in range(n_actions):
            if deterministic:
                T[s, a, rng.integers(n_states)] = 1.0
            else:
                w = rng.uniform(0.1, 1.0, size=n_states)
                T[s, a] = w / w.sum()
    mu = np.zeros(n_states)
    mu[0] = 1.0
    cb = rng.uniform(0.0, 1.5, size=(n_states, n_actions))
    ct = rng.uniform(0.0, 1.5, size=(n_states, n_actions))
    return TabularMDP(n_states=n_states, n_actions=n_actions, horizon=horizon,
                      transition=T, initial=mu, basic_cost_table=cb,
                      target_cost_table=ct, name=name)


TABULAR_FIXTURES = {
    "bandit4": bandit4,
    "chain2": chain2,
    "twogoal": twogoal,
}


def get_fixture(name):
    if name not in TABULAR_FIXTURES:
        raise KeyError(f"unknown tabular fixture {name!r}; known: {sorted(TABULAR_FIXTURES)}")
    return TABULAR_FIXTURES[name]()
