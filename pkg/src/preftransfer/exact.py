"""Exact ground-truth machinery on tabular MDPs.

Boltzmann trajectory distributions, soft-optimal expert policies
(backward soft value iteration, time-indexed) and distribution-distance
metrics. These are the independent oracles every property test leans on;
all functions are pure.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .envs import TabularMDP, enumerate_trajectories, trajectory_cost


def logsumexp(v):
    v = np.asarray(v, dtype=float)
    m = v.max()
    return m + np.log(np.exp(v - m).sum())


@dataclass
class BoltzmannDistribution:
    """p(tau) = exp(-C(tau)) / Z over an enumerated trajectory support."""

    support: list
    log_weights: np.ndarray
    log_partition: float
    probabilities: np.ndarray

    def index_of(self):
        return {traj.key(): i for i, traj in enumerate(self.support)}


def boltzmann_distribution(env, cost, cap=1_000_000):
    """Exact Boltzmann distribution over all trajectories of a TabularMDP."""
    support = [traj for traj, _ in enumerate_trajectories(env, policy=None, cap=cap)]
    log_w = np.array([-trajectory_cost(t, cost) for t in support])
    log_z = logsumexp(log_w)
    return BoltzmannDistribution(
        support=support,
        log_weights=log_w,
        log_partition=float(log_z),
        probabilities=np.exp(log_w - log_z),
    )


@dataclass
class ExpertPolicy:
    """Soft-optimal time-indexed policy: tables[t][s] is a distribution over actions.

    Rolling this policy out on a deterministic single-start TabularMDP
    samples the Boltzmann distribution of its cost exactly.
    """

    tables: np.ndarray  # [H, S, A]

    def action_probs(self, s, t):
        return self.tables[t, s]

    def act(self, s, t, rng):
        return int(rng.choice(self.tables.shape[2], p=self.tables[t, s]))


def soft_expert(env, cost, temperature=1.0):
    """Backward soft value iteration on a TabularMDP.

    Q_t(s,a) = c(s,a) + E_{s'}[V_{t+1}(s')],  V_t(s) = -T log sum_a exp(-Q_t/T),
    pi(a|s,t) = exp((V_t(s) - Q_t(s,a)) / T).
    """
    if not isinstance(env, TabularMDP):
        raise TypeError("soft_expert requires a TabularMDP")
    H, S, A = env.horizon, env.n_states, env.n_actions
    c = np.array([[cost(s, a) for a in range(A)] for s in range(S)])
    tables = np.zeros((H, S, A))
    v_next = np.zeros(S)
    for t in reversed(range(H)):
        q = c + env.transition @ v_next          # [S, A]
        v = -temperature * np.array([logsumexp(-q[s] / temperature) for s in range(S)])
        tables[t] = np.exp((v[:, None] - q) / temperature)
        tables[t] /= tables[t].sum(axis=1, keepdims=True)
        v_next = v
    return ExpertPolicy(tables=tables)


def induced_distribution(env, policy, support=None, cap=1_000_000):
    """Exact trajectory distribution induced by a (time-indexed) policy,
    expressed over ``support`` ordering when given."""
    pairs = enumerate_trajectories(env, policy=policy, cap=cap)
    if support is None:
        return [t for t, _ in pairs], np.array([p for _, p in pairs])
    idx = {t.key(): i for i, t in enumerate(support)}
    probs = np.zeros(len(support))
    for traj, p in pairs:
        probs[idx[traj.key()]] += p
    return support, probs


def total_variation(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("distributions must share one support ordering")
    return 0.5 * float(np.abs(p - q).sum())


def empirical_distribution(samples, support):
    """Frequency vector of sampled trajectories over an enumerated support."""
    idx = {t.key(): i for i, t in enumerate(support)}
    counts = np.zeros(len(support))
    for traj in samples:
        k = traj.key()
        if k not in idx:
            raise ValueError(f"sample outside support: {k}")
        counts[idx[k]] += 1
    return counts / counts.sum()


def export_distribution_csv(path, dist, cost):
    """CSV dump: trajectory-index, cost, probability."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["trajectory_index", "cost", "probability"])
        for i, traj in enumerate(dist.support):
            w.writerow([i, trajectory_cost(traj, cost), repr(float(dist.probabilities[i]))])
