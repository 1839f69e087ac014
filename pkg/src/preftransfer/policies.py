"""Stochastic policies and the score-function policy-gradient update.

The generator is read as a policy pi(a|s): categorical with a logits head
over one-hot (state, step) features for tabular tasks, diagonal Gaussian
with a squashed mean head for continuous tasks. Policy improvement is
REINFORCE with reward-to-go and a moving-average baseline; the entropy
term enters as a per-step reward bonus -w * log pi(a|s).
"""

from dataclasses import dataclass

import numpy as np

from .envs import rollout
from .nets import Adam, ParamFunction

LOG_STD_MIN, LOG_STD_MAX = -5.0, 2.0
DENSITY_FLOOR = 1e-12


class CategoricalPolicy:
    """Logits head over one-hot(state) + one-hot(step) features."""

    kind = "categorical"

    def __init__(self, n_states, n_actions, horizon, hidden=(32, 32), activation="tanh", seed=0):
        self.n_states = n_states
        self.n_actions = n_actions
        self.horizon = horizon
        feat = n_states + horizon
        self.head = ParamFunction([feat, *hidden, n_actions], activation=activation, rng_seed=seed)

    @property
    def params(self):
        return self.head.params

    @params.setter
    def params(self, p):
        self.head.params = np.asarray(p, dtype=float)

    def features(self, s, t):
        f = np.zeros(self.n_states + self.horizon)
        f[s] = 1.0
        f[self.n_states + t] = 1.0
        return f

    def action_probs(self, s, t):
        logits = self.head.forward(self.features(s, t))
        z = logits - logits.max()
        e = np.exp(z)
        return e / e.sum()

    def act(self, s, t, rng):
        return int(rng.choice(self.n_actions, p=self.action_probs(s, t)))

    def log_prob(self, s, a, t):
        if not (0 <= a < self.n_actions):
            raise ValueError(f"action {a} outside discrete space of size {self.n_actions}")
        logits = self.head.forward(self.features(s, t))
        z = logits - logits.max()
        return float(z[a] - np.log(np.exp(z).sum()))

    def logprob_grad(self, states, actions, ts, coeffs):
        """sum_i coeffs[i] * grad_phi log pi(a_i | s_i, t_i), one batched backward."""
        X = np.stack([self.features(s, t) for s, t in zip(states, ts)])
        logits, cache = self.head.forward_cached(X)
        z = logits - logits.max(axis=1, keepdims=True)
        probs = np.exp(z)
        probs /= probs.sum(axis=1, keepdims=True)
        cot = -probs * np.asarray(coeffs)[:, None]
        cot[np.arange(len(actions)), np.asarray(actions, dtype=int)] += np.asarray(coeffs)
        flat, _ = self.head.backward(cache, cot)
        return flat


class GaussianPolicy:
    """Diagonal Gaussian: mean = tanh-squashed head output scaled into the
    action box; per-dimension log-std is a free parameter vector clamped
    into [-5, 2] at density evaluation. Sampled actions are clipped to the
    box before execution."""

    kind = "gaussian"

    def __init__(self, state_dim, action_dim, action_low, action_high,
                 hidden=(32, 32), activation="tanh", seed=0, init_log_std=None):
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.low = float(action_low)
        self.high = float(action_high)
        self.head = ParamFunction([state_dim, *hidden, action_dim], activation=activation, rng_seed=seed)
        # shrink the output layer so the initial mean sits near the box
        # center, unsaturated; early behavior is then exploration-driven
        n_out_block = (hidden[-1] + 1) * action_dim if hidden else (state_dim + 1) * action_dim
        self.head.params[-n_out_block:] *= 0.1
        if init_log_std is None:
            # exploration noise scaled to the box: std = quarter half-range
            init_log_std = float(np.log(0.25 * 0.5 * (self.high - self.low)))
        self.log_std = np.full(action_dim, float(init_log_std))

    @property
    def params(self):
        return np.concatenate([self.head.params, self.log_std])

    @params.setter
    def params(self, p):
        p = np.asarray(p, dtype=float)
        n = len(self.head.params)
        self.head.params = p[:n].copy()
        self.log_std = p[n:].copy()

    def _mean(self, s):
        y = self.head.forward(np.asarray(s, dtype=float))
        c = 0.5 * (self.low + self.high)
        half = 0.5 * (self.high - self.low)
        return c + half * np.tanh(y)

    def act(self, s, t, rng):
        std = np.exp(np.clip(self.log_std, LOG_STD_MIN, LOG_STD_MAX))
        a = self._mean(s) + std * rng.standard_normal(self.action_dim)
        return np.clip(a, self.low, self.high)

    def log_prob(self, s, a, t):
        a = np.asarray(a, dtype=float).ravel()
        if not ((a >= self.low).all() and (a <= self.high).all()):
            raise ValueError(f"action {a} outside box [{self.low}, {self.high}]")
        mean = self._mean(s)
        log_std = np.clip(self.log_std, LOG_STD_MIN, LOG_STD_MAX)
        std = np.exp(log_std)
        z = (a - mean) / std
        return float(-0.5 * (z * z).sum() - log_std.sum() - 0.5 * self.action_dim * np.log(2 * np.pi))

    def logprob_grad(self, states, actions, ts, coeffs):
        X = np.stack([np.asarray(s, dtype=float) for s in states])
        A = np.stack([np.asarray(a, dtype=float).ravel() for a in actions])
        w = np.asarray(coeffs, dtype=float)[:, None]
        y, cache = self.head.forward_cached(X)
        c = 0.5 * (self.low + self.high)
        half = 0.5 * (self.high - self.low)
        th = np.tanh(y)
        mean = c + half * th
        log_std = np.clip(self.log_std, LOG_STD_MIN, LOG_STD_MAX)
        var = np.exp(2 * log_std)
        dmean = (A - mean) / var                     # dlogpi/dmean
        cot = w * dmean * half * (1.0 - th * th)     # chain through tanh squash
        flat_head, _ = self.head.backward(cache, cot)
        dlogstd = (w * (((A - mean) ** 2) / var - 1.0)).sum(axis=0)
        return np.concatenate([flat_head, dlogstd])


def entropy_estimate(policy, states, ts, rng, samples_per_state=1):
    """Monte-Carlo mean of -log pi(a|s) with actions drawn from the policy."""
    if len(states) == 0:
        raise ValueError("non-empty state batch required")
    vals = []
    for s, t in zip(states, ts):
        for _ in range(samples_per_state):
            a = policy.act(s, t, rng)
            vals.append(-policy.log_prob(s, a, t))
    return float(np.mean(vals))


@dataclass
class PolicyGradientConfig:
    batch_episodes: int = 16
    entropy_weight: float = 0.1
    baseline: str = "moving-average"   # or "none"
    discount_for_credit: float = 0.99
    step_size: float = 1e-2
    normalize_advantages: bool = False

    def __post_init__(self):
        if self.batch_episodes < 1:
            raise ValueError("batch_episodes must be >= 1")


class PolicyGradientState:
    """Optimizer + baseline state threaded across update steps."""

    def __init__(self, cfg, horizon):
        self.opt = Adam(step_size=cfg.step_size)
        self.baseline = np.zeros(horizon)
        self.baseline_initialized = False


def policy_gradient_step(policy, env, reward_fn, cfg, rng, state=None, trajs=None):
    """One REINFORCE batch: collect rollouts, update the policy in place.

    ``reward_fn(s, a, t, logp)`` supplies the per-step reward. Pass
    ``trajs`` to reuse rollouts collected with the current policy instead
    of sampling fresh ones. Returns (state, stats) where stats carries
    mean episode return and entropy.
    """
    if state is None:
        state = PolicyGradientState(cfg, env.horizon)
    if trajs is None:
        trajs = [rollout(env, policy, rng) for _ in range(cfg.batch_episodes)]

    all_s, all_a, all_t, all_adv = [], [], [], []
    ep_returns, ent_terms = [], []
    returns_by_t = np.zeros(env.horizon)
    for traj in trajs:
        logps = [policy.log_prob(p.state, p.action, p.step_index) for p in traj.pairs]
        rs = []
        for p, lp in zip(traj.pairs, logps):
            r = reward_fn(p.state, p.action, p.step_index, lp)
            if not np.isfinite(r):
                raise FloatingPointError(f"non-finite reward at step {p.step_index}")
            rs.append(r + cfg.entropy_weight * (-lp))
        ep_returns.append(sum(r - cfg.entropy_weight * (-lp) for r, lp in zip(rs, logps)))
        ent_terms.extend(-lp for lp in logps)
        g = 0.0
        rtg = np.zeros(env.horizon)
        for t in reversed(range(env.horizon)):
            g = rs[t] + cfg.discount_for_credit * g
            rtg[t] = g
        returns_by_t += rtg / len(trajs)
        for p, gt in zip(traj.pairs, rtg):
            all_s.append(p.state)
            all_a.append(p.action)
            all_t.append(p.step_index)
            all_adv.append(gt)

    all_adv = np.asarray(all_adv)
    if cfg.baseline == "moving-average":
        if not state.baseline_initialized:
            state.baseline = returns_by_t.copy()
            state.baseline_initialized = True
        all_adv = all_adv - state.baseline[np.asarray(all_t, dtype=int)]
        state.baseline = 0.9 * state.baseline + 0.1 * returns_by_t
    if cfg.normalize_advantages:
        all_adv = (all_adv - all_adv.mean()) / (all_adv.std() + 1e-8)

    coeffs = all_adv / len(trajs)
    grad = policy.logprob_grad(all_s, all_a, all_t, coeffs)
    policy.params = state.opt.step(policy.params, -grad)  # ascent

    stats = {
        "mean_return": float(np.mean(ep_returns)),
        "entropy": float(np.mean(ent_terms)),
    }
    return state, stats
