"""Adversarial maximum-entropy cost learning on state-action pairs.

The discriminator is structured: D(s,a) = sigma(-ct(s,a) - log pi(a|s)),
where ct is a learned scalar head absorbing the unknown log-partition
constant, and pi is the paired generator policy. Inverting the structured
form recovers ct exactly: ct = log(1-D) - log D - log pi. Training
alternates one discriminator classification step against the demo set
with one policy-gradient step on the reward -ct(s,a) - log pi(a|s).
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .envs import TabularMDP, rollout
from .exact import induced_distribution, total_variation
from .nets import Adam, ParamFunction
from .policies import (DENSITY_FLOOR, CategoricalPolicy, GaussianPolicy,
                       PolicyGradientConfig, PolicyGradientState,
                       policy_gradient_step)
from .seeding import derive

LOG_FLOOR = np.log(DENSITY_FLOOR)


class IrlDivergence(RuntimeError):
    pass


def _softplus(z):
    return np.logaddexp(0.0, z)


def _sigmoid(z):
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-z)), np.exp(z) / (1.0 + np.exp(z)))


class Discriminator:
    """Structured state-action discriminator paired with a policy."""

    def __init__(self, env, policy, hidden=(32, 32), activation="tanh", seed=0):
        self.env = env
        self.policy = policy
        if isinstance(env, TabularMDP):
            feat = env.n_states + env.n_actions
        else:
            feat = env.state_dim + env.action_dim
        self.cost_head = ParamFunction([feat, *hidden, 1], activation=activation, rng_seed=seed)

    def features(self, s, a):
        if isinstance(self.env, TabularMDP):
            f = np.zeros(self.env.n_states + self.env.n_actions)
            f[s] = 1.0
            f[self.env.n_states + a] = 1.0
            return f
        return np.concatenate([np.asarray(s, dtype=float).ravel(),
                               np.asarray(a, dtype=float).ravel()])

    def c_tilde(self, s, a):
        """Learned cost estimator (true cost plus the log-partition offset)."""
        return float(self.cost_head.forward(self.features(s, a))[0])

    def logit(self, s, a, t):
        logp = max(self.policy.log_prob(s, a, t), LOG_FLOOR)
        return -self.c_tilde(s, a) - logp

    def output(self, s, a, t):
        """D(s,a) = exp(-ct) / (exp(-ct) + pi(a|s)), in (0, 1)."""
        logp = self.policy.log_prob(s, a, t)
        if np.exp(logp) == 0.0:
            raise ValueError("pi(a|s) = 0: support violation")
        return float(_sigmoid(self.logit(s, a, t)))


def discriminator_output(c_tilde_value, g_value):
    """Structured form of D for scalar inputs (used by tests and extract_cost
    round trips): exp(-ct) / (exp(-ct) + G)."""
    if g_value <= 0:
        raise ValueError("G must be positive")
    z = -c_tilde_value - np.log(g_value)
    return float(_sigmoid(z))


EPS_NUM = 1e-12


def extract_cost(d_value, g_value):
    """Unbiased cost estimator from discriminator and generator outputs:
    ct = log(1 - D) - log D - log G."""
    if not (EPS_NUM <= d_value <= 1 - EPS_NUM):
        raise ValueError(f"D value {d_value} outside ({EPS_NUM}, {1 - EPS_NUM}); clamp upstream")
    if g_value <= 0:
        raise ValueError("G must be positive")
    return float(np.log1p(-d_value) - np.log(d_value) - np.log(g_value))


def discriminator_update(disc, demo_pairs, sample_pairs, opt):
    """One gradient step on L_D = E_demo[-log D] + E_sample[-log(1-D)].

    Pairs are StateActionPair instances (step_index used only to evaluate
    the paired policy's density). Returns the pre-update loss.
    """
    if not demo_pairs or not sample_pairs:
        raise ValueError("both batches must be non-empty")
    rows = demo_pairs + sample_pairs
    X = np.stack([disc.features(p.state, p.action) for p in rows])
    logp = np.array([max(disc.policy.log_prob(p.state, p.action, p.step_index), LOG_FLOOR)
                     for p in rows])
    ct, cache = disc.cost_head.forward_cached(X)
    z = -ct[:, 0] - logp
    n_d, n_s = len(demo_pairs), len(sample_pairs)
    d = _sigmoid(z)
    loss = float(_softplus(-z[:n_d]).mean() + _softplus(z[n_d:]).mean())
    if not np.isfinite(loss):
        bad = [i for i in range(len(rows)) if not np.isfinite(z[i])]
        raise FloatingPointError(f"non-finite discriminator loss; offending pair indices {bad}")
    # dL/dz then chain through z = -ct - logp
    dldz = np.concatenate([-(1.0 - d[:n_d]) / n_d, d[n_d:] / n_s])
    cot = (-dldz)[:, None]
    grad, _ = disc.cost_head.backward(cache, cot)
    disc.cost_head.params = opt.step(disc.cost_head.params, grad)
    return loss


@dataclass
class IrlFitConfig:
    batch_episodes: int = 32
    demo_pairs_per_step: int = 64
    policy_step_size: float = 2e-2
    disc_step_size: float = 1e-2
    entropy_weight: float = 0.0      # -log pi already enters through the reward
    hidden: tuple = (32, 32)
    eval_every: int = 50
    discount_for_credit: float = 1.0
    average_tail: float = 0.25       # fraction of final steps averaged into the result
    entropy_in_reward: bool = True   # include -log pi in the generator reward
    bc_warmstart_steps: int = 0      # demo-likelihood pretraining of the generator
    normalize_advantages: bool = False


@dataclass
class IrlFitReport:
    rows: list = field(default_factory=list)
    final_tv: float = float("nan")

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["step", "disc_loss", "policy_surrogate", "entropy",
                        "mean_cost_demo", "mean_cost_sample", "tv"])
            for r in self.rows:
                w.writerow([r["step"], repr(r["disc_loss"]), repr(r["policy_surrogate"]),
                            repr(r["entropy"]), repr(r["mean_cost_demo"]),
                            repr(r["mean_cost_sample"]),
                            "" if r["tv"] is None else repr(r["tv"])])


def make_policy(env, hidden=(32, 32), seed=0):
    if isinstance(env, TabularMDP):
        return CategoricalPolicy(env.n_states, env.n_actions, env.horizon,
                                 hidden=hidden, seed=seed)
    return GaussianPolicy(env.state_dim, env.action_dim, env.action_low, env.action_high,
                          hidden=hidden, seed=seed)


def fit_irl(demos, env, n_steps, cfg=None, seed=0, policy=None, disc=None, reference=None):
    """Inner adversarial loop: recover the demo trajectory distribution and
    a cost estimator simultaneously.

    ``reference`` (optional BoltzmannDistribution) enables exact TV
    tracking on tabular tasks. Pass ``policy``/``disc`` to inherit
    parameters from a previous fit.
    """
    if len(demos) == 0:
        raise ValueError("demos must be non-empty")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    cfg = cfg or IrlFitConfig()
    rng = derive(seed, "fit_irl")
    if policy is None:
        policy = make_policy(env, hidden=cfg.hidden, seed=int(rng.integers(2**31)))
    if disc is None:
        disc = Discriminator(env, policy, hidden=cfg.hidden, seed=int(rng.integers(2**31)))
    disc.policy = policy

    demo_pool = [p for traj in demos for p in traj.pairs]
    if cfg.bc_warmstart_steps > 0:
        # maximum-likelihood warm start so the adversarial pair opens near
        # the demo distribution instead of a random generator
        bc_opt = Adam(step_size=cfg.policy_step_size)
        for _ in range(cfg.bc_warmstart_steps):
            idx = rng.choice(len(demo_pool), size=min(cfg.demo_pairs_per_step, len(demo_pool)),
                             replace=len(demo_pool) < cfg.demo_pairs_per_step)
            batch = [demo_pool[i] for i in idx]
            grad = policy.logprob_grad([p.state for p in batch], [p.action for p in batch],
                                       [p.step_index for p in batch],
                                       np.full(len(batch), 1.0 / len(batch)))
            policy.params = bc_opt.step(policy.params, -grad)
    disc_opt = Adam(step_size=cfg.disc_step_size)
    pg_cfg = PolicyGradientConfig(batch_episodes=cfg.batch_episodes,
                                  entropy_weight=cfg.entropy_weight,
                                  discount_for_credit=cfg.discount_for_credit,
                                  step_size=cfg.policy_step_size,
                                  normalize_advantages=cfg.normalize_advantages)
    pg_state = PolicyGradientState(pg_cfg, env.horizon)

    def reward_fn(s, a, t, logp):
        # The -log pi term realizes the Boltzmann temperature exactly on
        # tabular tasks; on continuous tasks it couples the reward to the
        # density scale and destabilizes the pair, so it can be switched off.
        if cfg.entropy_in_reward:
            return -disc.c_tilde(s, a) - max(logp, LOG_FLOOR)
        return -disc.c_tilde(s, a)

    report = IrlFitReport()
    surrogate_window = []
    cooldown_at = max(1, int((1.0 - cfg.average_tail) * n_steps))
    avg_cost = avg_policy = None
    n_avg = 0
    for step in range(1, n_steps + 1):
        if step == cooldown_at:
            # settle the adversarial pair before the averaged tail
            pg_state.opt.step_size /= 4.0
            disc_opt.step_size /= 4.0
        trajs = [rollout(env, policy, rng) for _ in range(cfg.batch_episodes)]
        sample_pairs = [p for traj in trajs for p in traj.pairs]
        idx = rng.choice(len(demo_pool), size=min(cfg.demo_pairs_per_step, len(demo_pool)),
                         replace=len(demo_pool) < cfg.demo_pairs_per_step)
        demo_batch = [demo_pool[i] for i in idx]
        loss = discriminator_update(disc, demo_batch, sample_pairs, disc_opt)
        pg_state, stats = policy_gradient_step(policy, env, reward_fn, pg_cfg, rng,
                                               state=pg_state, trajs=trajs)
        if cfg.average_tail > 0 and step > cooldown_at:
            n_avg += 1
            if avg_cost is None:
                avg_cost = disc.cost_head.params.copy()
                avg_policy = policy.params.copy()
            else:
                avg_cost += (disc.cost_head.params - avg_cost) / n_avg
                avg_policy += (policy.params - avg_policy) / n_avg
        tv = None
        if reference is not None and isinstance(env, TabularMDP) and step % cfg.eval_every == 0:
            _, probs = induced_distribution(env, policy, support=reference.support)
            tv = total_variation(probs, reference.probabilities)
        mean_cd = float(np.mean([disc.c_tilde(p.state, p.action) for p in demo_batch]))
        mean_cs = float(np.mean([disc.c_tilde(p.state, p.action) for p in sample_pairs[:64]]))
        report.rows.append({"step": step, "disc_loss": loss,
                            "policy_surrogate": stats["mean_return"],
                            "entropy": stats["entropy"],
                            "mean_cost_demo": mean_cd, "mean_cost_sample": mean_cs,
                            "tv": tv})
        surrogate_window.append(stats["mean_return"])
        if len(surrogate_window) > 200:
            surrogate_window.pop(0)
            stalled = np.std(surrogate_window) < 1e-6
            if loss < 0.01 and stalled:
                raise IrlDivergence("discriminator overpowered: L_D < 0.01 with stalled policy")
    if avg_cost is not None:
        disc.cost_head.params = avg_cost
        policy.params = avg_policy
    if reference is not None and isinstance(env, TabularMDP):
        _, probs = induced_distribution(env, policy, support=reference.support)
        report.final_tv = total_variation(probs, reference.probabilities)
        if report.rows:
            report.rows[-1]["tv"] = report.final_tv
    return policy, disc, report
