"""Canonical experiment setups shared by the scripts and the acceptance suite.

Everything here is deterministic given the seeds in the call signature:
demo generation, baselines, and transfer runs all derive their generators
from the seeds below, so any reported number can be reproduced from the
function call alone.
"""

import numpy as np

from . import fixtures
from .continuous import PointReacher, TwoPeaks
from .envs import TrajectorySet, rollout, trajectory_cost
from .exact import boltzmann_distribution, soft_expert
from .irl import IrlFitConfig, make_policy
from .policies import PolicyGradientConfig, policy_gradient_step
from .seeding import derive
from .selection import EmulatedOracle, HiddenCostModel
from .transfer import TransferConfig, TransferEngine


def tabular_irl_config():
    """Settings for the distribution-recovery fits on tabular fixtures."""
    return IrlFitConfig(batch_episodes=64, demo_pairs_per_step=256,
                        policy_step_size=1e-2, disc_step_size=3e-3,
                        eval_every=400)


def continuous_irl_config():
    """Settings for the continuous-control fits inside transfer runs."""
    return IrlFitConfig(batch_episodes=16, demo_pairs_per_step=256,
                        policy_step_size=1e-2, disc_step_size=3e-3,
                        eval_every=10 ** 9, normalize_advantages=True,
                        discount_for_credit=0.99)


# fixture name -> (cost attribute, demo count, fit steps)
RECOVERY_SETUPS = {
    "bandit4": ("basic_cost", 10_000, 2000),
    "chain2": ("basic_cost", 20_000, 1600),
    "twogoal": ("target_cost", 10_000, 2400),
}


def recovery_demos(name, seed=7):
    """Soft-expert demonstrations for a recovery fixture, plus its exact
    Boltzmann reference."""
    env = fixtures.get_fixture(name)
    cost_attr, n_demos, _ = RECOVERY_SETUPS[name]
    cost = getattr(env, cost_attr)
    reference = boltzmann_distribution(env, cost)
    expert = soft_expert(env, cost)
    rng = derive(seed, "demos", name)
    demos = TrajectorySet([rollout(env, expert, rng) for _ in range(n_demos)])
    return env, cost, demos, reference


def train_direct(env, cost, n_steps=200, seed=1, entropy_weight=0.01,
                 step_size=3e-2, batch_episodes=16):
    """Policy-gradient training directly against a known cost (the
    engine-expert baseline for continuous tasks)."""
    policy = make_policy(env, hidden=(32, 32), seed=seed)
    cfg = PolicyGradientConfig(batch_episodes=batch_episodes,
                               entropy_weight=entropy_weight,
                               step_size=step_size, discount_for_credit=1.0)
    rng = derive(seed, "train")
    state = None

    def reward_fn(s, a, t, logp):
        return -cost(s, a)

    for _ in range(n_steps):
        state, _ = policy_gradient_step(policy, env, reward_fn, cfg, rng, state=state)
    return policy


def mean_target_cost(env, policy, n_episodes=50, seed=99):
    rng = derive(seed, "eval")
    return float(np.mean([trajectory_cost(rollout(env, policy, rng), env.target_cost)
                          for _ in range(n_episodes)]))


def _transfer(env, b0, transfer_cfg, irl_cfg, master_seed, oracle_seed,
              reference=None, outdir=None):
    model = HiddenCostModel(target_cost=env.target_cost,
                            reference_cost=env.basic_cost)
    oracle = EmulatedOracle(model=model, seed=oracle_seed)
    engine = TransferEngine(env, b0, oracle, transfer_cfg, master_seed,
                            irl_cfg=irl_cfg, reference=reference)
    policy, cost_fn, session = engine.run()
    if outdir is not None:
        engine.save(outdir)
    return policy, cost_fn, session


def twogoal_transfer(master_seed=11, oracle_seed=5, outdir=None):
    """Emulated transfer on the tabular two-goal fixture.

    Returns a dict with the session, the final policy, and the exact
    target-Boltzmann baseline mean cost.
    """
    env = fixtures.twogoal()
    reference = boltzmann_distribution(env, env.target_cost)
    expert = soft_expert(env, env.basic_cost)
    rng = derive(3, "b0")
    b0 = TrajectorySet([rollout(env, expert, rng) for _ in range(2000)])
    cfg = TransferConfig(epsilon=0.1, max_episodes=10, beta=0.1,
                         inner_steps=600, candidates_per_episode=100)
    policy, cost_fn, session = _transfer(
        env, b0, cfg, tabular_irl_config(), master_seed, oracle_seed,
        reference=reference, outdir=outdir)
    baseline = float(np.sum(reference.probabilities *
                            np.array([trajectory_cost(t, env.target_cost)
                                      for t in reference.support])))
    return {"env": env, "policy": policy, "cost": cost_fn, "session": session,
            "reference": reference, "baseline_mean_target_cost": baseline}


def _continuous_transfer(env, inner_steps, master_seed, oracle_seed, outdir=None,
                         max_episodes=10):
    baseline_policy = train_direct(env, env.target_cost, seed=1)
    basic_policy = train_direct(env, env.basic_cost, seed=2)
    rng = derive(2, "b0")
    b0 = TrajectorySet([rollout(env, basic_policy, rng) for _ in range(100)])
    cfg = TransferConfig(epsilon=0.1, max_episodes=max_episodes, beta=0.1,
                         inner_steps=inner_steps, candidates_per_episode=100)
    policy, cost_fn, session = _transfer(
        env, b0, cfg, continuous_irl_config(), master_seed, oracle_seed,
        outdir=outdir)
    return {"env": env, "policy": policy, "cost": cost_fn, "session": session,
            "baseline_mean_target_cost": mean_target_cost(env, baseline_policy),
            "final_mean_target_cost": mean_target_cost(env, policy)}


def two_peaks_transfer(master_seed=11, oracle_seed=5, outdir=None, inner_steps=300,
                       max_episodes=10):
    return _continuous_transfer(TwoPeaks(), inner_steps, master_seed, oracle_seed,
                                outdir=outdir, max_episodes=max_episodes)


def point_reacher_transfer(master_seed=11, oracle_seed=5, outdir=None,
                           inner_steps=600, max_episodes=10):
    return _continuous_transfer(PointReacher(), inner_steps, master_seed,
                                oracle_seed, outdir=outdir,
                                max_episodes=max_episodes)
