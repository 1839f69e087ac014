"""Glue from a RunConfig to a live TransferEngine.

Shared by the CLI and the HTTP service so both paths build byte-identical
sessions from the same config.
"""

import os

from .envs import TabularMDP, TrajectorySet, rollout
from .exact import boltzmann_distribution, soft_expert
from .experiments import train_direct
from .seeding import derive, derive_seed
from .selection import EmulatedOracle, HiddenCostModel, HumanOracle
from .serialize import read_trajectories
from .transfer import TransferEngine

B0_TABULAR_EPISODES = 2000
B0_CONTINUOUS_EPISODES = 100


def initial_demos(cfg, env):
    """B_0 for a run: the configured demo file, or basic-task behavior
    generated from the master seed."""
    if cfg.demos is not None:
        return read_trajectories(cfg.demos, env)
    rng = derive(cfg.master_seed, "b0")
    if isinstance(env, TabularMDP):
        expert = soft_expert(env, env.basic_cost)
        n = B0_TABULAR_EPISODES
    else:
        expert = train_direct(env, env.basic_cost,
                              seed=derive_seed(cfg.master_seed, "b0-train"))
        n = B0_CONTINUOUS_EPISODES
    return TrajectorySet([rollout(env, expert, rng) for _ in range(n)])


def build_oracle(cfg, env):
    if cfg.oracle == "human":
        return HumanOracle()
    model = HiddenCostModel(target_cost=env.target_cost,
                            reference_cost=env.basic_cost)
    return EmulatedOracle(model=model, seed=cfg.oracle_seed)


def build_engine(cfg, session_id="session", reference=None):
    env = cfg.make_env()
    if reference is None and isinstance(env, TabularMDP):
        reference = boltzmann_distribution(env, env.target_cost)
    b0 = initial_demos(cfg, env)
    oracle = build_oracle(cfg, env)
    return TransferEngine(env, b0, oracle, cfg.transfer, cfg.master_seed,
                          irl_cfg=cfg.irl, reference=reference,
                          session_id=session_id)


def run_to_artifacts(cfg):
    """Run an emulated session to completion and write artifacts into
    cfg.output_dir. Returns the engine."""
    from .config import write_effective_config
    engine = build_engine(cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    write_effective_config(cfg, os.path.join(cfg.output_dir, "config.json"))
    engine.run()
    engine.save(cfg.output_dir)
    return engine
