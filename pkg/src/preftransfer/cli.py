"""Command-line entry points.

    preftransfer transfer run CONFIG [--set PATH=VALUE ...]
    preftransfer irl fit --demos F --env E --steps N [--seed S] [--out DIR]
    preftransfer oracle enumerate --env E [--cost basic|target] [--out CSV]
    preftransfer eval policy --env E --checkpoint F [--episodes N] [--seed S]
    preftransfer serve CONFIG [--host H] [--port P]

Exit codes: 0 success, 1 engine/runtime failure, 2 invalid configuration
or input (with a field/line diagnostic on stderr).
"""

import argparse
import os
import sys

import numpy as np

from .config import ConfigError, load_run_config, parse_run_config
from .envs import TabularMDP, rollout, trajectory_cost
from .exact import boltzmann_distribution, export_distribution_csv
from .irl import IrlDivergence, fit_irl
from .seeding import derive
from .serialize import read_trajectories


def _load_config(path, set_overrides):
    cfg = load_run_config(path)
    if set_overrides:
        # --set a.b=c re-parses the effective dict with dotted overrides
        data = cfg.effective_dict()
        for item in set_overrides:
            if "=" not in item:
                raise ConfigError(f"--set {item!r}: expected PATH=VALUE")
            key, value = item.split("=", 1)
            parts = key.split(".")
            node = data
            for p in parts[:-1]:
                if p not in node or not isinstance(node[p], dict):
                    raise ConfigError(f"--set {key}: unknown section {p!r}")
                node = node[p]
            node[parts[-1]] = value
        cfg = parse_run_config(data)
    return cfg


def cmd_transfer_run(args):
    from .runner import run_to_artifacts
    cfg = _load_config(args.config, args.set)
    if cfg.oracle != "emulated":
        raise ConfigError("oracle: 'transfer run' drives emulated sessions; "
                          "use 'serve' for human sessions")
    engine = run_to_artifacts(cfg)
    last = engine.session.history[-1]
    print(f"stopped: {engine.session.status} after {engine.session.episode} episodes")
    print(f"final drop_fraction {last['drop_fraction']:.3f} "
          f"mean_target_cost {last['mean_target_cost']:.4f}")
    print(f"artifacts in {cfg.output_dir}")
    return 0


def _make_env(name):
    from .config import KNOWN_ENVS, RunConfig
    if name not in KNOWN_ENVS:
        raise ConfigError(f"env: unknown environment {name!r}; "
                          f"choose one of {sorted(KNOWN_ENVS)}")
    return RunConfig(env=name).make_env()


def cmd_irl_fit(args):
    env = _make_env(args.env)
    try:
        demos = read_trajectories(args.demos, env)
    except FileNotFoundError:
        raise ConfigError(f"demos: no such file {args.demos!r}")
    except ValueError as exc:
        raise ConfigError(f"demos: {exc}")
    if len(demos) == 0:
        raise ConfigError(f"demos: {args.demos} contains no trajectories")
    reference = None
    if args.reference_cost != "none":
        if not isinstance(env, TabularMDP):
            raise ConfigError("reference-cost: exact TV tracking needs a tabular env")
        cost = env.basic_cost if args.reference_cost == "basic" else env.target_cost
        reference = boltzmann_distribution(env, cost)
    from .experiments import continuous_irl_config, tabular_irl_config
    cfg = tabular_irl_config() if isinstance(env, TabularMDP) else continuous_irl_config()
    policy, disc, report = fit_irl(demos, env, args.steps, cfg, seed=args.seed,
                                   reference=reference)
    os.makedirs(args.out, exist_ok=True)
    report.to_csv(os.path.join(args.out, "fit_report.csv"))
    from .nets import save_checkpoint
    from .transfer import save_policy_checkpoint
    save_policy_checkpoint(os.path.join(args.out, "policy.ckpt"), policy)
    save_checkpoint(os.path.join(args.out, "disc.ckpt"), disc.cost_head)
    if reference is not None:
        print(f"final TV {report.final_tv:.6f}")
    print(f"artifacts in {args.out}")
    return 0


def cmd_oracle_enumerate(args):
    env = _make_env(args.env)
    if not isinstance(env, TabularMDP):
        raise ConfigError("env: exact enumeration needs a tabular environment")
    cost = env.basic_cost if args.cost == "basic" else env.target_cost
    dist = boltzmann_distribution(env, cost)
    if args.out:
        export_distribution_csv(args.out, dist, cost)
        print(f"{len(dist.support)} trajectories -> {args.out}")
    else:
        for i, traj in enumerate(dist.support):
            print(f"{i}\t{trajectory_cost(traj, cost):.6f}\t{dist.probabilities[i]:.10f}")
    return 0


def cmd_eval_policy(args):
    env = _make_env(args.env)
    from .transfer import load_policy_checkpoint
    try:
        policy = load_policy_checkpoint(args.checkpoint, env)
    except FileNotFoundError:
        raise ConfigError(f"checkpoint: no such file {args.checkpoint!r}")
    rng = derive(args.seed, "eval")
    costs = [trajectory_cost(rollout(env, policy, rng), env.target_cost)
             for _ in range(args.episodes)]
    print(f"episodes {args.episodes} mean_target_cost {np.mean(costs):.4f} "
          f"std {np.std(costs):.4f}")
    return 0


def cmd_serve(args):
    import uvicorn

    from .server import create_app
    cfg = _load_config(args.config, args.set)
    uvicorn.run(create_app(cfg), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="preftransfer")
    sub = parser.add_subparsers(dest="command", required=True)

    transfer = sub.add_parser("transfer").add_subparsers(dest="sub", required=True)
    run = transfer.add_parser("run", help="run an emulated transfer session")
    run.add_argument("config")
    run.add_argument("--set", action="append", default=[], metavar="PATH=VALUE")
    run.set_defaults(func=cmd_transfer_run)

    irl = sub.add_parser("irl").add_subparsers(dest="sub", required=True)
    fit = irl.add_parser("fit", help="fit the adversarial IRL on a demo file")
    fit.add_argument("--demos", required=True)
    fit.add_argument("--env", required=True)
    fit.add_argument("--steps", type=int, required=True)
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--out", default="runs/irl")
    fit.add_argument("--reference-cost", choices=["basic", "target", "none"],
                     default="none")
    fit.set_defaults(func=cmd_irl_fit)

    oracle = sub.add_parser("oracle").add_subparsers(dest="sub", required=True)
    enum = oracle.add_parser("enumerate", help="dump the exact Boltzmann table")
    enum.add_argument("--env", required=True)
    enum.add_argument("--cost", choices=["basic", "target"], default="basic")
    enum.add_argument("--out", default=None)
    enum.set_defaults(func=cmd_oracle_enumerate)

    ev = sub.add_parser("eval").add_subparsers(dest="sub", required=True)
    pol = ev.add_parser("policy", help="roll out a policy checkpoint")
    pol.add_argument("--env", required=True)
    pol.add_argument("--checkpoint", required=True)
    pol.add_argument("--episodes", type=int, default=50)
    pol.add_argument("--seed", type=int, default=99)
    pol.set_defaults(func=cmd_eval_policy)

    serve = sub.add_parser("serve", help="host the HTTP session API")
    serve.add_argument("config")
    serve.add_argument("--set", action="append", default=[], metavar="PATH=VALUE")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IrlDivergence as exc:
        print(f"engine error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
