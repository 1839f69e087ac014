"""Outer transfer loop: alternate preference selection with IRL refitting.

Each episode fits the adversarial IRL on the retained set, generates a
candidate batch with the learned policy, queries the oracle, applies the
beta put-back and checks the stop rule (drop fraction below epsilon, or
the episode cap). An exact trajectory-distribution iteration over
enumerated supports mirrors the loop for convergence tests.
"""

import csv
import json
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .envs import TabularMDP, TrajectorySet, rollout, trajectory_cost
from .irl import Discriminator, IrlDivergence, IrlFitConfig, fit_irl, make_policy
from .nets import load_checkpoint, save_checkpoint
from .policies import LOG_STD_MAX, LOG_STD_MIN
from .selection import (EmulatedOracle, HiddenCostModel, apply_putback,
                        build_query_payload, outcome_from_response)
from .seeding import derive, derive_seed
from .serialize import read_trajectories, write_trajectories


@dataclass
class TransferConfig:
    epsilon: float = 0.1
    max_episodes: int = 10
    beta: float = 0.1
    inner_steps: int = 500
    candidates_per_episode: int = 100
    inherit_params: bool = True
    # candidate batches may be sampled with inflated action noise: the
    # rejection step only needs the proposal to cover the target support,
    # and the oracle reweights whatever is proposed
    candidate_std_scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.candidates_per_episode < 2:
            raise ValueError("candidates_per_episode must be >= 2")
        if self.max_episodes < 1:
            raise ValueError("max_episodes must be >= 1")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")


def check_stop(drop_fraction, episode, cfg):
    """Stop rule: drop fraction below epsilon, or episode cap reached."""
    if drop_fraction < cfg.epsilon:
        return "epsilon"
    if episode >= cfg.max_episodes:
        return "max_episodes"
    return None


@dataclass
class TransferSession:
    episode: int = 0
    status: str = "running"     # running | awaiting_preference | stopped(<reason>)
    history: list = field(default_factory=list)
    selections: list = field(default_factory=list)   # per-episode kept/dropped indices

    def metrics_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["episode", "drop_fraction", "mean_target_cost", "query_count"])
            for r in self.history:
                w.writerow([r["episode"], repr(r["drop_fraction"]),
                            repr(r["mean_target_cost"]), r["query_count"]])


class TransferEngine:
    """Single-session state machine for Algorithm-style transfer.

    Emulated oracles drive the loop synchronously via ``run``; human
    sessions alternate ``advance`` (fit + generate, then suspend at the
    query) with ``submit_selection``.
    """

    def __init__(self, env, b0, oracle, cfg, master_seed, irl_cfg=None, reference=None,
                 session_id="session"):
        if len(b0) == 0:
            raise ValueError("B_0 must be non-empty")
        self.env = env
        self.oracle = oracle
        self.cfg = cfg
        self.irl_cfg = irl_cfg or IrlFitConfig()
        self.master_seed = int(master_seed)
        self.reference = reference
        self.session_id = session_id
        self.demos = b0
        self.policy = None
        self.disc = None
        self.candidates = None
        self.session = TransferSession()
        self.fit_reports = []

    # -- loop pieces ------------------------------------------------------

    def advance(self):
        """Fit IRL on the retained set and generate the next candidate batch;
        leaves the session awaiting a preference response."""
        if self.session.status != "running":
            raise RuntimeError(f"cannot advance from status {self.session.status}")
        self.session.episode += 1
        i = self.session.episode
        inherit = self.cfg.inherit_params and self.policy is not None
        policy, disc = (self.policy, self.disc) if inherit else (None, None)
        try:
            self.policy, self.disc, report = fit_irl(
                self.demos, self.env, self.cfg.inner_steps, self.irl_cfg,
                seed=derive_seed(self.master_seed, "episode", i, "fit"),
                policy=policy, disc=disc, reference=self.reference)
        except IrlDivergence:
            # one retry at halved step sizes before surfacing
            retry_cfg = replace(self.irl_cfg,
                                policy_step_size=self.irl_cfg.policy_step_size / 2,
                                disc_step_size=self.irl_cfg.disc_step_size / 2)
            self.policy, self.disc, report = fit_irl(
                self.demos, self.env, self.cfg.inner_steps, retry_cfg,
                seed=derive_seed(self.master_seed, "episode", i, "fit-retry"),
                policy=policy, disc=disc, reference=self.reference)
        self.fit_reports.append(report)
        rng = derive(self.master_seed, "episode", i, "candidates")
        proposal = self._proposal_policy()
        self.candidates = TrajectorySet(
            [rollout(self.env, proposal, rng) for _ in range(self.cfg.candidates_per_episode)],
            provenance=f"generated({i})")
        self.session.status = "awaiting_preference"

    def _proposal_policy(self):
        scale = self.cfg.candidate_std_scale
        if scale == 1.0 or getattr(self.policy, "kind", None) != "gaussian":
            return self.policy
        policy, log_std = self.policy, self.policy.log_std + np.log(scale)

        def act(s, t, rng):
            std = np.exp(np.clip(log_std, LOG_STD_MIN, LOG_STD_MAX))
            a = policy._mean(s) + std * rng.standard_normal(policy.action_dim)
            return np.clip(a, policy.low, policy.high)

        return act

    def pending_query(self):
        if self.session.status != "awaiting_preference":
            return None
        return build_query_payload(self.session_id, self.session.episode,
                                   self.candidates, self.env.name)

    def _apply_outcome(self, outcome):
        i = self.session.episode
        drop_fraction = len(outcome.dropped) / len(self.candidates)
        mean_ct = float(np.mean([trajectory_cost(t, self.env.target_cost)
                                 for t in self.candidates]))
        self.session.history.append({
            "episode": i,
            "drop_fraction": drop_fraction,
            "mean_target_cost": mean_ct,
            "query_count": outcome.query_count,
        })
        self.session.selections.append({
            "episode": i, "kept": outcome.kept_indices, "dropped": outcome.dropped_indices,
        })
        self.demos = apply_putback(outcome, self.cfg.beta,
                                   derive_seed(self.master_seed, "episode", i, "putback"))
        self.candidates = None
        reason = check_stop(drop_fraction, i, self.cfg)
        self.session.status = f"stopped({reason})" if reason else "running"
        return reason

    def submit_selection(self, kept, dropped):
        """Apply a human keep/drop response; raises ConstraintViolation on a
        bad mask, leaving the query pending."""
        if self.session.status != "awaiting_preference":
            raise RuntimeError("no pending preference query")
        outcome = outcome_from_response(self.candidates, kept, dropped,
                                        episode=self.session.episode)
        return self._apply_outcome(outcome)

    def step_episode(self):
        """One full emulated episode; returns the stop reason or None."""
        self.advance()
        outcome = self.oracle.select(self.candidates, episode=self.session.episode)
        return self._apply_outcome(outcome)

    def run(self):
        if getattr(self.oracle, "kind", None) != "emulated":
            raise RuntimeError("run() drives emulated sessions only; use advance/submit_selection")
        while self.session.status == "running":
            self.step_episode()
        return self.policy, (self.disc.c_tilde if self.disc else None), self.session

    # -- persistence ------------------------------------------------------

    def save(self, outdir):
        os.makedirs(outdir, exist_ok=True)
        state = {
            "session_id": self.session_id,
            "master_seed": self.master_seed,
            "episode": self.session.episode,
            "status": self.session.status,
            "history": self.session.history,
            "selections": self.session.selections,
            "env": self.env.name,
            "oracle": _oracle_state(self.oracle),
            "transfer_config": vars(self.cfg).copy(),
            "irl_config": {k: (list(v) if isinstance(v, tuple) else v)
                           for k, v in vars(self.irl_cfg).items()},
        }
        with open(os.path.join(outdir, "state.json"), "w") as f:
            json.dump(state, f, indent=2)
        write_trajectories(os.path.join(outdir, "demos.jsonl"), self.demos, self.env.name)
        if self.candidates is not None:
            write_trajectories(os.path.join(outdir, "candidates.jsonl"),
                               self.candidates, self.env.name)
        if self.policy is not None:
            save_checkpoint(os.path.join(outdir, "policy.ckpt"), self.policy.head,
                            extra_header=_policy_header(self.policy))
        if self.disc is not None:
            save_checkpoint(os.path.join(outdir, "disc.ckpt"), self.disc.cost_head)
        self.session.metrics_csv(os.path.join(outdir, "metrics.csv"))

    @classmethod
    def load(cls, outdir, env, oracle=None, irl_cfg=None, reference=None):
        with open(os.path.join(outdir, "state.json")) as f:
            state = json.load(f)
        cfg = TransferConfig(**state["transfer_config"])
        if irl_cfg is None:
            d = dict(state["irl_config"])
            d["hidden"] = tuple(d["hidden"])
            irl_cfg = IrlFitConfig(**d)
        if oracle is None:
            oracle = _oracle_from_state(state["oracle"], env)
        demos = read_trajectories(os.path.join(outdir, "demos.jsonl"), env)
        eng = cls(env, demos, oracle, cfg, state["master_seed"], irl_cfg=irl_cfg,
                  reference=reference, session_id=state["session_id"])
        eng.session.episode = state["episode"]
        eng.session.status = state["status"]
        eng.session.history = state["history"]
        eng.session.selections = state["selections"]
        cand_path = os.path.join(outdir, "candidates.jsonl")
        if os.path.exists(cand_path) and eng.session.status == "awaiting_preference":
            eng.candidates = read_trajectories(cand_path, env, provenance=f"generated({eng.session.episode})")
        pol_path = os.path.join(outdir, "policy.ckpt")
        if os.path.exists(pol_path):
            eng.policy = load_policy_checkpoint(pol_path, env)
            disc_head, _ = load_checkpoint(os.path.join(outdir, "disc.ckpt"))
            eng.disc = Discriminator(env, eng.policy,
                                     hidden=tuple(disc_head.layer_sizes[1:-1]),
                                     seed=disc_head.rng_seed)
            eng.disc.cost_head = disc_head
        return eng


def _policy_header(policy):
    h = {"policy_kind": policy.kind}
    if policy.kind == "gaussian":
        h["log_std"] = policy.log_std.tolist()
    return h


def save_policy_checkpoint(path, policy):
    save_checkpoint(path, policy.head, extra_header=_policy_header(policy))


def load_policy_checkpoint(path, env):
    head, header = load_checkpoint(path)
    hidden = tuple(head.layer_sizes[1:-1])
    policy = make_policy(env, hidden=hidden, seed=head.rng_seed)
    policy.head = head
    if header.get("policy_kind") == "gaussian":
        policy.log_std = np.asarray(header["log_std"], dtype=float)
    return policy


def _oracle_state(oracle):
    if getattr(oracle, "kind", None) == "emulated":
        return {"kind": "emulated", "seed": oracle.seed,
                "normalization": oracle.normalization,
                "mode": oracle.model.mode, "calls": oracle.calls}
    return {"kind": "human"}


def _oracle_from_state(state, env):
    if state["kind"] == "human":
        from .selection import HumanOracle
        return HumanOracle()
    model = HiddenCostModel(target_cost=env.target_cost, reference_cost=env.basic_cost,
                            mode=state["mode"])
    oracle = EmulatedOracle(model=model, seed=state["seed"],
                            normalization=state["normalization"])
    oracle.calls = state["calls"]
    return oracle


def run_transfer(env, b0, oracle, cfg, master_seed=0, irl_cfg=None, reference=None):
    """Convenience wrapper: run an emulated transfer session to completion.

    Returns (policy, cost_estimator, TransferSession).
    """
    eng = TransferEngine(env, b0, oracle, cfg, master_seed, irl_cfg=irl_cfg,
                         reference=reference)
    return eng.run()


def trajectory_distribution_iterate(p, ch=None, mode="set_normalized",
                                    target_log_weights=None):
    """One exact step of the trajectory-distribution iteration.

    set_normalized: p' proportional to p * exp(-C_h) (requires ``ch``).
    ratio: rejection-corrected p' proportional to p * min(1, p_tar / (M' p)),
    with M' = max(p_tar / p) over the support (requires
    ``target_log_weights``, unnormalized log target masses).
    """
    p = np.asarray(p, dtype=float)
    if mode == "set_normalized":
        if ch is None:
            raise ValueError("set_normalized mode requires per-trajectory hidden costs")
        ch = np.asarray(ch, dtype=float)
        w = p * np.exp(-(ch - ch.min()))
    elif mode == "ratio":
        if target_log_weights is None:
            raise ValueError("ratio mode requires target log-weights")
        lw = np.asarray(target_log_weights, dtype=float)
        p_tar = np.exp(lw - lw.max())
        p_tar = p_tar / p_tar.sum()
        with np.errstate(divide="ignore"):
            ratio = np.where(p > 0, p_tar / np.where(p > 0, p, 1.0), np.inf)
        m = ratio[p > 0].max()
        w = np.where(p > 0, p * np.minimum(1.0, p_tar / (m * np.where(p > 0, p, 1.0))), 0.0)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    total = w.sum()
    if total <= 0:
        raise ValueError("iteration produced all-zero mass")
    return w / total
