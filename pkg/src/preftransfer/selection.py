"""Hidden-cost model and preference selection.

The oracle keeps each candidate trajectory with probability proportional
to exp(-C_h), where the hidden cost C_h is the gap between target cost
and a reference cost (the emulated negative utility). Selection respects
the half-drop constraint; a beta-fraction of dropped trajectories is put
back afterwards.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .envs import TrajectorySet, trajectory_cost
from .seeding import derive
from .serialize import trajectory_to_json


@dataclass
class HiddenCostModel:
    """C_h(tau) = C_target(tau) - C_reference(tau).

    fixed_gap uses the basic task cost as the reference (the emulated
    evaluation protocol); adaptive_gap points the reference at the
    current learned cost estimator.
    """

    target_cost: object            # (s, a) -> float
    reference_cost: object         # (s, a) -> float
    mode: str = "fixed_gap"        # or "adaptive_gap"


def hidden_cost(model, traj):
    return (trajectory_cost(traj, model.target_cost)
            - trajectory_cost(traj, model.reference_cost))


def acceptance_prob(model, candidates, normalization="set_normalized", M=None):
    """Per-candidate acceptance probabilities in [0, 1].

    set_normalized: weights exp(-C_h) scaled so the set maximum maps to
    acceptance 1 (self-normalized rejection over the finite set).
    ratio: min(1, exp(-C_h) / M), with M defaulting to max exp(-C_h).
    Overflow is guarded by shifting by the set minimum of C_h.
    """
    if len(candidates) == 0:
        raise ValueError("candidates must be non-empty")
    ch = np.array([hidden_cost(model, t) for t in candidates])
    if normalization == "set_normalized":
        return np.exp(-(ch - ch.min()))
    if normalization == "ratio":
        if M is not None and M <= 0:
            raise ValueError("M must be positive")
        log_m = -ch.min() if M is None else np.log(M)
        return np.exp(np.minimum(0.0, -ch - log_m))
    raise ValueError(f"unknown normalization {normalization!r}")


@dataclass
class PreferenceOutcome:
    kept: TrajectorySet
    dropped: TrajectorySet
    kept_indices: list
    dropped_indices: list
    acceptance_probs: np.ndarray
    query_count: int


def max_drops(n_candidates):
    return n_candidates // 2


def enforce_half_drop(accept_probs, keep_mask):
    """Restore over-dropped candidates, highest acceptance probability
    first (ties by candidate index), until at most half are dropped."""
    keep_mask = list(keep_mask)
    n = len(keep_mask)
    allowed = max_drops(n)
    dropped = [i for i in range(n) if not keep_mask[i]]
    if len(dropped) > allowed:
        dropped.sort(key=lambda i: (-accept_probs[i], i))
        for i in dropped[:len(dropped) - allowed]:
            keep_mask[i] = True
    return keep_mask


def _outcome_from_mask(candidates, keep_mask, probs, episode=None):
    kept_idx = [i for i, k in enumerate(keep_mask) if k]
    drop_idx = [i for i, k in enumerate(keep_mask) if not k]
    prov = f"selected({episode})" if episode is not None else "selected"
    return PreferenceOutcome(
        kept=TrajectorySet([candidates.trajectories[i] for i in kept_idx], provenance=prov),
        dropped=TrajectorySet([candidates.trajectories[i] for i in drop_idx], provenance=prov),
        kept_indices=kept_idx,
        dropped_indices=drop_idx,
        acceptance_probs=probs,
        query_count=len(candidates),
    )


@dataclass
class EmulatedOracle:
    """Seeded emulator: keeps each candidate with its acceptance probability,
    then enforces the half-drop constraint."""

    model: HiddenCostModel
    seed: int = 0
    normalization: str = "set_normalized"
    kind: str = "emulated"
    calls: int = field(default=0)

    def select(self, candidates, episode=None):
        probs = acceptance_prob(self.model, candidates, self.normalization)
        rng = derive(self.seed, "oracle", self.calls)
        self.calls += 1
        keep = rng.random(len(candidates)) < probs
        keep = enforce_half_drop(probs, keep)
        return _outcome_from_mask(candidates, keep, probs, episode)


class ConstraintViolation(ValueError):
    pass


def outcome_from_response(candidates, kept, dropped, episode=None):
    """Validate a human keep/drop response against the candidate set and
    the half-drop constraint."""
    n = len(candidates)
    kept, dropped = list(kept), list(dropped)
    seen = sorted(kept + dropped)
    if seen != list(range(n)):
        raise ConstraintViolation(
            f"kept/dropped must partition candidate indices 0..{n - 1}")
    if len(dropped) > max_drops(n):
        raise ConstraintViolation(
            f"dropped {len(dropped)} exceeds max_drops {max_drops(n)}")
    mask = [i in set(kept) for i in range(n)]
    return _outcome_from_mask(candidates, mask, np.full(n, np.nan), episode)


@dataclass
class HumanOracle:
    """Marker adapter: selections arrive asynchronously through the
    session API; the engine suspends at the query until a valid
    keep/drop mask is submitted."""

    kind: str = "human"
    timeout: float = None


def apply_putback(outcome, beta, seed):
    """B_i plus a uniform without-replacement sample of floor(beta * |dropped|)
    dropped trajectories."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    n_back = int(np.floor(beta * len(outcome.dropped)))
    rng = derive(seed, "putback")
    restored = []
    if n_back > 0:
        idx = rng.choice(len(outcome.dropped), size=n_back, replace=False)
        restored = [outcome.dropped.trajectories[i] for i in sorted(idx)]
    return TrajectorySet(outcome.kept.trajectories + restored,
                         provenance=outcome.kept.provenance)


def monotonicity_stat(model, before, after=None):
    """(E_before[-C_h], self-normalized post-selection estimate of E[-C_h]).

    The post-selection estimate reweights the same set by the normalized
    selection probabilities exp(-C_h)/Z.
    """
    if len(before) == 0:
        raise ValueError("empty trajectory set")
    ch = np.array([hidden_cost(model, t) for t in before])
    before_est = float(np.mean(-ch))
    w = np.exp(-(ch - ch.min()))
    after_est = float(np.sum(w * (-ch)) / np.sum(w))
    return before_est, after_est


def build_query_payload(session_id, episode, candidates, env_id):
    """JSON payload handed to the UI / human adapter."""
    return {
        "session": session_id,
        "episode": episode,
        "candidates": [json.loads(trajectory_to_json(t, env_id)) for t in candidates],
        "max_drops": max_drops(len(candidates)),
    }
