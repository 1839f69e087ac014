import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import preftransfer.irl as irl_mod
from preftransfer.envs import StateActionPair, TrajectorySet, rollout
from preftransfer.exact import boltzmann_distribution, soft_expert
from preftransfer.fixtures import bandit4
from preftransfer.irl import (Discriminator, IrlDivergence, IrlFitConfig,
                              discriminator_output, discriminator_update,
                              extract_cost, fit_irl)
from preftransfer.nets import Adam
from preftransfer.policies import CategoricalPolicy
from preftransfer.seeding import derive


# -- structured discriminator / extract_cost ------------------------------

def test_discriminator_output_examples():
    assert discriminator_output(0.0, 1.0) == pytest.approx(0.5)
    assert discriminator_output(50.0, 1.0) == pytest.approx(0.0, abs=1e-20)
    assert discriminator_output(-50.0, 1.0) == pytest.approx(1.0)


def test_extract_cost_examples():
    assert extract_cost(0.5, 1.0) == pytest.approx(0.0, abs=1e-15)
    # D = 0.5, G = 0.1 -> ct = -ln 0.1 = 2.302585...
    assert extract_cost(0.5, 0.1) == pytest.approx(2.302585092994046, abs=1e-12)


def test_extract_cost_rejects_degenerate_inputs():
    with pytest.raises(ValueError, match="clamp"):
        extract_cost(0.0, 1.0)
    with pytest.raises(ValueError, match="clamp"):
        extract_cost(1.0, 1.0)
    with pytest.raises(ValueError, match="positive"):
        extract_cost(0.5, 0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=-20, max_value=20),
       st.floats(min_value=1e-6, max_value=1e3))
def test_extract_cost_inverts_structured_output(ct, g):
    d = discriminator_output(ct, g)
    if not (1e-6 <= d <= 1 - 1e-6):
        return   # saturated sigmoid: 1 - D loses the digits the inverse needs
    assert extract_cost(d, g) == pytest.approx(ct, abs=1e-9, rel=1e-9)


def test_discriminator_output_support_violation():
    env = bandit4()
    pol = CategoricalPolicy(env.n_states, env.n_actions, env.horizon)

    class Degenerate:
        def log_prob(self, s, a, t):
            return -np.inf

    disc = Discriminator(env, Degenerate())
    with pytest.raises(ValueError, match="support"):
        disc.output(0, 1, 0)


# -- discriminator_update -------------------------------------------------

def uniform_policy(env):
    pol = CategoricalPolicy(env.n_states, env.n_actions, env.horizon, hidden=(8,))
    pol.head.params[:] = 0.0
    return pol


def test_update_rejects_empty_batches():
    env = bandit4()
    disc = Discriminator(env, uniform_policy(env))
    with pytest.raises(ValueError, match="non-empty"):
        discriminator_update(disc, [], [StateActionPair(0, 0, 0)], Adam())


def test_zero_step_size_leaves_params_unchanged():
    env = bandit4()
    disc = Discriminator(env, uniform_policy(env), seed=1)
    before = disc.cost_head.params.copy()
    batch = [StateActionPair(0, a, 0) for a in range(4)]
    discriminator_update(disc, batch, batch, Adam(step_size=0.0))
    assert np.array_equal(disc.cost_head.params, before)


def test_identical_batches_drive_d_to_half():
    # demos and samples drawn from the same distribution: the optimum is
    # D = 1/2 everywhere, L_D = 2 log 2
    env = bandit4()
    disc = Discriminator(env, uniform_policy(env), hidden=(8,), seed=2)
    batch = [StateActionPair(0, a, 0) for a in range(4)]
    opt = Adam(step_size=1e-2)
    loss = None
    for _ in range(800):
        loss = discriminator_update(disc, batch, list(batch), opt)
    assert loss == pytest.approx(2 * np.log(2), abs=0.05)
    for p in batch:
        assert abs(disc.output(p.state, p.action, p.step_index) - 0.5) <= 0.05


def test_separable_batches_reach_high_accuracy():
    env = bandit4()
    disc = Discriminator(env, uniform_policy(env), hidden=(8,), seed=3)
    demos = [StateActionPair(0, 0, 0)] * 4
    samples = [StateActionPair(0, 3, 0)] * 4
    opt = Adam(step_size=1e-2)
    for _ in range(2000):
        discriminator_update(disc, demos, samples, opt)
    assert disc.output(0, 0, 0) > 0.99
    assert disc.output(0, 3, 0) < 0.01


# -- fit_irl --------------------------------------------------------------

def test_fit_irl_validates_inputs():
    env = bandit4()
    demos = TrajectorySet([rollout(env, uniform_policy(env), seed=0)])
    with pytest.raises(ValueError, match="non-empty"):
        fit_irl(TrajectorySet([]), env, 10)
    with pytest.raises(ValueError, match="n_steps"):
        fit_irl(demos, env, 0)


def test_fit_irl_recovers_bandit_distribution():
    env = bandit4()
    expert = soft_expert(env, env.basic_cost)
    rng = derive(7, "demos")
    demos = TrajectorySet([rollout(env, expert, rng) for _ in range(3000)])
    ref = boltzmann_distribution(env, env.basic_cost)
    cfg = IrlFitConfig(batch_episodes=64, demo_pairs_per_step=256,
                       policy_step_size=1e-2, disc_step_size=3e-3,
                       eval_every=10 ** 9)
    policy, disc, report = fit_irl(demos, env, 2500, cfg, seed=0, reference=ref)
    assert report.final_tv <= 0.08

    # cost recovery up to an additive constant: pairwise differences of
    # the learned ct must match the generating cost
    ct = np.array([disc.c_tilde(0, a) for a in range(4)])
    true = np.array([env.basic_cost(0, a) for a in range(4)])
    diffs = (ct - ct.mean()) - (true - true.mean())
    assert np.abs(diffs).max() <= 0.15


def test_fit_irl_self_demos_reach_gan_fixed_point():
    # demos sampled from the generator's own distribution: the pair should
    # sit at the non-separable fixed point L_D ~ 2 log 2
    env = bandit4()
    rng = derive(9, "self")
    pol = uniform_policy(env)
    demos = TrajectorySet([rollout(env, pol, rng) for _ in range(2000)])
    cfg = IrlFitConfig(batch_episodes=64, demo_pairs_per_step=256,
                       policy_step_size=1e-2, disc_step_size=3e-3,
                       eval_every=10 ** 9)
    _, _, report = fit_irl(demos, env, 800, cfg, seed=1)
    tail = [r["disc_loss"] for r in report.rows[-100:]]
    assert np.mean(tail) == pytest.approx(2 * np.log(2), abs=0.15)


def test_fit_irl_report_csv(tmp_path):
    env = bandit4()
    demos = TrajectorySet([rollout(env, uniform_policy(env), seed=i) for i in range(50)])
    _, _, report = fit_irl(demos, env, 30, IrlFitConfig(batch_episodes=8), seed=0)
    path = tmp_path / "report.csv"
    report.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("step,disc_loss")
    assert len(lines) == 31


def test_divergence_detector_fires(monkeypatch):
    env = bandit4()
    demos = TrajectorySet([rollout(env, uniform_policy(env), seed=i) for i in range(10)])

    monkeypatch.setattr(irl_mod, "discriminator_update",
                        lambda disc, d, s, opt: 0.005)
    monkeypatch.setattr(irl_mod, "policy_gradient_step",
                        lambda *a, **k: (k.get("state"), {"mean_return": 1.0,
                                                         "entropy": 0.0}))
    with pytest.raises(IrlDivergence, match="overpowered"):
        fit_irl(demos, env, 300, IrlFitConfig(batch_episodes=2), seed=0)
