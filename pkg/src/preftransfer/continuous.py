"""Desk-scale continuous environments for the two transfer studies.

TwoPeaks: a 1-D cart (position, velocity) between two hills at x = -1 and
x = +1. The basic task rewards proximity to either peak, the target task
rewards only the right peak.

PointReacher: a 2-D point mass with velocity actions and two fixed targets
at (+-0.5, 0). The basic task rewards proximity to either target, the
target task rewards proximity to the midpoint (the origin).

Both are deterministic given (s, a) apart from small Gaussian
action-execution noise (sigma = 2% of the action range) so trajectory
distributions keep overlapping support; states are clipped to bounds.

TwoPeaks update rule (the hand-simulation reference used by the tests):
    a_exec = clip(a + noise, -1, 1)
    v'     = clip(v + 0.02 * a_exec, -0.1, 0.1)
    x'     = clip(x + v', -1.2, 1.2)
PointReacher update rule:
    a_exec = clip(a + noise, -0.1, 0.1) per dimension
    s'     = clip(s + a_exec, -1, 1)
"""

from dataclasses import dataclass

import numpy as np

from .envs import EnvSpec


@dataclass
class TwoPeaks(EnvSpec):
    horizon: int = 100
    gamma: float = 0.99
    noise_sigma: float = 0.04      # 2% of action range [-1, 1]
    name: str = "two_peaks"

    state_dim = 2                  # (x, v)
    action_dim = 1
    action_kind = "continuous"
    action_low = -1.0
    action_high = 1.0
    x_bound = 1.2
    v_bound = 0.1
    accel = 0.02
    starts = (-0.15, 0.15)

    def sample_initial(self, rng):
        x0 = self.starts[int(rng.integers(len(self.starts)))]
        return np.array([x0, 0.0])

    def step(self, state, action, rng):
        a = float(np.asarray(action).ravel()[0])
        a_exec = np.clip(a + rng.normal(0.0, self.noise_sigma), self.action_low, self.action_high)
        v = np.clip(state[1] + self.accel * a_exec, -self.v_bound, self.v_bound)
        x = np.clip(state[0] + v, -self.x_bound, self.x_bound)
        return np.array([x, v])

    def action_valid(self, action):
        a = np.asarray(action, dtype=float).ravel()
        return a.shape == (1,) and np.isfinite(a).all() and self.action_low <= a[0] <= self.action_high

    def basic_cost(self, s, a):
        x = s[0]
        return 0.5 + 0.5 * min(abs(x + 1.0), abs(x - 1.0))

    def target_cost(self, s, a):
        return 0.5 + 0.5 * abs(s[0] - 1.0)


@dataclass
class PointReacher(EnvSpec):
    horizon: int = 50
    gamma: float = 0.99
    noise_sigma: float = 0.004     # 2% of action range [-0.1, 0.1]
    name: str = "point_reacher"

    state_dim = 2                  # (x, y)
    action_dim = 2
    action_kind = "continuous"
    action_low = -0.1
    action_high = 0.1
    bound = 1.0
    # targets sit close enough to the start band that basic and target
    # behavior modes overlap under proposal noise (the rejection step
    # needs overlapping trajectory supports)
    targets = ((-0.3, 0.0), (0.3, 0.0))
    starts = ((-0.1, 0.0), (0.1, 0.0))

    def sample_initial(self, rng):
        s0 = self.starts[int(rng.integers(len(self.starts)))]
        return np.array(s0, dtype=float)

    def step(self, state, action, rng):
        a = np.asarray(action, dtype=float).ravel()
        a_exec = np.clip(a + rng.normal(0.0, self.noise_sigma, size=2), self.action_low, self.action_high)
        return np.clip(state + a_exec, -self.bound, self.bound)

    def action_valid(self, action):
        a = np.asarray(action, dtype=float).ravel()
        return (a.shape == (2,) and np.isfinite(a).all()
                and (a >= self.action_low).all() and (a <= self.action_high).all())

    def basic_cost(self, s, a):
        d = min(np.hypot(s[0] - tx, s[1] - ty) for tx, ty in self.targets)
        return 0.5 + d

    def target_cost(self, s, a):
        return 0.5 + float(np.hypot(s[0], s[1]))
