"""Scripted collection policies.

The maze policy walks the BFS distance field toward a target cell with a
proportional controller and additive Gaussian noise. It is intentionally
imperfect: with collection-level noise it reaches the goal often but not
always, which is the kind of mediocre behavior data the models are meant
to improve on.
"""

import numpy as np

from ..errors import InvalidArgumentError
from .point_maze import STEP_SCALE, Layout

ARRIVE_RADIUS = 0.4


class WaypointPolicy:
    """Steers toward `target` cell through the maze, one cell at a time.

    Two noise knobs: noise_sigma perturbs every action, chaos_prob
    replaces the action with a uniform draw outright. The second one is
    what actually makes the controller fallible; Gaussian noise alone is
    corrected away by re-aiming each step.
    """

    def __init__(self, layout, target, noise_sigma=0.0, chaos_prob=0.0):
        self.layout = layout
        self.target = tuple(target)
        self.noise_sigma = float(noise_sigma)
        self.chaos_prob = float(chaos_prob)
        self._dist = layout.distance_field(self.target)

    def done(self, pos):
        return bool(np.sum((pos - Layout.center(self.target)) ** 2) <= ARRIVE_RADIUS**2)

    def act(self, pos, rng):
        if self.chaos_prob > 0.0 and rng.random() < self.chaos_prob:
            return rng.uniform(-1.0, 1.0, size=2)
        cell = self.layout.cell_of(pos)
        if self._dist[cell] < 0:
            raise InvalidArgumentError(f"no path from cell {cell} to {self.target}")
        if self._dist[cell] == 0:
            aim = Layout.center(self.target)
        else:
            r, c = cell
            best = None
            for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                rr, cc = r + dr, c + dc
                if 0 <= rr < self.layout.height and 0 <= cc < self.layout.width:
                    d = self._dist[rr, cc]
                    if d >= 0 and (best is None or d < self._dist[best]):
                        best = (rr, cc)
            aim = Layout.center(best)
        a = (aim - pos) / STEP_SCALE
        if self.noise_sigma > 0.0:
            a = a + rng.normal(0.0, self.noise_sigma, size=2)
        return np.clip(a, -1.0, 1.0)


class UniformRandomPolicy:
    """Baseline: uniform actions over the box."""

    def __init__(self, spec):
        self.spec = spec

    def act(self, pos, rng):
        del pos
        return rng.uniform(self.spec.action_low, self.spec.action_high, size=self.spec.action_dim)


class ChainForwardPolicy:
    """Noisy right-stepper for the chain environment."""

    def __init__(self, flip_prob=0.0):
        self.flip_prob = float(flip_prob)

    def act(self, obs, rng):
        del obs
        a = 1.0
        if self.flip_prob > 0.0 and rng.random() < self.flip_prob:
            a = rng.uniform(-1.0, 1.0)
        return np.array([a])
