"""Seeded random inputs for property suites and the CLI checker.

Step functions use dyadic breakpoints (multiples of 1/8 in [-8, 8]) so
that reflections across the dyadic schedule stay exact in 64-bit floats
and the rearrangement's half-measure breakpoints are reachable within the
offset levels a 60-step schedule prefix exposes.
"""

from __future__ import annotations

import math
import random

from .grid2d import GridFunction, HyperplaneKind, LatticeHyperplane
from .halfspace import Halfspace
from .lattice import LatticeFunction
from .step1d import StepFunction

GRID_STEP = 1.0 / 8.0
SPAN = 8.0


def random_step_function(rng: random.Random, max_pieces: int = 20,
                         vmax: float = 10.0, zero_piece_prob: float = 0.2,
                         span: float = SPAN) -> StepFunction:
    """Up to max_pieces pieces on the dyadic 1/8 grid in [-span, span],
    values in (0, vmax] with occasional interior zero pieces.

    For convergence studies against the offset-bounded dyadic schedule keep
    span <= the offset bound: every needed two-point swap then has its
    reflection center inside the schedule, and with 1/8-grid breakpoints
    those centers appear within the first five dyadic levels."""
    cells = int(round(2 * span / GRID_STEP))
    k = rng.randint(1, min(max_pieces, cells - 1))
    idx = sorted(rng.sample(range(cells + 1), k + 1))
    breakpoints = [-span + i * GRID_STEP for i in idx]
    values = []
    for i in range(k):
        interior = 0 < i < k - 1
        if interior and rng.random() < zero_piece_prob:
            values.append(0.0)
        else:
            values.append(vmax * (1.0 - rng.random()))   # in (0, vmax]
    return StepFunction(breakpoints, values)


def random_halfspace_1d(rng: random.Random, max_offset: float = 1.0,
                        signed_offset: bool = False) -> Halfspace:
    sign = rng.choice((1.0, -1.0))
    d = rng.uniform(0.0, max_offset)
    if signed_offset:
        d = rng.uniform(-max_offset, max_offset)
    return Halfspace.line(sign, d)


def random_halfspace_2d(rng: random.Random, max_offset: float = 1.0,
                        signed_offset: bool = False) -> Halfspace:
    theta = rng.uniform(0.0, 2.0 * math.pi)
    d = rng.uniform(-max_offset, max_offset) if signed_offset else \
        rng.uniform(0.0, max_offset)
    return Halfspace.plane(theta, d)


def random_lattice_function(rng: random.Random, max_support: int = 50,
                            vmax: int = 9, site_range: int = 60) -> LatticeFunction:
    size = rng.randint(1, max_support)
    sites = rng.sample(range(-site_range, site_range + 1), size)
    return LatticeFunction((s, float(rng.randint(1, vmax))) for s in sites)


def random_grid_function(rng: random.Random, m: int = 6, h: float = 0.5,
                         fill: float = 0.3, vmax: float = 10.0) -> GridFunction:
    """Support confined to [-m/2 .. m/2]^2 so small reflections stay inside."""
    half = m // 2
    points = {}
    for i in range(-half, half + 1):
        for j in range(-half, half + 1):
            if rng.random() < fill:
                points[(i, j)] = vmax * (1.0 - rng.random())
    return GridFunction.from_points(m, h, points)


def random_lattice_hyperplane(rng: random.Random, m: int = 6,
                              require_origin: bool = False) -> LatticeHyperplane:
    """Offsets stay within +-m/4 so reflections of the confined supports of
    :func:`random_grid_function` never escape the array."""
    while True:
        kind = rng.choice(list(HyperplaneKind))
        bound = max(1, m // 4)
        if kind in (HyperplaneKind.X, HyperplaneKind.Y):
            s = rng.randint(-2 * bound, 2 * bound) / 2.0
        else:
            s = float(rng.randint(-bound, bound))
        hp = LatticeHyperplane(kind, s)
        if not require_origin or hp.contains_origin():
            return hp
