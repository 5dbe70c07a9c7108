"""Synchronous discrete-time threshold contact process on a fixed graph.

At each step every vertex with at least ``theta`` occupied neighbours is
occupied next step with probability ``p``, independently; every other vertex
becomes vacant. A vertex's own state plays no role.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._rng import as_rng, make_rng
from .isoperimetry import star_sets


@dataclass(frozen=True)
class ProcessParams:
    p: float
    theta: int = 2
    seed: int = 0
    t_max: int = 5000
    stop_below: float | None = None
    # when False the run records first_below but keeps going
    halt_below: bool = True

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.theta < 1:
            raise ValueError(f"theta must be a positive integer, got {self.theta}")
        if self.t_max < 0:
            raise ValueError("t_max must be nonnegative")
        if self.stop_below is not None and not 0.0 <= self.stop_below <= 1.0:
            raise ValueError("stop_below must lie in [0, 1]")

    def check_graph(self, g):
        if self.theta > g.r:
            raise ValueError(f"theta={self.theta} exceeds degree r={g.r}")


@dataclass(frozen=True)
class OccupancyState:
    bits: np.ndarray
    count: int = field(default=-1)

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        object.__setattr__(self, "bits", bits)
        c = int(np.count_nonzero(bits))
        if self.count not in (-1, c):
            raise ValueError(f"cached count {self.count} != {c} set entries")
        object.__setattr__(self, "count", c)

    @property
    def n(self):
        return self.bits.size

    @property
    def density(self):
        return self.count / self.n if self.n else 0.0

    def vertices(self):
        return np.flatnonzero(self.bits)

    @classmethod
    def full(cls, n):
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def empty(cls, n):
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def from_vertices(cls, n, vertices):
        bits = np.zeros(n, dtype=bool)
        bits[np.asarray(list(vertices), dtype=np.int64)] = True
        return cls(bits)

    @classmethod
    def random(cls, n, density, rng=None):
        """Each vertex occupied independently with probability ``density``."""
        rng = as_rng(rng)
        return cls(rng.random(n) < density)


@dataclass
class TrajectoryRecord:
    densities: np.ndarray
    extinction_time: int | None
    first_below: int | None
    steps_run: int
    reached_t_max: bool = False

    @property
    def extinct(self):
        return self.extinction_time is not None

    @property
    def final_density(self):
        return float(self.densities[-1])


def _occupied_neighbors(g, bits):
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    return bits[g.adj].sum(axis=1)


def step(g, state, params, rng):
    """One synchronous update.

    One uniform is drawn per vertex per step, in vertex order, whether or not
    the vertex is eligible; vertex ``x`` is occupied iff it is eligible and its
    uniform is below ``p``. Sharing the stream across values of ``p`` therefore
    couples runs monotonically.
    """
    if state.n != g.n:
        raise ValueError(f"state has length {state.n}, graph has n={g.n}")
    eligible = _occupied_neighbors(g, state.bits) >= params.theta
    u = rng.random(g.n)
    return OccupancyState(eligible & (u < params.p))


def expected_next_count(g, state, p, theta=2):
    """``p * |xi*theta|``: conditional mean of the next occupied count."""
    if theta == 2:
        _, star2 = star_sets(g, state.vertices())
        return p * star2.size
    return p * int(np.count_nonzero(_occupied_neighbors(g, state.bits) >= theta))


def run(g, initial, params, rng=None):
    """Iterate ``step`` until extinction, a drop below ``stop_below``, or ``t_max``.

    With ``rng=None`` the stream is derived from ``params.seed``.
    """
    params.check_graph(g)
    if initial.n != g.n:
        raise ValueError(f"initial state has length {initial.n}, graph has n={g.n}")
    rng = make_rng(params.seed) if rng is None else as_rng(rng)
    n = g.n
    adj = g.adj
    theta, p = params.theta, params.p
    counts = [initial.count]
    extinct_at = first_below = None
    threshold = None if params.stop_below is None else params.stop_below * n

    bits = initial.bits
    if initial.count == 0:
        extinct_at = 0
    elif threshold is not None and initial.count < threshold:
        first_below = 0
    t = 0
    halted = extinct_at is not None or (first_below is not None and params.halt_below)
    while not halted and t < params.t_max:
        bits = (bits[adj].sum(axis=1) >= theta) & (rng.random(n) < p)
        t += 1
        c = int(np.count_nonzero(bits))
        counts.append(c)
        if c == 0:
            extinct_at = t
            break
        if threshold is not None and first_below is None and c < threshold:
            first_below = t
            if params.halt_below:
                break

    dens = np.asarray(counts, dtype=float) / n if n else np.zeros(len(counts))
    return TrajectoryRecord(
        densities=dens,
        extinction_time=extinct_at,
        first_below=first_below,
        steps_run=t,
        reached_t_max=(t == params.t_max and extinct_at is None),
    )


class Plateau(NamedTuple):
    value: float
    extinct: bool


def plateau_density(record, burn_in=0.5):
    """Mean density over the trajectory after discarding a ``burn_in`` fraction."""
    if not 0.0 <= burn_in < 1.0:
        raise ValueError("burn_in must lie in [0, 1)")
    if record.extinct:
        return Plateau(0.0, True)
    d = record.densities
    start = int(math.ceil(burn_in * (d.size - 1)))
    return Plateau(float(d[start:].mean()), False)


def longest_run_in(densities, lo, hi):
    """Longest stretch of consecutive steps with ``lo < density < hi``."""
    inside = (densities > lo) & (densities < hi)
    best = cur = 0
    for flag in inside.tolist():
        cur = cur + 1 if flag else 0
        best = max(best, cur)
    return best
