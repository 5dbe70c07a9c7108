"""Subset statistics of a regular graph.

For ``U`` a vertex subset:

* ``U*1`` - vertices with at least one neighbour in ``U``
* ``U*2`` - vertices with at least two distinct neighbours in ``U``
  (when ``U`` is the occupied set, the only vertices that can be occupied next)
* ``dU`` - vertices outside ``U`` adjacent to ``U``
* ``e(U, U^c)`` - edges leaving ``U``
* ``U0`` / ``U1`` - vertices of ``U`` with no / some neighbour in ``U``

For a vacant set ``W``, ``W0`` (in ``W``) and ``W1`` (outside ``W``) are the
vertices with at least ``r-1`` neighbours in ``W``; together they are exactly
the vertices that stay vacant for sure when ``W^c`` is occupied.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ._rng import as_rng


@dataclass(frozen=True)
class SubsetStats:
    m: int
    star1: int
    star2: int
    boundary: int
    cross_edges: int
    u0: int
    u1: int


@dataclass(frozen=True)
class VacancyStats:
    m: int
    w0: int
    w1: int
    beta0: float
    beta1: float
    blocked: int
    degenerate: bool = False


def as_vertex_array(g, U):
    """Sorted unique int64 index array from indices or a boolean mask."""
    U = np.asarray(U)
    if U.dtype == bool:
        if U.shape != (g.n,):
            raise ValueError(f"mask length {U.shape} does not match n={g.n}")
        return np.flatnonzero(U)
    U = np.unique(U.astype(np.int64, copy=False))
    if U.size and (U[0] < 0 or U[-1] >= g.n):
        raise ValueError("subset contains a vertex outside 0..n-1")
    return U


def as_mask(g, U):
    U = np.asarray(U)
    if U.dtype == bool:
        return U
    mask = np.zeros(g.n, dtype=bool)
    mask[U.astype(np.int64, copy=False)] = True
    return mask


def neighbor_counts(g, U):
    """``counts[y] = |N_y & U|`` for every vertex ``y``."""
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    return as_mask(g, U)[g.adj].sum(axis=1)


def _touched(g, U):
    # (vertices with >=1 neighbour in U, their neighbour counts); O(r|U| log)
    if U.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    return np.unique(g.adj[U].ravel(), return_counts=True)


def star_sets(g, U):
    """Return ``(U*1, U*2)`` as sorted vertex arrays."""
    U = as_vertex_array(g, U)
    touched, counts = _touched(g, U)
    return touched, touched[counts >= 2]


def edge_count(g, A, B):
    """``e(A, B)``: ordered pairs ``(x, y)`` with ``x in A``, ``y in B``, ``x ~ y``."""
    A = as_vertex_array(g, A)
    if A.size == 0:
        return 0
    return int(as_mask(g, B)[g.adj[A]].sum())


def subset_stats(g, U):
    U = as_vertex_array(g, U)
    m = int(U.size)
    touched, counts = _touched(g, U)
    inside = _member(touched, U)
    u1 = int(inside.sum())
    return SubsetStats(
        m=m,
        star1=int(touched.size),
        star2=int(np.count_nonzero(counts >= 2)),
        boundary=int(touched.size - u1),
        cross_edges=int(counts[~inside].sum()),
        u0=m - u1,
        u1=u1,
    )


def _member(x, sorted_set):
    if sorted_set.size == 0:
        return np.zeros(x.shape, dtype=bool)
    idx = np.searchsorted(sorted_set, x)
    idx[idx == sorted_set.size] = 0
    return sorted_set[idx] == x


def u_parts(g, U):
    """``(U0, U1)`` as vertex arrays."""
    U = as_vertex_array(g, U)
    counts = neighbor_counts(g, U)[U]
    return U[counts == 0], U[counts > 0]


def w_parts(g, W):
    """``(W0, W1)`` as vertex arrays."""
    mask = as_mask(g, W)
    counts = neighbor_counts(g, mask)
    heavy = counts >= g.r - 1
    return np.flatnonzero(heavy & mask), np.flatnonzero(heavy & ~mask)


def blocked_set(g, W):
    """``((W^c)*2)^c``: vertices surely vacant next step when ``W^c`` is occupied."""
    mask = as_mask(g, W)
    _, star2 = star_sets(g, np.flatnonzero(~mask))
    out = np.ones(g.n, dtype=bool)
    out[star2] = False
    return np.flatnonzero(out)


def vacancy_stats(g, W):
    """W0/W1 counts plus the blocked-set size, cross-checked against each other."""
    mask = as_mask(g, W)
    m = int(mask.sum())
    w0, w1 = w_parts(g, mask)
    blocked = int(blocked_set(g, mask).size)
    if blocked != w0.size + w1.size:
        raise AssertionError(
            f"blocked set has {blocked} vertices but |W0|+|W1|={w0.size + w1.size}"
        )
    if m == 0:
        return VacancyStats(0, int(w0.size), int(w1.size), 0.0, 0.0, blocked, degenerate=True)
    return VacancyStats(m, int(w0.size), int(w1.size), w0.size / m, w1.size / m, blocked)


def fast_blocked(g, W):
    """``|W0| + |W1|`` from local neighbour counts, O(r|W|)."""
    W = as_vertex_array(g, W)
    if g.r <= 1:
        return int(vacancy_stats(g, W).blocked)
    touched, counts = _touched(g, W)
    return int(np.count_nonzero(counts >= g.r - 1))


# ---------------------------------------------------------------- samplers


def bfs_order(g, root, limit=None):
    """Vertices in BFS order from ``root`` with their distances."""
    dist = {int(root): 0}
    order = [int(root)]
    queue = deque(order)
    adj = g.adj
    while queue and (limit is None or len(order) < limit):
        x = queue.popleft()
        for y in adj[x].tolist():
            if y not in dist:
                dist[y] = dist[x] + 1
                order.append(y)
                queue.append(y)
                if limit is not None and len(order) >= limit:
                    break
    return order, dist


def bfs_ball(g, root, radius):
    """All vertices within graph distance ``radius`` of ``root``."""
    order, dist = bfs_order(g, root)
    return np.array(sorted(v for v in order if dist[v] <= radius), dtype=np.int64)


def uniform_subset(g, m, rng):
    return np.sort(rng.choice(g.n, size=m, replace=False)).astype(np.int64)


def _grow(g, m, chosen, rng):
    # extend `chosen` (a set) to size m by BFS from fresh random roots
    while len(chosen) < m:
        root = int(rng.integers(g.n))
        if root in chosen:
            continue
        dist = {root}
        queue = deque([root])
        chosen.add(root)
        while queue and len(chosen) < m:
            x = queue.popleft()
            for y in g.adj[x].tolist():
                if y not in dist:
                    dist.add(y)
                    queue.append(y)
                    if y not in chosen:
                        chosen.add(y)
                        if len(chosen) >= m:
                            break
    return chosen


def ball_subset(g, m, rng):
    """First ``m`` vertices of a BFS from a random root (a truncated ball)."""
    return np.array(sorted(_grow(g, m, set(), rng)), dtype=np.int64)


def two_ball_subset(g, m, rng):
    """Union of two BFS balls, sizes about ``m/2`` each, total exactly ``m``."""
    first = _grow(g, (m + 1) // 2, set(), rng)
    return np.array(sorted(_grow(g, m, first, rng)), dtype=np.int64)


SAMPLERS = {
    "uniform": uniform_subset,
    "ball": ball_subset,
    "two_ball": two_ball_subset,
}


def _resolve_samplers(samplers):
    if isinstance(samplers, str):
        samplers = ["uniform", "ball", "two_ball"] if samplers == "mixed" else [samplers]
    out = []
    for s in samplers:
        if callable(s):
            out.append(s)
        elif s in SAMPLERS:
            out.append(SAMPLERS[s])
        else:
            raise ValueError(f"unknown sampler {s!r}")
    return out


# ---------------------------------------------------------------- audit

AUDIT_COLUMNS = (
    "sample_id", "m", "star1", "star2", "boundary", "cross_edges",
    "u0", "u1", "blocked", "ev_E", "ev_H", "ev_F",
)


@dataclass
class AuditReport:
    m: int
    eta: float
    rows: np.ndarray  # structured, fields AUDIT_COLUMNS
    thresholds: dict

    @property
    def n_samples(self):
        return int(self.rows.size)

    def frequency(self, event):
        return float(self.rows[f"ev_{event}"].mean()) if self.rows.size else 0.0

    def max_ratio(self, column):
        return float(self.rows[column].max() / self.m) if self.rows.size else 0.0

    def min_ratio(self, column):
        return float(self.rows[column].min() / self.m) if self.rows.size else 0.0

    @property
    def ustar_violations(self):
        """Samples breaking ``|U*1| + |U*2| <= r|U|``; always 0 for a valid graph."""
        return int(np.count_nonzero(self.rows["star1"] + self.rows["star2"] > self.thresholds["rm"]))

    def summary(self):
        return {
            "samples": self.n_samples,
            "freq_E": self.frequency("E"),
            "freq_H": self.frequency("H"),
            "freq_F": self.frequency("F"),
            "max_star2_ratio": self.max_ratio("star2"),
            "max_star1_ratio": self.max_ratio("star1"),
            "min_star1_ratio": self.min_ratio("star1"),
            "max_blocked_ratio": self.max_ratio("blocked"),
            "ustar_violations": self.ustar_violations,
        }

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write(",".join(AUDIT_COLUMNS) + "\n")
            for row in self.rows.tolist():
                fh.write(",".join(str(int(x)) for x in row) + "\n")


def audit_events(g, m, eta, samplers="uniform", n_samples=1000, rng=None):
    """Falsification search for large ``U*2``, small ``U*1`` and large blocked sets.

    Each sampled subset serves both as ``U`` and as the vacant set ``W``.
    Events, per sample:

    * E: ``|U*2| >= (1 + eta) m``
    * H: ``|U*1| <= (r - 1 - eta) m``
    * F: ``|((W^c)*2)^c| > (3/(2r-4) + eta) m``

    Samplers are used round-robin.
    """
    if not 1 <= m <= g.n:
        raise ValueError(f"subset size m={m} must lie in 1..{g.n}")
    rng = as_rng(rng)
    funcs = _resolve_samplers(samplers)
    r = g.r
    k_e = (1 + eta) * m
    k_h = (r - 1 - eta) * m
    k_f = (3 / (2 * r - 4) + eta) * m if r > 2 else float("inf")
    rows = np.zeros(n_samples, dtype=[(c, np.int64) for c in AUDIT_COLUMNS])
    for i in range(n_samples):
        U = funcs[i % len(funcs)](g, m, rng)
        s = subset_stats(g, U)
        blocked = fast_blocked(g, U)
        rows[i] = (
            i, s.m, s.star1, s.star2, s.boundary, s.cross_edges, s.u0, s.u1, blocked,
            s.star2 >= k_e, s.star1 <= k_h, blocked > k_f,
        )
    return AuditReport(m, eta, rows, {"E": k_e, "H": k_h, "F": k_f, "rm": r * m})
