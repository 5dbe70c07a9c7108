"""Uniform random r-regular simple graphs from the configuration model.

Every vertex ``v`` owns the half-edges ``v*r, ..., v*r + r - 1``.  A uniform
perfect matching of the ``r*n`` half-edges gives a random multigraph; rejecting
outcomes with self-loops or parallel edges leaves the uniform distribution on
simple r-regular graphs with labelled vertices ``0..n-1``.
"""

from __future__ import annotations

import io
import os
import re
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._rng import as_rng, make_rng

DEFAULT_MAX_ATTEMPTS = 10**6


class SamplingError(RuntimeError):
    """Rejection sampling ran out of attempts."""

    def __init__(self, attempts, n, r):
        super().__init__(
            f"no simple {r}-regular graph on {n} vertices after {attempts} attempts"
        )
        self.attempts = attempts


class GraphFormatError(ValueError):
    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


@dataclass(frozen=True)
class GraphConfig:
    n: int
    r: int
    seed: int = 0
    max_attempts: int = DEFAULT_MAX_ATTEMPTS

    def __post_init__(self):
        if self.r < 2:
            raise ValueError(f"degree r must be >= 2, got {self.r}")
        if self.n < 1:
            raise ValueError(f"vertex count n must be positive, got {self.n}")
        if (self.n * self.r) % 2:
            raise ValueError(f"r*n must be even, got r={self.r}, n={self.n}")
        if self.n < self.r + 1:
            raise ValueError(f"no simple {self.r}-regular graph on {self.n} vertices")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be positive")


@dataclass(frozen=True)
class HalfEdgePairing:
    """Perfect matching of the ``r*n`` half-edges, one row per pair."""

    n: int
    r: int
    pairs: np.ndarray

    @property
    def owners(self):
        return self.pairs // self.r

    def partner(self):
        """Involution array: ``partner[j]`` is the half-edge matched with ``j``."""
        out = np.empty(self.n * self.r, dtype=np.int64)
        out[self.pairs[:, 0]] = self.pairs[:, 1]
        out[self.pairs[:, 1]] = self.pairs[:, 0]
        return out

    def canonical(self):
        """Hashable canonical form: pairs sorted within and across rows."""
        p = np.sort(self.pairs, axis=1)
        p = p[np.lexsort((p[:, 1], p[:, 0]))]
        return tuple(map(tuple, p.tolist()))


class Multigraph(NamedTuple):
    edges: np.ndarray  # (k, 2), u <= v, one row per pair (with repeats)
    loop_count: int
    multi_edge_count: int


@dataclass(frozen=True, eq=False)
class RegularGraph:
    """Immutable simple r-regular graph.

    ``adjacency`` is a flat array of length ``r*n``; the neighbours of ``v``
    are ``adjacency[v*r:(v+1)*r]``, stored in ascending order.
    """

    n: int
    r: int
    adjacency: np.ndarray
    seed: int | None = None
    attempts: int | None = field(default=None, compare=False)

    def __post_init__(self):
        adj = np.ascontiguousarray(self.adjacency, dtype=np.int64).reshape(-1)
        if adj.size != self.n * self.r:
            raise ValueError(f"adjacency has {adj.size} entries, expected {self.n * self.r}")
        adj = np.sort(adj.reshape(self.n, self.r), axis=1).reshape(-1)
        adj.flags.writeable = False
        object.__setattr__(self, "adjacency", adj)
        _check_simple_regular(self.n, self.r, adj.reshape(self.n, self.r))

    @property
    def adj(self):
        """``(n, r)`` read-only view of the neighbour table."""
        return self.adjacency.reshape(self.n, self.r)

    def neighbors(self, v):
        return self.adjacency[v * self.r:(v + 1) * self.r]

    def edges(self):
        """``(r*n/2, 2)`` array of edges ``u < v`` in lexicographic order."""
        u = np.repeat(np.arange(self.n, dtype=np.int64), self.r)
        v = self.adjacency
        keep = u < v
        e = np.stack([u[keep], v[keep]], axis=1)
        return e[np.lexsort((e[:, 1], e[:, 0]))]

    def __eq__(self, other):
        if not isinstance(other, RegularGraph):
            return NotImplemented
        return (self.n, self.r) == (other.n, other.r) and np.array_equal(
            self.adjacency, other.adjacency
        )

    def __hash__(self):
        return hash((self.n, self.r, self.adjacency.tobytes()))

    def __repr__(self):
        return f"RegularGraph(n={self.n}, r={self.r}, seed={self.seed})"

    @classmethod
    def from_edges(cls, n, r, edges, seed=None):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.shape[0] * 2 != n * r:
            raise ValueError(f"{edges.shape[0]} edges cannot form an {r}-regular graph on {n} vertices")
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range")
        deg = np.bincount(edges.ravel(), minlength=n)
        if np.any(deg != r):
            bad = int(np.flatnonzero(deg != r)[0])
            raise ValueError(f"vertex {bad} has degree {deg[bad]}, expected {r}")
        order = np.argsort(np.concatenate([edges[:, 0], edges[:, 1]]), kind="stable")
        other = np.concatenate([edges[:, 1], edges[:, 0]])[order]
        return cls(n, r, other, seed=seed)


def _check_simple_regular(n, r, adj):
    if n == 0:
        return
    if adj.min() < 0 or adj.max() >= n:
        raise ValueError("neighbour index out of range")
    rows = np.arange(n)[:, None]
    if np.any(adj == rows):
        v = int(np.flatnonzero(np.any(adj == rows, axis=1))[0])
        raise ValueError(f"self-loop at vertex {v}")
    if r > 1 and np.any(adj[:, 1:] == adj[:, :-1]):
        v = int(np.flatnonzero(np.any(adj[:, 1:] == adj[:, :-1], axis=1))[0])
        raise ValueError(f"parallel edges at vertex {v}")
    # symmetry: the directed arc multiset must equal its reverse
    src = np.repeat(np.arange(n, dtype=np.int64), r)
    fwd = np.sort(src * n + adj.reshape(-1))
    rev = np.sort(adj.reshape(-1) * n + src)
    if not np.array_equal(fwd, rev):
        diff = np.setdiff1d(fwd, rev)
        a, b = divmod(int(diff[0]), n)
        raise ValueError(f"asymmetric adjacency: {a} lists {b} but {b} does not list {a}")


def sample_pairing(n, r, rng=None):
    """Uniform perfect matching of the ``r*n`` half-edges.

    A uniform permutation (Fisher-Yates) is cut into consecutive pairs, which
    is the sequential partner draw in vectorised form. Exactly one
    permutation of ``r*n`` items is drawn per call.
    """
    total = n * r
    if total % 2:
        raise ValueError(f"r*n must be even, got r={r}, n={n}")
    rng = as_rng(rng)
    perm = rng.permutation(total).astype(np.int64)
    return HalfEdgePairing(n, r, perm.reshape(-1, 2))


def pairing_to_multigraph(pairing):
    own = pairing.owners
    u = np.minimum(own[:, 0], own[:, 1])
    v = np.maximum(own[:, 0], own[:, 1])
    loops = u == v
    keys = u[~loops] * max(pairing.n, 1) + v[~loops]
    _, counts = np.unique(keys, return_counts=True)
    return Multigraph(
        np.stack([u, v], axis=1),
        int(loops.sum()),
        int(np.count_nonzero(counts > 1)),
    )


def _is_simple(pairing):
    own = pairing.owners
    if np.any(own[:, 0] == own[:, 1]):
        return False
    u = np.minimum(own[:, 0], own[:, 1])
    v = np.maximum(own[:, 0], own[:, 1])
    keys = np.sort(u * pairing.n + v)
    return not np.any(keys[1:] == keys[:-1])


def graph_from_pairing(pairing, seed=None, attempts=None):
    """Build the RegularGraph induced by a pairing (must be simple)."""
    n, r = pairing.n, pairing.r
    flat = np.empty(n * r, dtype=np.int64)
    a, b = pairing.pairs[:, 0], pairing.pairs[:, 1]
    flat[a] = b // r
    flat[b] = a // r
    return RegularGraph(n, r, flat, seed=seed, attempts=attempts)


def sample_simple_regular(cfg, rng=None):
    """Rejection-sample a uniform simple r-regular graph.

    With ``rng=None`` the stream is derived from ``cfg.seed`` so equal configs
    give identical graphs. The returned graph records the attempt count.
    """
    if rng is None:
        rng = make_rng(cfg.seed)
    rng = as_rng(rng)
    for attempt in range(1, cfg.max_attempts + 1):
        pairing = sample_pairing(cfg.n, cfg.r, rng)
        if _is_simple(pairing):
            return graph_from_pairing(pairing, seed=cfg.seed, attempts=attempt)
    raise SamplingError(cfg.max_attempts, cfg.n, cfg.r)


def acceptance_rate(n, r, attempts, rng=None):
    """Fraction of ``attempts`` raw pairings whose multigraph is simple."""
    rng = as_rng(rng)
    hits = sum(_is_simple(sample_pairing(n, r, rng)) for _ in range(attempts))
    return hits / attempts


def complete_graph(k):
    """K_k as a (k-1)-regular graph."""
    adj = [[u for u in range(k) if u != v] for v in range(k)]
    return RegularGraph(k, k - 1, np.array(adj, dtype=np.int64))


# ---------------------------------------------------------------- file format

_HEADER = re.compile(r"^#\s*regular-graph\s+n=(\d+)\s+r=(\d+)\s+seed=(\S+)\s*$")


def write_graph(g, sink):
    """Write ``g`` as a header line plus one sorted ``u v`` line per edge."""
    seed = "none" if g.seed is None else str(g.seed)
    lines = [f"# regular-graph n={g.n} r={g.r} seed={seed}"]
    lines.extend(f"{u} {v}" for u, v in g.edges().tolist())
    text = "\n".join(lines) + "\n"
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w") as fh:
            fh.write(text)
    else:
        sink.write(text)


def read_graph(source):
    """Read a graph from a path, a file object, or the file text itself."""
    if isinstance(source, str) and "\n" in source:
        return _parse_graph(io.StringIO(source))
    if isinstance(source, (str, os.PathLike)):
        with open(source) as fh:
            return _parse_graph(fh)
    return _parse_graph(source)


def _parse_graph(fh):
    header = fh.readline()
    m = _HEADER.match(header.strip())
    if not m:
        raise GraphFormatError("expected '# regular-graph n=<n> r=<r> seed=<seed>'", 1)
    n, r = int(m.group(1)), int(m.group(2))
    seed = None if m.group(3) == "none" else int(m.group(3))
    nbrs = [[] for _ in range(n)]
    seen = set()
    last_line = {}
    for lineno, line in enumerate(fh, start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer vertex in {line!r}", lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"vertex out of range 0..{n - 1}", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop at {u}", lineno)
        if u > v:
            raise GraphFormatError(f"edge {u} {v} not written as u < v", lineno)
        if (u, v) in seen:
            raise GraphFormatError(f"duplicate edge {u} {v}", lineno)
        seen.add((u, v))
        nbrs[u].append(v)
        nbrs[v].append(u)
        last_line[u] = last_line[v] = lineno
    for x, row in enumerate(nbrs):
        if len(row) != r:
            raise GraphFormatError(
                f"vertex {x} has degree {len(row)}, header says r={r}", last_line.get(x)
            )
    return RegularGraph(n, r, np.array(nbrs, dtype=np.int64).reshape(-1), seed=seed)
