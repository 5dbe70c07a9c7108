"""Exhaustive enumeration of half-edge pairings for tiny configuration models.

Everything here is exact: counts are Python integers and probabilities are
``fractions.Fraction``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction

ENUMERATION_BUDGET = 10**7
MAX_PAIRING_ARG = 20


class BudgetExceeded(RuntimeError):
    def __init__(self, needed, budget):
        super().__init__(f"enumeration needs {needed} visits, budget is {budget}")
        self.needed = needed
        self.budget = budget


def pairing_count(u):
    """Number of perfect matchings of ``u`` objects: ``u! / ((u/2)! 2^(u/2))``."""
    if u < 0 or u % 2:
        raise ValueError(f"u must be a nonnegative even integer, got {u}")
    if u > MAX_PAIRING_ARG:
        raise ValueError(f"u={u} exceeds the exact-count guard {MAX_PAIRING_ARG}")
    return math.factorial(u) // (math.factorial(u // 2) * 2 ** (u // 2))


def _double_factorial_count(u):
    # (u-1)!! without the size guard, for budget checks
    out = 1
    for k in range(u - 1, 0, -2):
        out *= k
    return out


def enumerate_pairings(n, r, visitor, budget=ENUMERATION_BUDGET):
    """Call ``visitor(pairs)`` once per perfect matching of the ``r*n`` half-edges.

    ``pairs`` is a tuple of ``(a, b)`` with ``a < b``; the lowest unmatched
    half-edge is always matched first and partners are tried in ascending
    order, so the visiting order is canonical. Returns the visit count.
    """
    total = n * r
    if total % 2:
        raise ValueError(f"r*n must be even, got r={r}, n={n}")
    needed = _double_factorial_count(total)
    if needed > budget:
        raise BudgetExceeded(needed, budget)

    free = list(range(total))
    stack = []
    visits = 0

    def rec():
        nonlocal visits
        if not free:
            visitor(tuple(stack))
            visits += 1
            return
        a = free.pop(0)
        for i in range(len(free)):
            b = free.pop(i)
            stack.append((a, b))
            rec()
            stack.pop()
            free.insert(i, b)
        free.insert(0, a)

    rec()
    return visits


def pairings(n, r, budget=ENUMERATION_BUDGET):
    """All pairings as a list, in canonical order."""
    out = []
    enumerate_pairings(n, r, out.append, budget)
    return out


def multigraph_of(pairs, r):
    """Edge list (vertex pairs, ``u <= v``) induced by a pairing."""
    return [tuple(sorted((a // r, b // r))) for a, b in pairs]


def is_simple(edges):
    return all(u != v for u, v in edges) and len(set(edges)) == len(edges)


def _neighbor_sets(n, edges):
    nbrs = [set() for _ in range(n)]
    for u, v in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    return nbrs


def _star_counts(nbrs, U):
    # number of distinct neighbours in U, per vertex
    return [len(nb & U) for nb in nbrs]


def exact_cross_edge_pmf(n, r, m, conditioned_simple=False, budget=ENUMERATION_BUDGET):
    """Exact law of ``e(U, U^c)`` for ``U = {0, ..., m-1}``.

    Under the raw pairing measure by default, under the law conditioned on
    simplicity when ``conditioned_simple``. Returns ``{s: Fraction}``.
    """
    if not 0 <= m <= n:
        raise ValueError(f"m={m} must lie in 0..{n}")
    cut = r * m  # half-edges below `cut` belong to U
    hist = Counter()

    def visit(pairs):
        if conditioned_simple and not is_simple(multigraph_of(pairs, r)):
            return
        hist[sum((a < cut) != (b < cut) for a, b in pairs)] += 1

    enumerate_pairings(n, r, visit, budget)
    total = sum(hist.values())
    if total == 0:
        raise ValueError(f"no simple {r}-regular graph on {n} vertices")
    return {s: Fraction(c, total) for s, c in sorted(hist.items())}


def _event_holds(event, n, r, nbrs, m, k):
    for U in itertools.combinations(range(n), m):
        Uset = set(U)
        if event == "E":
            if sum(c >= 2 for c in _star_counts(nbrs, Uset)) >= k:
                return True
        elif event == "H":
            if sum(c >= 1 for c in _star_counts(nbrs, Uset)) <= k:
                return True
        else:  # F: U plays the vacant set W
            comp = set(range(n)) - Uset
            star2 = sum(c >= 2 for c in _star_counts(nbrs, comp))
            if n - star2 > k:
                return True
    return False


def exact_event_probability(n, r, m, k, event, conditioned_simple=True, budget=ENUMERATION_BUDGET):
    """Exact probability that some ``m``-subset realises the event.

    * ``E``: some ``U`` with ``|U*2| >= k``
    * ``H``: some ``U`` with ``|U*1| <= k``
    * ``F``: some ``W`` with ``|((W^c)*2)^c| > k``
    """
    if event not in ("E", "H", "F"):
        raise ValueError(f"event must be E, H or F, got {event!r}")
    if not 1 <= m <= n:
        raise ValueError(f"m={m} must lie in 1..{n}")
    work = _double_factorial_count(n * r) * math.comb(n, m)
    if work > budget:
        raise BudgetExceeded(work, budget)
    hits = total = 0

    def visit(pairs):
        nonlocal hits, total
        edges = multigraph_of(pairs, r)
        if conditioned_simple and not is_simple(edges):
            return
        total += 1
        hits += _event_holds(event, n, r, _neighbor_sets(n, edges), m, k)

    enumerate_pairings(n, r, visit, budget)
    if total == 0:
        raise ValueError(f"no simple {r}-regular graph on {n} vertices")
    return Fraction(hits, total)


def cross_edge_mean(n, r, m):
    """Closed-form mean of ``e(U, U^c)`` under the raw pairing measure."""
    return Fraction(r * m * r * (n - m), r * n - 1)
