"""Closed-form constants and roots behind the extinction/persistence bounds.

Most constants are ordinary floats. The small-set thresholds (``eps3``,
``eps4`` and everything downstream) are of order ``exp(-10**4)`` for realistic
``r`` and are carried as ``mpmath.mpf`` together with their natural and
base-10 logarithms; they are never meant to drive a simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from functools import lru_cache
from typing import NamedTuple

import mpmath
import numpy as np
from scipy.optimize import minimize_scalar

C_LOG = 2.0 + 1.0 / math.e  # log of C = exp(2 + 1/e)


# ---------------------------------------------------------------- special functions


def gamma_fn(x):
    """Binomial large-deviation rate ``x log x - x + 1`` (``x > 0``).

    Near ``x = 1`` a series avoids cancellation; see also ``gamma_one_minus``.
    """
    if x <= 0:
        raise ValueError(f"gamma_fn needs x > 0, got {x}")
    if isinstance(x, mpmath.mpf):
        return gamma_one_minus(1 - x) if abs(x - 1) < 1e-4 else x * mpmath.log(x) - x + 1
    h = x - 1.0
    if abs(h) < 1e-4:
        return h * h / 2 - h**3 / 6 + h**4 / 12
    return x * math.log(x) - x + 1.0


def gamma_one_minus(h):
    """``gamma_fn(1 - h)`` as ``sum_{k>=2} h^k / (k(k-1))``, exact in relative terms for tiny ``h``."""
    h = mpmath.mpf(h)
    if abs(h) >= 1e-4:
        return gamma_fn(1 - h)
    return mpmath.fsum(h**k / (k * (k - 1)) for k in range(2, 40))


def phi(x):
    """``x log(1/x)`` on ``(0, 1]``; maximal at ``1/e``."""
    if not 0 < x <= 1:
        raise ValueError(f"phi needs 0 < x <= 1, got {x}")
    return -x * math.log(x)


def psi(d):
    """``(1-d) log(1-d) / d`` on ``(0, 1)``; tends to -1 at 0 and 0 at 1."""
    if not 0 < d < 1:
        raise ValueError(f"psi needs 0 < d < 1, got {d}")
    return (1.0 - d) * math.log1p(-d) / d


def special_functions(x):
    return gamma_fn(x), phi(x), psi(x)


# ---------------------------------------------------------------- eta, b, horizon


def _check_p(p, open_interval=False):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if open_interval and not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")


def eta_of_p(p):
    """Positive root of ``(p + eta)(1 + eta) = (1 + p)/2``.

    Written as ``(1-p) / (sqrt(3+p^2) + 1 + p)``, algebraically equal to
    ``(sqrt(3+p^2) - (1+p)) / 2`` but without cancellation near ``p = 1``.
    """
    _check_p(p)
    return (1.0 - p) / (math.sqrt(3.0 + p * p) + 1.0 + p)


def b_of_p(p, r):
    """Sub-polynomial exponent ``b`` with ``b + (b+1) q < 1`` and ``b <= eta^2/(16 r)``.

    ``q = log(1+eta)/log(2/(1+p))``; we take the smaller of ``eta^2/(16r)`` and
    99% of the largest admissible value ``(1-q)/(1+q)``.
    """
    _check_p(p, open_interval=True)
    eta = eta_of_p(p)
    q = math.log1p(eta) / math.log(2.0 / (1.0 + p))
    return min(eta * eta / (16.0 * r), 0.99 * (1.0 - q) / (1.0 + q))


class HorizonConstants(NamedTuple):
    c01: float
    c02: float
    c0: float


def horizon_constants(p, r):
    """Extinction-time multipliers: ``C01 = (1-b)/L``, ``C02 = (1+b)/L``, ``C0 = 2/L``."""
    if p == 1:
        raise ValueError("horizon constants diverge at p = 1")
    _check_p(p, open_interval=True)
    L = math.log(2.0 / (1.0 + p))
    b = b_of_p(p, r)
    return HorizonConstants((1.0 - b) / L, (1.0 + b) / L, 2.0 / L)


def c0_of_p(p):
    """``2 / log(2/(1+p))`` for ``p`` in ``[0, 1)``."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    return 2.0 / math.log(2.0 / (1.0 + p))


# ---------------------------------------------------------------- beta, Delta


def _beta_residual(beta, u, eta):
    return math.expm1(-u * beta) + (u - eta) * beta


def beta_root(u, eta, tol=0.0, max_iter=2000):
    """Unique positive root of ``exp(-u b) = 1 - (u - eta) b``.

    The residual is strictly convex with value 0 and slope ``-eta`` at 0, so it
    is negative on ``(0, beta)`` and positive on ``(beta, 1/(u-eta)]``;
    bisection runs on that bracket until the midpoint stops moving.
    """
    if not 0.0 < eta < u:
        raise ValueError(f"need 0 < eta < u, got u={u}, eta={eta}")
    lo, hi = 0.0, 1.0 / (u - eta)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= tol:
            break
        if _beta_residual(mid, u, eta) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def c2(u, eta):
    """``u - eta + eta log(1/beta(u, eta))``."""
    return u - eta - eta * math.log(beta_root(u, eta))


def delta1(r):
    """``r log C + 3/2`` with ``C = exp(2 + 1/e)``."""
    return r * C_LOG + 1.5


class Delta2Fit(NamedTuple):
    value: float
    argmax: float
    grid_index: int
    grid_size: int


@lru_cache(maxsize=None)
def delta2_fit(r, grid_size=10_000, xtol=1e-9):
    """Maximise ``c2(r, eta)`` over ``eta`` in ``(0, r)``: dense grid, then golden section."""
    grid = np.linspace(0.0, float(r), grid_size + 2)[1:-1]
    vals = np.array([c2(r, e) for e in grid])
    i = int(np.argmax(vals))
    if 0 < i < grid_size - 1:
        res = minimize_scalar(
            lambda e: -c2(r, e),
            bracket=(grid[i - 1], grid[i], grid[i + 1]),
            method="golden",
            tol=xtol,
        )
        if -res.fun >= vals[i]:
            return Delta2Fit(float(-res.fun), float(res.x), i, grid_size)
    return Delta2Fit(float(vals[i]), float(grid[i]), i, grid_size)


def delta2(r):
    return delta2_fit(r).value


def delta_constants(r):
    if r < 2:
        raise ValueError(f"r must be >= 2, got {r}")
    return delta1(r), delta2(r)


# ---------------------------------------------------------------- epsilon cascade


@dataclass(frozen=True)
class EpsilonCascade:
    """Small-set thresholds; ``log_*`` are natural logs (floats)."""

    eta: float
    r: int
    eps5: mpmath.mpf
    eps3_prime: mpmath.mpf
    eps3: mpmath.mpf
    eps4_prime: mpmath.mpf
    eps4: mpmath.mpf
    log_eps5: float
    log_eps3_prime: float
    log_eps3: float
    log_eps4_prime: float
    log_eps4: float

    def log10(self, name):
        return getattr(self, f"log_{name}") / math.log(10.0)


def epsilon_cascade(eta, r):
    if not 0.0 < eta < r:
        raise ValueError(f"need 0 < eta < r, got eta={eta}, r={r}")
    K = 2.0 + delta1(r) + delta2(r)
    log_e5 = min(-math.log(1 + r + r * r), math.log(beta_root(r, eta / 2)))
    log_e3p = -8.0 * r * K / (eta * eta)
    log_e4p = -8.0 * K / eta
    log_e3 = min(-1.0, log_e5, log_e3p)
    log_e4 = min(-1.0, log_e5, log_e4p)
    ex = lambda v: mpmath.exp(mpmath.mpf(v))  # noqa: E731
    return EpsilonCascade(
        eta, r,
        ex(log_e5), ex(log_e3p), ex(log_e3), ex(log_e4p), ex(log_e4),
        log_e5, log_e3p, log_e3, log_e4p, log_e4,
    )


def log_eps2_of_p(p, r):
    _check_p(p, open_interval=True)
    return epsilon_cascade(eta_of_p(p), r).log_eps3


def eps2_of_p(p, r):
    """``eps3(eta(p))`` as an ``mpf``; decreasing and continuous in ``p``."""
    _check_p(p, open_interval=True)
    return epsilon_cascade(eta_of_p(p), r).eps3


# ---------------------------------------------------------------- persistence constants


class HypothesisViolation(ValueError):
    pass


@dataclass(frozen=True)
class PersistenceConstants:
    """Persistence-regime constants, all ``mpf``.

    ``p_min`` rounds to 1 at working precision for realistic inputs, so the
    admissible window is carried as ``one_minus_p_min``.
    """

    eps1: mpmath.mpf
    one_minus_p_min: mpmath.mpf
    delta: mpmath.mpf
    c1: mpmath.mpf
    pbd1_margin: mpmath.mpf  # (p - delta)(1 - a eps1) - (1 - eps1), positive

    @property
    def p_min(self):
        return 1 - self.one_minus_p_min


def persistence_slack(eta, r):
    """``(eps1, 1 - p_min)`` for the persistence regime."""
    if r < 4:
        raise ValueError(f"persistence bound needs r >= 4, got {r}")
    if not 0.0 < eta < 0.25:
        raise ValueError(f"persistence bound needs 0 < eta < 1/4, got {eta}")
    eps1 = epsilon_cascade(eta, r).eps4
    a = mpmath.mpf(3) / (2 * r - 4) + eta
    return eps1, eps1 * (1 - a) / (1 - a * eps1)


def persistence_constants(eta, r, p_choice=1, one_minus_p=None):
    """``eps1``, the lower bound on ``p``, ``delta`` and the rate ``c1``.

    ``delta`` is half the distance from ``p`` to the lower bound. Pass
    ``one_minus_p`` to place ``p`` inside a window narrower than float
    resolution.
    """
    eps1, slack = persistence_slack(eta, r)
    s = mpmath.mpf(1) - mpmath.mpf(p_choice) if one_minus_p is None else mpmath.mpf(one_minus_p)
    if s < 0:
        raise ValueError("p must not exceed 1")
    if s >= slack:
        raise HypothesisViolation(
            f"Theorem 1 hypothesis violated: need 1 - p < {mpmath.nstr(slack, 6)}, got {mpmath.nstr(s, 6)}"
        )
    p = 1 - s
    delta = (slack - s) / 2
    a = mpmath.mpf(3) / (2 * r - 4) + eta
    w = s + delta  # 1 - (p - delta)
    margin = eps1 * (1 - a) - w * (1 - a * eps1)
    term1 = (eta * eps1 / 16) * mpmath.log(2 / eps1)
    term2 = gamma_one_minus(delta / p) * p * (1 - 3 * eps1 / (2 * r - 4) - eta * eps1)
    return PersistenceConstants(eps1, slack, delta, min(term1, term2) / 2, margin)


# ---------------------------------------------------------------- subset counting


def subset_count_bound(n, m):
    """Natural log of ``(n e / m)^m``, an upper bound on ``C(n, m)``."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got n={n}, m={m}")
    return m * math.log(n / m) + m


# ---------------------------------------------------------------- table


@dataclass(frozen=True)
class BoundsTable:
    r: int
    p: float
    eta: float
    b: float | None
    c01: float | None
    c02: float | None
    c0: float | None
    delta1: float
    delta2: float
    eps5: mpmath.mpf | None
    eps3: mpmath.mpf | None
    eps2: mpmath.mpf | None
    eps4: mpmath.mpf | None
    theorem_eta: float | None
    eps1: mpmath.mpf | None
    one_minus_p_threshold: mpmath.mpf | None
    c1: mpmath.mpf | None

    @property
    def p_threshold(self):
        return None if self.one_minus_p_threshold is None else 1 - self.one_minus_p_threshold

    def beta(self, u, eta):
        return beta_root(u, eta)

    def rows(self):
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append((f.name, _fmt(v)))
            if isinstance(v, mpmath.mpf) and v > 0:
                out.append((f"log10_{f.name}", _fmt(float(mpmath.log10(v)))))
        return out

    def to_text(self):
        rows = self.rows()
        w = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{w}}  {v}" for k, v in rows) + "\n"

    def to_csv(self):
        return "name,value\n" + "".join(f"{k},{v}\n" for k, v in self.rows())


def _fmt(v):
    if v is None:
        return "NA"
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, 12)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def bounds_table(r, p, eta=None):
    """Every constant for ``(r, p)``.

    The cascade ``eps5, eps3, eps4`` is evaluated at ``eta(p)``. The persistence
    block uses ``eta`` when given, otherwise ``eta(p)`` if that is below 1/4;
    ``c1`` is filled only when ``p`` itself is admissible, which in double
    precision means ``p = 1``. At ``p = 1`` the extinction-side entries
    (``b``, the horizon constants and the cascade) are undefined and left empty.
    """
    _check_p(p)
    if p == 0:
        raise ValueError("p must be positive")
    e = eta_of_p(p)
    if p < 1:
        hc = horizon_constants(p, r)
        casc = epsilon_cascade(e, r)
        b = b_of_p(p, r)
        cascade = dict(eps5=casc.eps5, eps3=casc.eps3, eps2=casc.eps3, eps4=casc.eps4)
    else:
        hc = HorizonConstants(None, None, None)
        b = None
        cascade = dict(eps5=None, eps3=None, eps2=None, eps4=None)
    t_eta = eta if eta is not None else (e if 0 < e < 0.25 else None)
    eps1 = slack = c1 = None
    if t_eta is not None and r >= 4:
        eps1, slack = persistence_slack(t_eta, r)
        try:
            c1 = persistence_constants(t_eta, r, p).c1
        except HypothesisViolation:
            c1 = None
    return BoundsTable(
        r=r, p=p, eta=e, b=b,
        c01=hc.c01, c02=hc.c02, c0=hc.c0,
        delta1=delta1(r), delta2=delta2(r),
        **cascade,
        theorem_eta=t_eta, eps1=eps1, one_minus_p_threshold=slack, c1=c1,
    )
