import math

import mpmath
import numpy as np
import pytest
from scipy.optimize import brentq

from oracles import bisect_root
from threshold_cp.bounds import (
    BoundsTable,
    HypothesisViolation,
    b_of_p,
    beta_root,
    bounds_table,
    c0_of_p,
    c2,
    delta1,
    delta2,
    delta2_fit,
    delta_constants,
    eps2_of_p,
    epsilon_cascade,
    eta_of_p,
    gamma_fn,
    gamma_one_minus,
    horizon_constants,
    log_eps2_of_p,
    persistence_slack,
    phi,
    psi,
    special_functions,
    subset_count_bound,
    persistence_constants,
)

P_GRID = np.linspace(0.01, 0.99, 99)


# ---- eta


@pytest.mark.parametrize("p", P_GRID)
def test_eta_identity(p):
    e = eta_of_p(p)
    assert abs((p + e) * (1 + e) - (1 + p) / 2) < 1e-12
    assert e == pytest.approx((math.sqrt(3 + p * p) - 1 - p) / 2, abs=1e-14)


def test_eta_endpoints():
    assert eta_of_p(1.0) == 0.0
    assert eta_of_p(0.0) == pytest.approx((math.sqrt(3) - 1) / 2, abs=1e-15)
    assert eta_of_p(0.0) == pytest.approx(0.3660254, abs=1e-7)


def test_eta_half_against_bisection():
    root = bisect_root(lambda e: (0.5 + e) * (1 + e) - 0.75, 0.0, 1.0)
    assert abs(eta_of_p(0.5) - root) < 1e-12


def test_eta_decreasing_and_rejects_out_of_range():
    vals = [eta_of_p(p) for p in P_GRID]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        eta_of_p(1.1)
    with pytest.raises(ValueError):
        eta_of_p(-0.1)


def test_ratio_below_one():
    for p in P_GRID:
        assert math.log1p(eta_of_p(p)) / math.log(2 / (1 + p)) < 1


# ---- b and horizon


@pytest.mark.parametrize("r", [3, 4, 5, 8])
def test_b_constraints(r):
    for p in P_GRID:
        b = b_of_p(p, r)
        e = eta_of_p(p)
        q = math.log1p(e) / math.log(2 / (1 + p))
        assert 0 < b <= e * e / (16 * r)
        assert b + (b + 1) * q < 1


def test_b_vanishes_as_p_to_one():
    assert b_of_p(1 - 1e-9, 4) < 1e-15
    with pytest.raises(ValueError):
        b_of_p(1.0, 4)


def test_b_p03_r4_direct():
    e = (math.sqrt(3.09) - 1.3) / 2
    q = math.log(1 + e) / math.log(2 / 1.3)
    assert b_of_p(0.3, 4) == pytest.approx(min(e * e / 64, 0.99 * (1 - q) / (1 + q)), rel=1e-12)


def test_c0_values():
    assert c0_of_p(1 / 3) == pytest.approx(2 / math.log(1.5), rel=1e-14)
    assert c0_of_p(1 / 3) == pytest.approx(4.9326, abs=1e-4)
    assert c0_of_p(1e-12) == pytest.approx(2 / math.log(2), rel=1e-9)
    assert c0_of_p(0.2) == pytest.approx(3.915, abs=1e-3)


@pytest.mark.parametrize("p", P_GRID)
def test_horizon_sum(p):
    c01, c02, c0 = horizon_constants(p, 4)
    assert abs(c01 + c02 - c0) < 1e-12
    assert c01 < c0 / 2 < c02


def test_horizon_rejects_p_one():
    with pytest.raises(ValueError):
        horizon_constants(1.0, 4)
    with pytest.raises(ValueError):
        c0_of_p(1.0)


# ---- beta


def _brentq_beta(u, eta):
    g = lambda b: math.exp(-u * b) - 1 + (u - eta) * b  # noqa: E731
    # the root lies past the minimum of g at log(u/(u-eta))/u
    lo = math.log(u / (u - eta)) / u
    return brentq(g, lo, 1 / (u - eta), xtol=1e-15, rtol=1e-15)


@pytest.mark.parametrize("u,eta", [(2, 1), (4, 0.2), (4, 0.1), (5, 0.2), (3, 2.9), (4, 1e-3), (10, 5)])
def test_beta_against_brentq(u, eta):
    b = beta_root(u, eta)
    assert b == pytest.approx(_brentq_beta(u, eta), rel=1e-12)
    assert 0 < b < 1 / (u - eta)
    assert abs(math.exp(-u * b) - 1 + (u - eta) * b) <= 1e-12


def test_beta_examples():
    assert beta_root(2, 1) == pytest.approx(0.7968, abs=1e-4)
    # small-eta expansion: beta ~ 2 eta / u^2
    assert beta_root(4, 0.2) == pytest.approx(0.025870, abs=1e-6)
    assert beta_root(4, 0.1) == pytest.approx(0.012713, abs=1e-6)


def test_beta_monotone():
    assert beta_root(4, 0.1) < beta_root(4, 0.2)
    assert beta_root(5, 0.2) < beta_root(4, 0.2)
    etas = np.linspace(0.01, 3.9, 60)
    vals = [beta_root(4, e) for e in etas]
    assert all(a < b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("u,eta", [(4, 0), (4, 4), (4, 5), (4, -1)])
def test_beta_rejects(u, eta):
    with pytest.raises(ValueError):
        beta_root(u, eta)


# ---- Delta


def test_delta1():
    assert delta1(4) == pytest.approx(4 * (2 + 1 / math.e) + 1.5, rel=1e-15)
    assert delta1(4) == pytest.approx(10.9715, abs=1e-4)


@pytest.mark.parametrize("r", [3, 4, 5])
def test_delta2_interior_max(r):
    fit = delta2_fit(r)
    assert 0 < fit.grid_index < fit.grid_size - 1
    assert 0 < fit.argmax < r
    # no grid point beats the refined value
    for e in np.linspace(0.001, r - 0.001, 400):
        assert c2(r, e) <= fit.value + 1e-9
    assert c2(r, r - 1e-6) < fit.value - 1


def test_delta2_increasing():
    assert delta2(3) < delta2(4) < delta2(5)


def test_delta_constants_reject_small_r():
    with pytest.raises(ValueError):
        delta_constants(1)
    assert delta_constants(4) == (delta1(4), delta2(4))


# ---- epsilon cascade


def test_eps5_example():
    c = epsilon_cascade(0.2, 4)
    assert c.eps5 == pytest.approx(beta_root(4, 0.1), rel=1e-12)
    assert float(c.eps5) < 1 / 21


@pytest.mark.parametrize("r", [3, 4, 5])
@pytest.mark.parametrize("eta", [0.01, 0.1, 0.2, 0.5, 1.0])
def test_cascade_min_structure(eta, r):
    c = epsilon_cascade(eta, r)
    assert c.eps3 <= c.eps5 <= 1 / math.e
    assert c.eps4 <= c.eps5
    assert c.eps3 <= c.eps3_prime and c.eps4 <= c.eps4_prime
    for name in ("eps5", "eps3_prime", "eps3", "eps4_prime", "eps4"):
        v = getattr(c, name)
        assert 0 < v <= 1 / math.e
        assert float(mpmath.log(v)) == pytest.approx(getattr(c, f"log_{name}"), rel=1e-12)


def test_cascade_primes_closed_form():
    K = 2 + delta1(4) + delta2(4)
    c = epsilon_cascade(0.2, 4)
    assert c.log_eps3_prime == pytest.approx(-8 * 4 * K / 0.04, rel=1e-12)
    assert c.log_eps4_prime == pytest.approx(-8 * K / 0.2, rel=1e-12)
    # (eta^2/4r) log(1/eps3') / 2 = K
    assert (0.04 / 16) * -c.log_eps3_prime / 2 == pytest.approx(K, rel=1e-12)
    assert c.log10("eps4") == pytest.approx(c.log_eps4 / math.log(10))


def test_eps3_increasing_in_eta():
    vals = [epsilon_cascade(e, 4).log_eps3 for e in np.linspace(0.01, 2.0, 80)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_eps2_decreasing_and_continuous():
    ps = np.linspace(0.02, 0.98, 49)
    logs = [log_eps2_of_p(p, 4) for p in ps]
    assert all(a > b for a, b in zip(logs, logs[1:]))
    assert eps2_of_p(0.2, 4) > eps2_of_p(0.8, 4)
    for p in ps:
        assert abs(eps2_of_p(p + 1e-6, 4) - eps2_of_p(p, 4)) < 1e-3
        assert eps2_of_p(p, 4) <= 1 / math.e
        # relative continuity too, despite the tiny magnitude
        assert abs(log_eps2_of_p(p + 1e-6, 4) - log_eps2_of_p(p, 4)) < 1e-3 * abs(log_eps2_of_p(p, 4))


def test_eps2_rejects_endpoints():
    with pytest.raises(ValueError):
        eps2_of_p(0.0, 4)
    with pytest.raises(ValueError):
        eps2_of_p(1.0, 4)


# ---- persistence constants


def test_persistence_slack_r4_eta01():
    eps1, slack = persistence_slack(0.1, 4)
    assert eps1 == epsilon_cascade(0.1, 4).eps4
    assert 0 < slack < eps1
    # the slack form agrees with 1 - p_min computed directly at high precision
    with mpmath.workdps(1400):
        direct = 1 - (1 - eps1) / (1 - (mpmath.mpf(3) / 4 + mpmath.mpf(0.1)) * eps1)
        assert direct > 0
        assert abs(direct - slack) < slack * mpmath.mpf(10) ** -12


@pytest.mark.parametrize("eta", [0.01, 0.05, 0.1, 0.2, 0.24])
@pytest.mark.parametrize("r", [4, 5, 6])
@pytest.mark.parametrize("frac", [0.0, 0.5, 0.999])
def test_persistence_constants_grid(eta, r, frac):
    _, slack = persistence_slack(eta, r)
    pc = persistence_constants(eta, r, one_minus_p=slack * frac)
    assert pc.delta > 0
    assert pc.pbd1_margin > 0
    assert pc.c1 > 0
    assert pc.p_min < 1 or pc.one_minus_p_min > 0


def test_persistence_p_equal_one():
    pc = persistence_constants(0.1, 4, p_choice=1)
    assert pc.delta == pc.one_minus_p_min / 2
    assert pc.c1 > 0


def test_persistence_pbd1_margin_matches_definition():
    eta, r = 0.2, 5
    pc = persistence_constants(eta, r, one_minus_p=0)
    a = mpmath.mpf(3) / (2 * r - 4) + eta
    with mpmath.workdps(3000):
        lhs = (1 - pc.delta) * (1 - a * pc.eps1) - (1 - pc.eps1)
        assert lhs > 0
        assert abs(lhs - pc.pbd1_margin) <= abs(pc.pbd1_margin) * mpmath.mpf(10) ** -12


def test_persistence_hypothesis_violated():
    with pytest.raises(HypothesisViolation, match="hypothesis violated"):
        persistence_constants(0.1, 4, p_choice=0.9)
    _, slack = persistence_slack(0.1, 4)
    with pytest.raises(HypothesisViolation):
        persistence_constants(0.1, 4, one_minus_p=slack)


@pytest.mark.parametrize("eta,r", [(0.3, 4), (0.0, 4), (0.1, 3)])
def test_persistence_domain(eta, r):
    with pytest.raises(ValueError):
        persistence_slack(eta, r)


# ---- special functions


def test_gamma_values():
    assert gamma_fn(1.0) == 0.0
    assert gamma_fn(2.0) == pytest.approx(2 * math.log(2) - 1, rel=1e-15)
    assert gamma_fn(2.0) == pytest.approx(0.386294, abs=1e-6)
    for x in [0.1, 0.5, 0.9999, 1.00001, 3.0]:
        assert gamma_fn(x) > 0


def test_gamma_near_one_is_accurate():
    for h in [1e-5, 1e-8, 1e-12]:
        with mpmath.workdps(60):
            exact = (1 - mpmath.mpf(h)) * mpmath.log(1 - mpmath.mpf(h)) + mpmath.mpf(h)
        assert gamma_fn(1 - h) == pytest.approx(float(exact), rel=1e-6)
    tiny = mpmath.mpf("1e-600")
    assert gamma_one_minus(tiny) == pytest.approx(tiny**2 / 2, rel=1e-10)


def test_gamma_domain():
    with pytest.raises(ValueError):
        gamma_fn(0.0)


def test_phi():
    assert phi(1.0) == 0.0
    xs = np.linspace(0.001, 1, 100_000)
    best = xs[np.argmax([phi(x) for x in xs])]
    assert best == pytest.approx(1 / math.e, abs=1e-4)
    assert phi(1 / math.e) == pytest.approx(1 / math.e, rel=1e-15)
    with pytest.raises(ValueError):
        phi(0.0)


def test_psi_limits():
    assert psi(1e-9) == pytest.approx(-1, abs=1e-8)
    assert psi(1 - 1e-12) == pytest.approx(0, abs=1e-9)
    with pytest.raises(ValueError):
        psi(1.0)


def test_special_functions_tuple():
    assert special_functions(0.5) == (gamma_fn(0.5), phi(0.5), psi(0.5))


# ---- subset counting


def test_subset_count_bound_dominates_binomial():
    for n in range(1, 101):
        for m in range(1, n + 1):
            assert subset_count_bound(n, m) >= math.log(math.comb(n, m))
    with pytest.raises(ValueError):
        subset_count_bound(5, 6)


# ---- table


def test_bounds_table_r4():
    t = bounds_table(4, 0.2, eta=0.1)
    assert isinstance(t, BoundsTable)
    assert t.c0 == pytest.approx(c0_of_p(0.2))
    assert t.eps2 == t.eps3
    assert t.c1 is None  # p = 0.2 is far below the persistence threshold
    # p_threshold itself rounds to 1 at working precision; the slack does not
    assert t.one_minus_p_threshold > 0
    assert t.beta(4, 0.1) == beta_root(4, 0.1)
    text = t.to_text()
    assert "delta2" in text and "log10_eps3" in text
    assert t.to_csv().startswith("name,value\n")


def test_bounds_table_at_p_one():
    t = bounds_table(4, 1.0, eta=0.1)
    assert t.c1 is not None and t.c1 > 0
    assert t.c0 is None and t.eps3 is None
    assert "NA" in t.to_text()


def test_bounds_table_default_eta_too_large_at_low_p():
    t = bounds_table(4, 0.2)
    assert t.theorem_eta is None and t.c1 is None


def test_bounds_table_r3_has_no_persistence_block():
    t = bounds_table(3, 0.5)
    assert t.eps1 is None and t.c1 is None
