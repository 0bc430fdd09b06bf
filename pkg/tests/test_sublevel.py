from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlosc.errors import DerivativeConditionError, InvalidParameterError
from mlosc.polynomials import PolyPhase, parse_polynomial
from mlosc.sublevel import default_size, derivative_lower_bound, sublevel_measure, verify_ccw

X = parse_polynomial("x")
X2 = parse_polynomial("x^2")
X3 = parse_polynomial("x^3")
X1X2 = parse_polynomial("x1*x2")
MUS = np.logspace(-4, -1, 12)


def _hyperbola_area(mu):
    return mu * (1 - math.log(mu))


def test_default_sizes():
    assert default_size(1) == 2048
    assert default_size(2) == 2048
    assert default_size(3) == 512
    assert default_size(2, "monte_carlo") == 1_000_000


def test_linear_example():
    est = sublevel_measure(X, 0.25)
    assert est.method == "grid" and est.resolution_or_samples == 2048
    assert abs(est.measure - 0.25) <= 1 / 2048


def test_square_example():
    assert abs(sublevel_measure(X2, 0.25).measure - 0.5) <= 1 / 2048


@pytest.mark.parametrize("mu", [1e-3, 0.02, 0.3])
def test_cube_root_law(mu):
    assert abs(sublevel_measure(X3, mu).measure - mu ** (1 / 3)) <= 1 / 2048


def test_hyperbola_closed_form_against_independent_mc():
    mu = 0.1
    rng = np.random.default_rng(12345)
    hits = 0
    n = 10_000_000
    for _ in range(10):
        x = rng.random((n // 10, 2))
        hits += np.count_nonzero(x[:, 0] * x[:, 1] <= mu)
    p = hits / n
    assert abs(p - _hyperbola_area(mu)) <= 4 * math.sqrt(p * (1 - p) / n)
    assert _hyperbola_area(mu) == pytest.approx(0.3303, abs=1e-4)


def test_hyperbola_grid_and_mc():
    mu = 0.1
    exact = _hyperbola_area(mu)
    assert abs(sublevel_measure(X1X2, mu).measure - exact) <= 2 * 2 / 2048
    est = sublevel_measure(X1X2, mu, "monte_carlo", seed=3)
    assert est.ci_halfwidth > 0
    assert abs(est.measure - exact) <= 2 * est.ci_halfwidth


def test_mc_is_reproducible_per_seed():
    a = sublevel_measure(X1X2, 0.2, "monte_carlo", size=300_000, seed=9)
    b = sublevel_measure(X1X2, 0.2, "monte_carlo", size=300_000, seed=9)
    c = sublevel_measure(X1X2, 0.2, "monte_carlo", size=300_000, seed=10)
    assert a == b
    assert a.measure != c.measure


def test_mc_prefix_stability():
    # sample k depends only on (seed, k): a longer run extends a shorter one
    a = sublevel_measure(X, 0.5, "monte_carlo", size=1 << 18, seed=1)
    b = sublevel_measure(X, 0.5, "monte_carlo", size=1 << 19, seed=1)
    hits_a = round(a.measure * (1 << 18))
    hits_b = round(b.measure * (1 << 19))
    assert 0 <= hits_b - hits_a <= 1 << 18


@pytest.mark.parametrize("kwargs", [{"mu": 0.0}, {"mu": -1.0}, {"mu": 0.1, "size": 99}, {"mu": 0.1, "method": "sobol"}])
def test_invalid_arguments(kwargs):
    with pytest.raises(InvalidParameterError):
        sublevel_measure(X2, **kwargs)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-4, 2.0), st.floats(1e-4, 2.0), st.integers(1, 2))
def test_monotone_in_mu(m1, m2, which):
    P = X3 if which == 1 else parse_polynomial("x1^2 - 0.5*x2")
    lo, hi = sorted((m1, m2))
    assert sublevel_measure(P, lo, size=256).measure <= sublevel_measure(P, hi, size=256).measure


def test_grid_agrees_with_mc_on_random_cases():
    rng = np.random.default_rng(31)
    for k in range(100):
        dim = int(rng.integers(1, 4))
        coeffs = {}
        for _ in range(4):
            lam = tuple(int(v) for v in rng.integers(0, 3, dim))
            coeffs[lam] = float(rng.normal())
        P = PolyPhase(dim, coeffs)
        mu = float(10 ** rng.uniform(-2, 0))
        size = 200 if dim < 3 else 100
        g = sublevel_measure(P, mu, "grid", size=size)
        m = sublevel_measure(P, mu, "monte_carlo", size=20_000, seed=k)
        assert 0.0 <= g.measure <= 1.0
        assert abs(g.measure - m.measure) <= 3 * m.ci_halfwidth + 2 * dim / size


def test_derivative_lower_bound():
    assert derivative_lower_bound(X2, (2,)) == 2.0
    assert derivative_lower_bound(X2, (1,)) == 0.0


def test_ccw_square():
    fit = verify_ccw(X2, (2,), MUS)
    assert abs(fit.slope - 0.5) <= 0.05
    assert fit.exponent == 0.5


def test_ccw_cube():
    fit = verify_ccw(X3, (3,), MUS)
    assert abs(fit.slope - 1 / 3) <= 0.05


def test_ccw_derivative_violation():
    with pytest.raises(DerivativeConditionError):
        verify_ccw(X2, (1,), MUS)


def test_ccw_rejects_single_mu():
    with pytest.raises(InvalidParameterError):
        verify_ccw(X2, (2,), [0.1])


@pytest.mark.parametrize(
    "P, kappa, sizes",
    [(X2, (2,), (2048, 4096)), (X3, (3,), (2048, 4096)), (X1X2, (1, 1), (512, 1024)),
     (parse_polynomial("x1^2 + x2^2"), (2, 0), (512, 1024))],
)
def test_c_fit_stable_under_refinement(P, kappa, sizes):
    coarse = verify_ccw(P, kappa, MUS, size=sizes[0])
    fine = verify_ccw(P, kappa, MUS, size=sizes[1])
    assert abs(fine.c_fit - coarse.c_fit) / coarse.c_fit < 0.10
    order = sum(kappa)
    for mu, m in zip(fine.mus, fine.measures):
        assert m <= fine.c_fit * mu ** (1 / order) * (1 + 1e-12)
