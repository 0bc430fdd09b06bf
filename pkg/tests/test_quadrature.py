from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import special as sp
from scipy.integrate import quad, simpson

from mlosc.errors import (
    BudgetExceededError,
    DimensionMismatchError,
    DivergentIntegralError,
    InvalidParameterError,
)
from mlosc.polynomials import BinaryCubic, PolyPhase, depressed_discriminant
from mlosc.quadrature import (
    MAX_PANELS_PER_AXIS,
    Amplitude,
    Domain,
    IntegralSpec,
    angular_J2,
    angular_J2_result,
    initial_panels,
    integrate_classical,
    integrate_cubic_J,
    integrate_generalized,
    integrate_homogeneous_cubic,
    integrate_singular,
    integrate_singular_result,
)
from mlosc.special_functions import MLParams

HALF = MLParams(0.5, 1.0)
CLASSICAL = MLParams(1.0, 1.0)

# 30-digit mpmath quadrature of w(100 x) over [0, 1]; real part is sqrt(pi)/200
W100_INTEGRAL = 0.00886226925452758 + 0.0315207089553798j
# 30-digit mpmath quadrature of |cos^3 t + sin^3 t|^(-2/3) split at its zeros
J2_P0_Q1 = 10.599832501627196


def _simpson(f, a, b, n=1_000_001):
    x = np.linspace(a, b, n)
    return simpson(f(x), x=x)


def _fresnel_ref(a):
    z = math.sqrt(2 * a / math.pi)
    S, C = sp.fresnel(z)
    return math.sqrt(math.pi / (2 * a)) * (C + 1j * S)


def _linear(mu):
    return PolyPhase.monomial((1,), mu)


# domains and amplitudes


def test_domain_validation():
    assert Domain.unit_cube(3).measure == 1.0
    assert Domain.interval(-1, 1).measure == 2.0
    assert Domain.unit_disc().measure == pytest.approx(math.pi)
    with pytest.raises(InvalidParameterError):
        Domain.interval(1.0, 1.0)
    with pytest.raises(InvalidParameterError):
        Domain.unit_cube(0)


def test_spec_dimension_check():
    with pytest.raises(DimensionMismatchError):
        IntegralSpec(HALF, PolyPhase.monomial((1, 1)), Amplitude.constant(), Domain.unit_cube(1))


def test_bump_amplitude():
    b = Amplitude.bump((0.5,), 0.25)
    assert b(np.array([[0.5]]))[0] == pytest.approx(1.0)
    assert b(np.array([[0.8], [0.1]])).tolist() == [0.0, 0.0]
    assert b.sup_norm(Domain.unit_cube(1)) == pytest.approx(1.0)
    with pytest.raises(InvalidParameterError):
        Amplitude.bump((0.5,), 0.0)


def test_polynomial_amplitude_sup_norm():
    a = Amplitude.polynomial(PolyPhase.univariate([0.0, 0.0, -3.0]))
    assert a.sup_norm(Domain.interval(-1, 1)) == pytest.approx(3.0)


def test_initial_panels_follow_norm_and_cap():
    assert initial_panels(_linear(99.0), 1) == 100
    assert initial_panels(PolyPhase.monomial((2,), 99.0), 1) == 10
    assert initial_panels(_linear(1e9), 1) == MAX_PANELS_PER_AXIS
    assert initial_panels(PolyPhase.monomial((1, 0), 1e9), 2) < MAX_PANELS_PER_AXIS


# integrate_generalized / integrate_classical examples


def test_zero_phase_gives_one():
    r = integrate_generalized(IntegralSpec(CLASSICAL, PolyPhase(1, {})))
    assert r.value == pytest.approx(1.0, abs=1e-14)
    assert r.panels_used >= 1 and 0 <= r.error_estimate < 1e-7


def test_linear_phase_closed_form():
    r = integrate_generalized(IntegralSpec(CLASSICAL, _linear(math.pi)))
    assert abs(r.value) == pytest.approx(2 / math.pi, abs=1e-12)


def test_half_order_against_simpson_oracle():
    mu = 1e3
    r = integrate_generalized(IntegralSpec(HALF, _linear(mu)))
    ref = _simpson(lambda x: sp.wofz(mu * x), 0.0, 1.0)
    assert abs(r.value - ref) <= 1e-6


def test_half_order_against_mpmath_value():
    r = integrate_generalized(IntegralSpec(HALF, _linear(100.0)), tol=1e-10)
    assert abs(r.value - W100_INTEGRAL) <= 1e-12


def test_classical_examples():
    assert integrate_classical(PolyPhase(2, {})).value == pytest.approx(1.0, abs=1e-14)
    assert abs(integrate_classical(_linear(2 * math.pi)).value) <= 1e-9
    r = integrate_classical(PolyPhase(2, {(1, 0): math.pi, (0, 1): math.pi}))
    assert abs(r.value) == pytest.approx((2 / math.pi) ** 2, abs=1e-10)


def test_classical_fresnel():
    r = integrate_classical(PolyPhase.monomial((2,), 400.0), tol=1e-9)
    assert abs(r.value - _fresnel_ref(400.0)) <= 1e-9


def test_tolerance_floor():
    with pytest.raises(InvalidParameterError):
        integrate_classical(_linear(1.0), tol=1e-11)


def test_integral_rejects_alpha_above_one():
    with pytest.raises(InvalidParameterError):
        integrate_generalized(IntegralSpec(MLParams(1.5, 1.0), _linear(1.0)))


def test_budget_exceeded_carries_estimate():
    phase = PolyPhase(2, {(3, 0): 5e3, (1, 2): -4e3})
    with pytest.raises(BudgetExceededError) as info:
        integrate_classical(phase, tol=1e-10, budget=5000)
    res = info.value.result
    assert res is not None and math.isfinite(abs(res.value)) and res.panels_used >= 1


# properties


def test_linearity_in_amplitude():
    phase = PolyPhase.univariate([0.0, -2.0, 0.0, 7.0])
    base = Amplitude.bump((0.4,), 0.5)
    r0 = integrate_generalized(IntegralSpec(HALF, phase, base), tol=1e-10)
    # power-of-two factor with a matching tolerance takes identical refinement steps
    r4 = integrate_generalized(IntegralSpec(HALF, phase, base * 4.0), tol=4e-10)
    assert r4.value == 4.0 * r0.value
    r = integrate_generalized(IntegralSpec(HALF, phase, base * -2.5), tol=1e-10)
    assert abs(r.value + 2.5 * r0.value) <= 1e-10 * abs(2.5 * r0.value)


def test_classical_consistency():
    phase = PolyPhase(2, {(2, 0): 12.0, (1, 1): -5.0, (0, 1): 3.0})
    a = integrate_generalized(IntegralSpec(CLASSICAL, phase, domain=Domain.unit_cube(2)), tol=1e-9)
    b = integrate_classical(phase, tol=1e-9)
    assert abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-12


def test_interval_additivity():
    phase = PolyPhase.univariate([0.3, -2.0, 0.0, 5.0])
    ml = MLParams(0.6, 1.2)

    def run(lo, hi):
        return integrate_generalized(IntegralSpec(ml, phase, domain=Domain.interval(lo, hi)), tol=1e-10).value

    assert abs(run(-1, 0) + run(0, 1) - run(-1, 1)) <= 1e-9


def test_refinement_monotone():
    ref = _fresnel_ref(400.0)
    phase = PolyPhase.monomial((2,), 400.0)
    prev = math.inf
    tol = 1e-2
    while tol >= 1e-10:
        r = integrate_classical(phase, tol=tol)
        err = abs(r.value - ref)
        assert err <= max(tol, r.error_estimate)
        # below 1e-13 the discrepancy is rounding noise
        assert err <= max(prev, 1e-13)
        prev = err
        tol /= 2


# cubic J


def test_cubic_J_zero_classical_against_simpson():
    r = integrate_cubic_J(0.0, 0.0, CLASSICAL, tol=1e-10)
    ref = _simpson(lambda x: np.exp(1j * x**3), -1.0, 1.0)
    assert abs(r.value - ref) <= 1e-9


@pytest.mark.parametrize("alpha, beta", [(0.3, 0.7), (0.5, 1.0), (0.8, 2.5)])
def test_cubic_J_odd_symmetry(alpha, beta):
    ml = MLParams(alpha, beta)
    whole = integrate_cubic_J(0.0, 0.0, ml, tol=1e-10).value
    half = integrate_generalized(IntegralSpec(ml, PolyPhase.monomial((3,)), domain=Domain.interval(0, 1)), tol=1e-10)
    assert abs(whole - 2 * half.value.real) <= 1e-9


def test_cubic_J_degenerate():
    r = integrate_cubic_J(-3.0, 2.0, HALF, tol=1e-8)
    ref = _simpson(lambda x: sp.wofz(x**3 - 3 * x + 2), -1.0, 1.0)
    assert r.error_estimate <= 1e-8
    assert abs(r.value - ref) <= 1e-8


# singular integral


def _singular_oracle(p, q, delta):
    # QUADPACK with extrapolation, one call per root-free piece
    pts = sorted({-1.0, 1.0} | {r.real for r in np.roots([1, 0, p, q]) if abs(r.imag) < 1e-9 and -1 < r.real < 1})

    def f(x):
        b = abs(x**3 + p * x + q)
        return b ** (-delta) if b else 0.0

    return math.fsum(quad(f, a, b, limit=500, epsabs=1e-13, epsrel=1e-13)[0] for a, b in zip(pts[:-1], pts[1:]))


def test_singular_closed_form():
    assert integrate_singular(0.0, 0.0, 0.25) == pytest.approx(8.0, abs=1e-10)


def test_singular_no_roots_against_simpson():
    ref = _simpson(lambda x: np.abs(x**3 + 2) ** -0.5, -1.0, 1.0)
    assert abs(integrate_singular(0.0, 2.0, 0.5) - ref) <= 1e-8


@pytest.mark.parametrize("p, q, delta", [(-3.0, 2.0, 0.6), (0.0, 0.0, 0.34), (-0.75, 0.25, 0.5)])
def test_singular_divergent(p, q, delta):
    with pytest.raises(DivergentIntegralError):
        integrate_singular(p, q, delta)


def test_singular_double_root_converges_below_half():
    # (x - 1)^2 (x + 2): exponent 2 * 0.4 < 1
    val = integrate_singular(-3.0, 2.0, 0.4)
    # algebraic-weight QUADPACK rule for (1 - x)^(-0.8)
    ref = quad(lambda x: (x + 2) ** -0.4, -1, 1, weight="alg", wvar=(0.0, -0.8), epsabs=1e-13)[0]
    assert abs(val - ref) <= 1e-8


def test_singular_delta_range():
    with pytest.raises(InvalidParameterError):
        integrate_singular(1.0, 0.0, 1.0)
    with pytest.raises(InvalidParameterError):
        integrate_singular(1.0, 0.0, 0.0)


# the oracle occasionally reports roundoff near a root; the comparison still holds
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_singular_random_against_quadpack():
    rng = np.random.default_rng(20)
    deltas = (0.35, 0.45, 0.6, 0.8)
    done = 0
    while done < 200:
        p, q = rng.uniform(-6, 6, 2)
        if abs(depressed_discriminant(p, q).discriminant) < 1e-3:
            continue
        delta = deltas[done % 4]
        r = integrate_singular_result(p, q, delta)
        assert abs(r.value - _singular_oracle(p, q, delta)) <= 1e-6
        assert r.error_estimate <= 1e-10
        done += 1


# angular integral


def test_J2_triple_zero_diverges():
    with pytest.raises(DivergentIntegralError):
        angular_J2(0.0, 0.0)


def test_J2_double_zero_diverges():
    with pytest.raises(DivergentIntegralError):
        angular_J2(-3.0, 2.0)


def test_J2_closed_form():
    # phi = cos t, so J2 = 4 * int_0^{pi/2} cos^{-2/3}
    exact = 2 * math.sqrt(math.pi) * math.gamma(1 / 6) / math.gamma(2 / 3)
    assert angular_J2(1.0, 0.0) == pytest.approx(exact, abs=1e-9)


def test_J2_against_simpson_with_root_splitting():
    # t = (pi/2)(1 - s^4) grades the nodes toward the zero at pi/2; cos t is
    # written as sin(pi s^4 / 2) to avoid cancellation
    s = np.linspace(0.0, 1.0, 1_000_001)
    g = np.zeros_like(s)
    g[1:] = np.sin(math.pi / 2 * s[1:] ** 4) ** (-2 / 3) * 2 * math.pi * s[1:] ** 3
    ref = 4 * simpson(g, x=s)
    assert abs(angular_J2(1.0, 0.0) - ref) <= 1e-6


def test_J2_p0_q1():
    assert abs(angular_J2(0.0, 1.0) - J2_P0_Q1) <= 1e-9


def test_J2_large_coefficients_warn():
    with pytest.warns(UserWarning):
        angular_J2_result(7.0, 0.0, tol=1e-8)


# disc integral


def test_disc_zero_cubic_is_area():
    r = integrate_homogeneous_cubic(BinaryCubic(0, 0, 0, 0), HALF)
    assert r.value == pytest.approx(math.pi, abs=1e-12)


def test_disc_against_cartesian_oracle():
    # Gauss-Legendre in x = sin u and in y across each chord: 2000 x 2000 nodes
    n = 2000
    g, w = np.polynomial.legendre.leggauss(n)
    u = g * math.pi / 2
    x = np.sin(u)
    half = np.cos(u)
    y = half[:, None] * g[None, :]
    vals = np.exp(1j * (x[:, None] ** 3 + y**3))
    inner = (vals * w[None, :]).sum(axis=1) * half
    ref = (inner * np.cos(u) * w).sum() * math.pi / 2
    r = integrate_homogeneous_cubic(BinaryCubic(1, 0, 0, 1), CLASSICAL, tol=1e-9)
    assert abs(r.value - ref) <= 1e-5


def test_disc_scaled_consistency():
    c = BinaryCubic(0.7, -0.2, 0.4, 1.1)
    a = integrate_homogeneous_cubic(c.scaled(8.0), HALF, tol=1e-9)
    spec = IntegralSpec(HALF, c.to_phase() * 8.0, domain=Domain.unit_disc())
    b = integrate_generalized(spec, tol=1e-9)
    assert abs(a.value - b.value) <= 1e-9
