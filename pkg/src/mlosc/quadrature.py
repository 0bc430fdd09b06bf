"""Numerical evaluation of generalized oscillatory integrals.

All integrators share one adaptive Gauss-Kronrod engine.  Oscillatory
integrands start from a uniform panel layout sized to the phase (roughly
``(1 + |a|)^(1/d)`` panels per axis); integrands with algebraic singularities
are split at the singular points and integrated on graded meshes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._adaptive import DEFAULT_BUDGET, QuadResult, adaptive_cubature, boxes_from_edges
from ._singular import integrate_algebraic
from .errors import (
    DimensionMismatchError,
    DivergentIntegralError,
    InvalidParameterError,
)
from .polynomials import BinaryCubic, PolyPhase, cubic_roots
from .special_functions import MLParams, mittag_leffler

__all__ = [
    "Amplitude",
    "Domain",
    "IntegralSpec",
    "QuadResult",
    "MIN_TOL",
    "MAX_PANELS_PER_AXIS",
    "angular_J2",
    "angular_J2_result",
    "initial_panels",
    "integrate_classical",
    "integrate_cubic_J",
    "integrate_generalized",
    "integrate_homogeneous_cubic",
    "integrate_singular",
    "integrate_singular_result",
]

MIN_TOL = 1e-10
MAX_PANELS_PER_AXIS = 4096
SUP_NORM_POINTS = 4096


# {{{ domains and amplitudes


@dataclass(frozen=True)
class Domain:
    """``unit_cube`` ([0, 1]^dim), ``interval`` ([lo, hi]) or ``unit_disc``."""

    kind: str
    dim: int = 1
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("unit_cube", "interval", "unit_disc"):
            raise InvalidParameterError(f"unknown domain kind {self.kind!r}")
        if self.dim < 1:
            raise InvalidParameterError("domain dimension must be at least 1")
        if self.kind == "interval" and (self.dim != 1 or not self.lo < self.hi):
            raise InvalidParameterError("interval domains need dim 1 and lo < hi")
        if self.kind == "unit_disc" and self.dim != 2:
            raise InvalidParameterError("the unit disc is two-dimensional")

    @classmethod
    def unit_cube(cls, n: int = 1) -> Domain:
        return cls("unit_cube", n)

    @classmethod
    def interval(cls, lo: float, hi: float) -> Domain:
        return cls("interval", 1, float(lo), float(hi))

    @classmethod
    def unit_disc(cls) -> Domain:
        return cls("unit_disc", 2, -1.0, 1.0)

    @property
    def measure(self) -> float:
        if self.kind == "unit_disc":
            return math.pi
        return (self.hi - self.lo) ** self.dim

    def label(self) -> str:
        if self.kind == "unit_cube":
            return f"Q{self.dim}"
        if self.kind == "interval":
            return f"[{self.lo:g};{self.hi:g}]"
        return "disc"


@dataclass(frozen=True)
class Amplitude:
    """Smooth amplitude: ``constant(c)``, ``polynomial(P)`` or ``bump(center, radius)``.

    The bump is ``exp(1 - 1/(1 - |x - c|^2 / r^2))`` inside the ball, so its
    maximum is 1 at the center.
    """

    kind: str = "constant"
    value: float = 1.0
    poly: PolyPhase | None = None
    center: tuple[float, ...] = ()
    radius: float = 1.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "polynomial", "bump"):
            raise InvalidParameterError(f"unknown amplitude kind {self.kind!r}")
        if not math.isfinite(self.value) or not math.isfinite(self.scale):
            raise InvalidParameterError("amplitude must be finite")
        if self.kind == "polynomial" and self.poly is None:
            raise InvalidParameterError("polynomial amplitude needs a polynomial")
        if self.kind == "bump" and not self.radius > 0.0:
            raise InvalidParameterError("bump radius must be positive")

    @classmethod
    def constant(cls, c: float = 1.0) -> Amplitude:
        return cls("constant", float(c))

    @classmethod
    def polynomial(cls, poly: PolyPhase) -> Amplitude:
        return cls("polynomial", poly=poly)

    @classmethod
    def bump(cls, center, radius: float) -> Amplitude:
        return cls("bump", center=tuple(float(c) for c in np.atleast_1d(center)), radius=float(radius))

    def __mul__(self, c: float) -> Amplitude:
        if self.kind == "constant":
            return Amplitude.constant(self.value * c)
        return Amplitude(self.kind, self.value, self.poly, self.center, self.radius, self.scale * c)

    __rmul__ = __mul__

    @property
    def dim(self) -> int | None:
        if self.kind == "polynomial":
            return self.poly.dim
        if self.kind == "bump":
            return len(self.center)
        return None

    def __call__(self, x) -> np.ndarray:
        """Evaluate at points of shape ``(N, dim)``."""
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full(x.shape[0], self.value)
        if self.kind == "polynomial":
            return self.scale * self.poly.eval(x)
        r2 = np.sum((x - np.asarray(self.center)) ** 2, axis=-1) / self.radius**2
        out = np.zeros(x.shape[0])
        inside = r2 < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
        return self.scale * out

    def sup_norm(self, domain: Domain) -> float:
        """``max |psi|`` on the domain; dense sampling for non-constant kinds."""
        if self.kind == "constant":
            return abs(self.value)
        if self.kind == "bump" and _bump_center_inside(self, domain):
            return abs(self.scale)
        n = domain.dim
        per_axis = SUP_NORM_POINTS if n <= 2 else 256
        if domain.kind == "unit_disc":
            axes = [np.linspace(-1.0, 1.0, per_axis)] * 2
        else:
            axes = [np.linspace(domain.lo, domain.hi, per_axis)] * n
        best = 0.0
        # chunk along the first axis to bound memory
        rest = np.stack([g.ravel() for g in np.meshgrid(*axes[1:], indexing="ij")], axis=-1) if n > 1 else None
        for x0 in axes[0]:
            pts = np.array([[x0]]) if rest is None else np.column_stack([np.full(rest.shape[0], x0), rest])
            if domain.kind == "unit_disc":
                pts = pts[np.sum(pts**2, axis=1) <= 1.0]
                if pts.size == 0:
                    continue
            best = max(best, float(np.max(np.abs(self(pts)))))
        return best


def _bump_center_inside(a: Amplitude, domain: Domain) -> bool:
    c = np.asarray(a.center)
    if domain.kind == "unit_disc":
        return float(np.sum(c**2)) <= 1.0
    return bool(np.all((c >= domain.lo) & (c <= domain.hi)))


@dataclass(frozen=True)
class IntegralSpec:
    """``integral over domain of E_{alpha,beta}(i P(x)) psi(x) dx``."""

    ml: MLParams
    phase: PolyPhase
    amplitude: Amplitude = field(default_factory=Amplitude.constant)
    domain: Domain = field(default_factory=Domain.unit_cube)

    def __post_init__(self) -> None:
        if self.phase.dim != self.domain.dim:
            raise DimensionMismatchError(
                f"phase has {self.phase.dim} variables but the domain is {self.domain.dim}-dimensional"
            )
        ad = self.amplitude.dim
        if ad is not None and ad != self.domain.dim:
            raise DimensionMismatchError("amplitude dimension does not match the domain")


# }}}


# {{{ box and polar integration


def initial_panels(phase: PolyPhase, dim: int, budget: int = DEFAULT_BUDGET) -> int:
    """Initial panels per axis: ``ceil((1 + |a|_nonconst)^(1/d))``, capped."""
    d = max(phase.degree, 1)
    n = math.ceil((1.0 + phase.coeff_norm("l1_nonconstant")) ** (1.0 / d) - 1e-12)
    # keep the first sweep within a quarter of the budget
    cap = int((budget / (4.0 * 15**dim)) ** (1.0 / dim))
    return max(1, min(n, MAX_PANELS_PER_AXIS, max(cap, 1)))


def _check_tol(tol: float) -> None:
    if not (math.isfinite(tol) and tol >= MIN_TOL):
        raise InvalidParameterError(f"tol must be at least {MIN_TOL:g}, got {tol}")


def _carrier(ml: MLParams | None):
    if ml is None:
        return lambda t: np.exp(1j * t)
    return lambda t: mittag_leffler(ml.alpha, ml.beta, 1j * t)


def _integrate(carrier, phase: PolyPhase, amplitude: Amplitude, domain: Domain,
               tol: float, budget: int, theta_breaks=None) -> QuadResult:
    n = initial_panels(phase, domain.dim, budget)
    if domain.kind != "unit_disc":
        edges = [np.linspace(domain.lo, domain.hi, n + 1)] * domain.dim

        def f(x):
            return carrier(phase.eval(x)) * amplitude(x)

        lo, hi = boxes_from_edges(edges)
        return adaptive_cubature(f, lo, hi, tol, budget)

    # polar coordinates: (theta, r) in [0, 2 pi] x [0, 1], Jacobian r
    breaks = sorted({0.0, 2 * math.pi, *(theta_breaks or [])})
    theta_edges = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        k = max(1, math.ceil(n * (b - a) / (2 * math.pi)))
        theta_edges.extend(np.linspace(a, b, k + 1)[:-1].tolist())
    theta_edges = np.array(theta_edges + [2 * math.pi])
    r_edges = np.linspace(0.0, 1.0, n + 1)

    def g(tr):
        th, r = tr[:, 0], tr[:, 1]
        x = np.column_stack([r * np.cos(th), r * np.sin(th)])
        return carrier(phase.eval(x)) * amplitude(x) * r

    lo, hi = boxes_from_edges([theta_edges, r_edges])
    return adaptive_cubature(g, lo, hi, tol, budget)


def _homogeneous_cubic_breaks(phase: PolyPhase) -> list[float]:
    if phase.dim != 2 or any(sum(lam) != 3 for lam in phase.coeffs):
        return []
    c = phase.coeffs
    cubic = BinaryCubic(c.get((3, 0), 0.0), c.get((2, 1), 0.0) / 3, c.get((1, 2), 0.0) / 3, c.get((0, 3), 0.0))
    return cubic.angular_zeros()


def integrate_generalized(spec: IntegralSpec, tol: float = 1e-7,
                          budget: int = DEFAULT_BUDGET) -> QuadResult:
    """``I_{alpha,beta}(a) = integral of E_{alpha,beta}(i P(a, x)) psi(x) dx``.

    Raises :class:`BudgetExceededError` (with ``.result`` holding the best
    estimate) when the evaluation budget runs out.
    """
    _check_tol(tol)
    spec.ml.check_integral()
    return _integrate(_carrier(spec.ml), spec.phase, spec.amplitude, spec.domain, tol, budget,
                      _homogeneous_cubic_breaks(spec.phase))


def integrate_classical(phase: PolyPhase, domain: Domain | None = None, tol: float = 1e-7,
                        amplitude: Amplitude | None = None,
                        budget: int = DEFAULT_BUDGET) -> QuadResult:
    """``integral of exp(i P(x)) psi(x) dx`` over the domain (default ``[0, 1]^dim``)."""
    _check_tol(tol)
    domain = domain or Domain.unit_cube(phase.dim)
    if phase.dim != domain.dim:
        raise DimensionMismatchError("phase and domain dimensions differ")
    amplitude = amplitude or Amplitude.constant()
    return _integrate(_carrier(None), phase, amplitude, domain, tol, budget,
                      _homogeneous_cubic_breaks(phase))


def integrate_cubic_J(p: float, q: float, ml: MLParams, tol: float = 1e-7,
                      budget: int = DEFAULT_BUDGET) -> QuadResult:
    """``integral over [-1, 1] of E_{alpha,beta}(i (x^3 + p x + q)) dx``."""
    spec = IntegralSpec(ml, PolyPhase.depressed_cubic(p, q), Amplitude.constant(), Domain.interval(-1.0, 1.0))
    return integrate_generalized(spec, tol, budget)


def integrate_homogeneous_cubic(c: BinaryCubic, ml: MLParams, amplitude: Amplitude | None = None,
                                tol: float = 1e-7, budget: int = DEFAULT_BUDGET) -> QuadResult:
    """Disc integral of ``E_{alpha,beta}(i P_3(x)) psi(x)`` in polar coordinates.

    The angular axis is split at the zeros of ``P_3(cos t, sin t)``.
    """
    _check_tol(tol)
    ml.check_integral()
    amplitude = amplitude or Amplitude.constant()
    return _integrate(_carrier(ml), c.to_phase(), amplitude, Domain.unit_disc(), tol, budget,
                      c.angular_zeros())


# }}}


# {{{ singular integrals


def _cubic_factor(roots):
    """``prod |x - r|^(-e_r)`` at ``x = base + off``, one factor per root."""
    def factor(base, off):
        out = np.ones_like(off)
        for r, e in roots:
            d = (base - r.real) + off
            if r.imag != 0.0:
                d = np.hypot(d, r.imag)
            else:
                d = np.abs(d)
            out = out * d ** (-e)
        return out

    return factor


def integrate_singular_result(p: float, q: float, delta: float, tol: float = 1e-10,
                              budget: int = DEFAULT_BUDGET, rel_tol: float = 0.0) -> QuadResult:
    """As :func:`integrate_singular` but returning the full :class:`QuadResult`."""
    if not 0.0 < delta < 1.0:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
    roots = cubic_roots(p, q)
    points = []
    exps = []
    for r, m in roots:
        e = m * delta
        r = complex(r)
        if r.imag == 0.0:
            x = _snap(r.real, (-1.0, 1.0))
            if -1.0 <= x <= 1.0:
                if e >= 1.0:
                    raise DivergentIntegralError(
                        f"root {x:.12g} of multiplicity {m} gives exponent {e:g} >= 1"
                    )
                points.append((x, e))
            elif abs(x) < 1.5:
                # a root just outside still makes the endpoint nearly singular
                points.append((math.copysign(1.0, x), 0.0))
            r = complex(x)
        elif abs(r.imag) < 0.5:
            points.append((min(1.0, max(-1.0, r.real)), 0.0))
        exps.append((r, e))
    res = integrate_algebraic(_cubic_factor(exps), -1.0, 1.0, points, tol, budget, rel_tol)
    return QuadResult(complex(res.value.real, 0.0), res.error_estimate, res.panels_used, res.evaluations)


def integrate_singular(p: float, q: float, delta: float, tol: float = 1e-10, rel_tol: float = 0.0) -> float:
    """``integral over [-1, 1] of |x^3 + p x + q|^(-delta) dx``.

    The error target is ``max(tol, rel_tol * |value|)`` per subinterval.
    """
    return integrate_singular_result(p, q, delta, tol, rel_tol=rel_tol).value.real


def _snap(x: float, targets, eps: float = 1e-12) -> float:
    for t in targets:
        if abs(x - t) <= eps:
            return t
    return x


def angular_J2_result(p: float, q: float, tol: float = 1e-10,
                      budget: int = DEFAULT_BUDGET) -> QuadResult:
    """As :func:`angular_J2` but returning the full :class:`QuadResult`."""
    if abs(p) > 6.0 or abs(q) > 6.0:
        warnings.warn(f"(p, q) = ({p:g}, {q:g}) lies outside |p|, |q| <= 6", stacklevel=2)
    roots = cubic_roots(p, q)
    # phi(t) = prod_j (cos t - x_j sin t); a real root x_j contributes
    # sqrt(1 + x_j^2) |sin(t - t_j)| with t_j = atan2(1, x_j) in (0, pi)
    factors = []
    points = []
    for r, m in roots:
        e = 2.0 * m / 3.0
        r = complex(r)
        if r.imag == 0.0:
            if e >= 1.0:
                raise DivergentIntegralError(
                    f"phi has a zero of multiplicity {m} at cot t = {r.real:.12g}; exponent {e:g} >= 1"
                )
            tj = math.atan2(1.0, r.real)
            points.append((tj, e))
            factors.append(("real", tj, math.sqrt(1.0 + r.real**2), e))
        else:
            if abs(r.imag) < 0.5:
                points.append((math.atan2(1.0, r.real), 0.0))
            factors.append(("complex", r, 0.0, e))

    def factor(base, off):
        out = np.ones_like(off)
        theta = base + off
        for kind, loc, amp, e in factors:
            if kind == "real":
                d = amp * np.abs(np.sin((base - loc) + off))
            else:
                d = np.abs(np.cos(theta) - loc * np.sin(theta))
            out = out * d ** (-e)
        return out

    # phi(t + pi) = -phi(t): integrate over [0, pi] and double
    res = integrate_algebraic(factor, 0.0, math.pi, points, tol / 2.0, budget)
    return QuadResult(complex(2.0 * res.value.real, 0.0), 2.0 * res.error_estimate,
                      res.panels_used, res.evaluations)


def angular_J2(p: float, q: float, tol: float = 1e-10) -> float:
    """``integral over [0, 2 pi) of |phi(cos t, sin t)|^(-2/3) dt`` with
    ``phi = cos^3 t + p cos t sin^2 t + q sin^3 t``."""
    return angular_J2_result(p, q, tol).value.real

