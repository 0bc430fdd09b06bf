"""Gamma and two-parameter Mittag-Leffler functions.

``mittag_leffler`` dispatches on ``s = |z|**(1/alpha)``, which controls both
the size of the largest Taylor term (about ``e**s``) and the accuracy of the
large-argument expansion (about ``e**-s``):

* ``s <= 6``: Taylor series in float64,
* ``6 < s <= 40``: Taylor series in double-double arithmetic with
  coefficients ``1/Gamma(alpha*k + beta)`` computed once to 40 digits,
* ``s > 40``: exponential (residue) terms plus the algebraic expansion
  ``-sum_k z**-k / Gamma(beta - alpha*k)`` truncated at its smallest term.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _dd
from .errors import (
    InvalidParameterError,
    NonConvergenceError,
    PoleError,
    SectorViolationError,
)

__all__ = [
    "MLParams",
    "gamma",
    "rgamma",
    "mittag_leffler",
    "ml_decay_ratio",
]

# Lanczos approximation, g = 607/128, 15 terms (Godfrey).  Relative error
# below 2e-15 on [0.5, 171].
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_GAMMA_MAX = 171.6243769563027

SERIES_DOUBLE_LIMIT = 6.0
SERIES_DD_LIMIT = 40.0
MAX_TERMS = 10_000
_POLE_EPS = 1e-8
_LOG_MAX = math.log(np.finfo(float).max)


def _is_nonpositive_integer(x: float, eps: float = 0.0) -> bool:
    return x <= eps and abs(x - round(x)) <= eps


def _lanczos(x: float) -> float:
    # valid for x >= 0.5
    x -= 1.0
    acc = _LANCZOS_C[0]
    for i in range(1, len(_LANCZOS_C)):
        acc += _LANCZOS_C[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    h = t ** ((x + 0.5) / 2.0)
    return _SQRT_2PI * h * math.exp(-t) * h * acc


def gamma(x: float) -> float:
    """Gamma function for real ``x``; negative non-integers use reflection.

    Raises :class:`PoleError` at ``0, -1, -2, ...`` and :class:`OverflowError`
    above ``x ~ 171.62``.
    """
    x = float(x)
    if not math.isfinite(x):
        raise InvalidParameterError(f"gamma argument must be finite, got {x}")
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at {x}")
    if x > _GAMMA_MAX:
        raise OverflowError(f"gamma({x}) exceeds the float64 range")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    if x == round(x) and x <= 23:
        return float(math.factorial(int(x) - 1))
    return _lanczos(x)


def rgamma(x: float) -> float:
    """``1/Gamma(x)``; zero at the poles, also for huge ``x``."""
    x = float(x)
    if _is_nonpositive_integer(x):
        return 0.0
    if x > _GAMMA_MAX:
        return 0.0 if x > 200 else math.exp(-math.lgamma(x))
    if x < 0.5:
        # 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi, finite for all x < 0.5
        if 1.0 - x > _GAMMA_MAX:
            sgn = math.copysign(1.0, math.sin(math.pi * x))
            return sgn * math.exp(math.log(abs(math.sin(math.pi * x))) + math.lgamma(1.0 - x)) / math.pi
        return math.sin(math.pi * x) * gamma(1.0 - x) / math.pi
    return 1.0 / gamma(x)


@dataclass(frozen=True)
class MLParams:
    """Parameters ``(alpha, beta)`` of ``E_{alpha,beta}``.

    ``0 < alpha < 2`` and ``beta > 0`` are enforced here; integral code further
    requires ``alpha <= 1`` via :meth:`check_integral`.
    """

    alpha: float
    beta: float = 1.0

    def __post_init__(self) -> None:
        a, b = float(self.alpha), float(self.beta)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidParameterError("alpha and beta must be finite")
        if not 0.0 < a < 2.0:
            raise InvalidParameterError(f"alpha must lie in (0, 2), got {a}")
        if not b > 0.0:
            raise InvalidParameterError(f"beta must be positive, got {b}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def check_integral(self, allow_classical: bool = True) -> None:
        """Reject ``alpha >= 1`` except the classical pair ``alpha = beta = 1``."""
        if self.alpha < 1.0:
            return
        if allow_classical and self.alpha == 1.0 and self.beta == 1.0:
            return
        raise InvalidParameterError(
            f"integrals need 0 < alpha < 1 (or alpha = beta = 1), got alpha={self.alpha}"
        )

    def __call__(self, z):
        return mittag_leffler(self.alpha, self.beta, z)


# {{{ Taylor series


def _series_terms_needed(alpha: float, beta: float, radius: float, drop: float) -> int:
    """Smallest K such that the tail after K terms is below ``e**-drop`` of
    both the peak term and unity, at ``|z| = radius``."""
    if radius <= 0.0:
        return 1
    lr = math.log(radius)
    peak = -math.inf
    prev = math.inf
    for k in range(MAX_TERMS):
        lt = k * lr - math.lgamma(alpha * k + beta)
        peak = max(peak, lt)
        if lt < prev and lt < min(peak - drop, -drop):
            return k + 1
        prev = lt
    raise NonConvergenceError(
        f"Taylor series for alpha={alpha}, beta={beta}, |z|={radius} "
        f"needs more than {MAX_TERMS} terms"
    )


@lru_cache(maxsize=64)
def _series_coefficients(alpha: float, beta: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Double-double coefficients ``1/Gamma(alpha*k + beta)``, k < n."""
    import mpmath

    with mpmath.workdps(40):
        a = mpmath.mpf(alpha)
        b = mpmath.mpf(beta)
        hi = np.empty(n)
        lo = np.empty(n)
        for k in range(n):
            c = mpmath.rgamma(a * k + b)
            h = float(c)
            hi[k] = h
            lo[k] = float(c - h)
    return hi, lo


def _bucket(n: int) -> int:
    return 1 << max(4, (n - 1).bit_length())


def _series(alpha: float, beta: float, z: np.ndarray, double_double: bool) -> np.ndarray:
    radius = float(np.max(np.abs(z)))
    n = _series_terms_needed(alpha, beta, radius, 80.0 if double_double else 40.0)
    hi, lo = _series_coefficients(alpha, beta, _bucket(n))
    if double_double:
        return _dd.complex_horner(hi[:n], lo[:n], z.real.copy(), z.imag.copy())
    acc = np.full(z.shape, hi[n - 1], dtype=complex)
    for k in range(n - 2, -1, -1):
        acc = acc * z + hi[k]
    return acc


# }}}


# {{{ large-argument expansion


def _exponential_part(alpha: float, beta: float, z: np.ndarray) -> np.ndarray:
    """Residue terms ``(1/alpha) w**(1-beta) exp(w)``, ``w = (z e^{2 pi i m})**(1/alpha)``."""
    out = np.zeros(z.shape, dtype=complex)
    r = np.abs(z)
    arg = np.angle(z)
    lw = np.log(r) / alpha
    for m in (-1, 0, 1):
        ang = arg + 2.0 * np.pi * m
        lim = alpha * np.pi
        mask = np.abs(ang) <= lim if m == 0 else np.abs(ang) < lim
        if not np.any(mask):
            continue
        th = ang[mask] / alpha
        mod = np.exp(lw[mask])
        log_mag = mod * np.cos(th) + (1.0 - beta) * lw[mask]
        phase = mod * np.sin(th) + (1.0 - beta) * th
        if np.any(log_mag - math.log(alpha) > _LOG_MAX):
            raise OverflowError("Mittag-Leffler value exceeds the float64 range")
        with np.errstate(over="ignore", under="ignore"):
            out[mask] += np.exp(log_mag) * np.exp(1j * phase) / alpha
    return out


def _asymptotic(alpha: float, beta: float, z: np.ndarray) -> np.ndarray:
    acc = _exponential_part(alpha, beta, z)
    r = np.abs(z)
    lr = np.log(r)
    zinv = 1.0 / z
    zpow = np.ones(z.shape, dtype=complex)
    active = np.ones(z.shape, dtype=bool)
    prev_bound = np.full(z.shape, np.inf)
    for k in range(1, MAX_TERMS + 1):
        x = beta - alpha * k
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            return acc
        # smooth envelope of |1/Gamma(x)|: Gamma(1 - x)/pi below 1/2, exact above
        if x <= 0.5:
            lb = math.lgamma(1.0 - x) - math.log(math.pi)
            if lb > _LOG_MAX:
                # coefficients past this point are not representable; every
                # remaining argument has long since passed its smallest term
                return acc
        coef = 0.0 if _is_nonpositive_integer(x, _POLE_EPS) else rgamma(x)
        if x > 0.5:
            lb = math.log(abs(coef))
        zpow[idx] *= zinv[idx]
        bound = np.exp(lb - k * lr[idx])
        growing = bound > prev_bound[idx]
        idx_add = idx[~growing]
        if coef:
            acc[idx_add] -= coef * zpow[idx_add]
        prev_bound[idx] = bound
        done = growing | (bound < 1e-17 * np.abs(acc[idx])) | (bound < 1e-300)
        active[idx[done]] = False
    if np.any(active):
        raise NonConvergenceError("large-argument expansion did not terminate")
    return acc


# }}}


def _validate(alpha: float, beta: float) -> None:
    MLParams(alpha, beta)


def mittag_leffler(alpha: float, beta: float, z):
    """Two-parameter Mittag-Leffler function ``sum_k z**k / Gamma(alpha k + beta)``.

    Accepts a scalar or an array of complex arguments.  Scalars return a Python
    ``complex``; arrays return a complex128 array of the same shape.
    """
    _validate(alpha, beta)
    alpha, beta = float(alpha), float(beta)
    scalar = np.ndim(z) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if not np.all(np.isfinite(zz)):
        raise InvalidParameterError("Mittag-Leffler argument must be finite")
    out = np.empty(zz.shape, dtype=complex)
    r = np.abs(zz)
    with np.errstate(divide="ignore"):
        s = r ** (1.0 / alpha)
    zero = r == 0.0
    out[zero] = rgamma(beta)
    small = ~zero & (s <= SERIES_DOUBLE_LIMIT)
    if np.any(small):
        out[small] = _series(alpha, beta, zz[small], double_double=False)
    # double-double bands keep the term count proportional to the band radius
    edges = (SERIES_DOUBLE_LIMIT, 12.0, 20.0, 28.0, SERIES_DD_LIMIT)
    for lo_s, hi_s in zip(edges[:-1], edges[1:]):
        band = (s > lo_s) & (s <= hi_s)
        if np.any(band):
            out[band] = _series(alpha, beta, zz[band], double_double=True)
    large = s > SERIES_DD_LIMIT
    if np.any(large):
        out[large] = _asymptotic(alpha, beta, zz[large])
    if scalar:
        return complex(out[0])
    return out.reshape(np.shape(z))


def ml_decay_ratio(alpha: float, beta: float, z: complex) -> float:
    """``|E_{alpha,beta}(z)| * (1 + |z|)`` inside the decay sector.

    The sector is ``pi*alpha/2 < |arg z| <= pi``; its boundary counts as a
    violation.  ``z = 0`` is accepted.
    """
    z = complex(z)
    if z != 0 and abs(cmath.phase(z)) <= math.pi * alpha / 2.0:
        raise SectorViolationError(
            f"|arg z| = {abs(cmath.phase(z)):.6g} is not above pi*alpha/2 = {math.pi * alpha / 2:.6g}"
        )
    return abs(mittag_leffler(alpha, beta, z)) * (1.0 + abs(z))
