"""Sublevel-set measures ``|{x in [0, 1]^n : |P(x)| <= mu}|``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DerivativeConditionError, InvalidParameterError
from .polynomials import MultiIndex, PolyPhase

__all__ = [
    "CCWFit",
    "SublevelEstimate",
    "default_size",
    "derivative_lower_bound",
    "sublevel_measure",
    "verify_ccw",
]

MC_DEFAULT_SAMPLES = 1_000_000
_CHUNK = 1 << 18
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class SublevelEstimate:
    measure: float
    method: str
    resolution_or_samples: int
    ci_halfwidth: float = 0.0


def default_size(dim: int, method: str = "grid") -> int:
    if method == "monte_carlo":
        return MC_DEFAULT_SAMPLES
    return 2048 if dim <= 2 else 512


def _grid_count(P: PolyPhase, mu: float, size: int) -> int:
    n = P.dim
    centers = (np.arange(size) + 0.5) / size
    if n == 1:
        return int(np.count_nonzero(np.abs(P.eval(centers)) <= mu))
    # iterate over the leading axis, the remaining axes form one slab
    rest = np.stack([g.ravel() for g in np.meshgrid(*([centers] * (n - 1)), indexing="ij")], axis=-1)
    count = 0
    pts = np.empty((rest.shape[0], n))
    pts[:, 1:] = rest
    for x0 in centers:
        pts[:, 0] = x0
        count += int(np.count_nonzero(np.abs(P.eval(pts)) <= mu))
    return count


def _mc_points(dim: int, seed: int, start: int, count: int) -> np.ndarray:
    """Uniform points for sample indices ``[start, start + count)``.

    Chunk ``k`` of size ``_CHUNK`` always comes from the Philox stream keyed
    by ``seed`` at counter ``k``, so results do not depend on how sampling
    is scheduled.
    """
    first, last = start // _CHUNK, (start + count - 1) // _CHUNK
    blocks = []
    for k in range(first, last + 1):
        bitgen = np.random.Philox(key=seed, counter=[0, 0, k, 0])
        blocks.append(np.random.Generator(bitgen).random((_CHUNK, dim)))
    pts = np.concatenate(blocks)
    off = start - first * _CHUNK
    return pts[off:off + count]


def sublevel_measure(P: PolyPhase, mu: float, method: str = "grid", size: int | None = None,
                     seed: int = 0) -> SublevelEstimate:
    """Fraction of ``[0, 1]^n`` where ``|P| <= mu``.

    ``grid`` counts the ``size^n`` cell centers; ``monte_carlo`` averages
    ``size`` uniform samples and reports a 95% binomial half-width.
    """
    if not mu > 0.0:
        raise InvalidParameterError(f"mu must be positive, got {mu}")
    if method not in ("grid", "monte_carlo"):
        raise InvalidParameterError(f"unknown method {method!r}")
    size = default_size(P.dim, method) if size is None else int(size)
    if size < 100:
        raise InvalidParameterError("size must be at least 100")
    if method == "grid":
        hits = _grid_count(P, mu, size)
        return SublevelEstimate(hits / size**P.dim, "grid", size)
    hits = 0
    for start in range(0, size, _CHUNK):
        cnt = min(_CHUNK, size - start)
        x = _mc_points(P.dim, seed, start, cnt)
        hits += int(np.count_nonzero(np.abs(P.eval(x)) <= mu))
    m = hits / size
    half = _Z95 * math.sqrt(m * (1.0 - m) / size)
    return SublevelEstimate(m, "monte_carlo", size, half)


def derivative_lower_bound(P: PolyPhase, kappa, samples: int | None = None) -> float:
    """Minimum of ``|D^kappa P|`` over a dense lattice of ``[0, 1]^n`` (corners included)."""
    D = P.partial_derivative(kappa)
    n = P.dim
    samples = samples or {1: 100_001, 2: 1001}.get(n, 101)
    axis = np.linspace(0.0, 1.0, samples)
    pts = np.stack([g.ravel() for g in np.meshgrid(*([axis] * n), indexing="ij")], axis=-1)
    return float(np.min(np.abs(D.eval(pts))))


@dataclass(frozen=True)
class CCWFit:
    """Log-log slope of the sublevel measure and ``C_fit = max measure / mu^(1/|kappa|)``."""

    slope: float
    intercept: float
    c_fit: float
    exponent: float
    mus: tuple[float, ...]
    measures: tuple[float, ...]


def verify_ccw(P: PolyPhase, kappa: MultiIndex, mus, method: str = "grid", size: int | None = None,
               seed: int = 0, derivative_tol: float = 1e-9) -> CCWFit:
    """Check ``|D^kappa P| >= 1`` on the cube and fit the sublevel decay law.

    Raises :class:`DerivativeConditionError` if the derivative bound fails by
    more than ``derivative_tol``.
    """
    kappa = tuple(int(k) for k in kappa)
    order = sum(kappa)
    if order < 1:
        raise InvalidParameterError("|kappa| must be at least 1")
    low = derivative_lower_bound(P, kappa)
    if low < 1.0 - derivative_tol:
        raise DerivativeConditionError(
            f"min |D^{kappa} P| on the cube is {low:.6g} < 1"
        )
    mus = [float(m) for m in mus]
    if len(mus) < 2:
        raise InvalidParameterError("need at least two mu values")
    meas = [sublevel_measure(P, m, method, size, seed).measure for m in mus]
    pos = [(m, v) for m, v in zip(mus, meas) if v > 0.0]
    if len(pos) < 2:
        raise InvalidParameterError("sublevel measure vanished on the mu grid; refine the grid")
    lx = np.log([m for m, _ in pos])
    ly = np.log([v for _, v in pos])
    slope, intercept = np.polyfit(lx, ly, 1)
    e = 1.0 / order
    c_fit = max(v / m**e for m, v in zip(mus, meas))
    return CCWFit(float(slope), float(intercept), float(c_fit), e, tuple(mus), tuple(meas))
