"""Adaptive tensor-product Gauss-Kronrod (7/15) cubature on boxes.

Boxes failing their share of the tolerance are bisected along the axis with
the largest one-dimensional error indicator.  The final sum uses
``math.fsum`` over box values, so the result does not depend on the order in
which boxes were refined.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:7:2] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[9:15:2] = _WG[2::-1]

DEFAULT_BUDGET = 2_000_000


@dataclass(frozen=True)
class QuadResult:
    """Integral value, error estimate, number of final panels and evaluations."""

    value: complex
    error_estimate: float
    panels_used: int
    evaluations: int = 0

    @property
    def abs(self) -> float:
        return abs(self.value)


@dataclass
class _Rule:
    dim: int
    offsets: np.ndarray  # (m, dim) in [-1, 1]^dim
    wk: np.ndarray  # (m,)
    wg: np.ndarray  # (m,)
    wg_axis: np.ndarray  # (dim, m): Gauss along one axis, Kronrod elsewhere


_RULES: dict[int, _Rule] = {}


def _rule(dim: int) -> _Rule:
    if dim not in _RULES:
        grids = np.meshgrid(*([NODES] * dim), indexing="ij")
        offsets = np.stack([g.ravel() for g in grids], axis=-1)
        wk = np.ones(offsets.shape[0])
        wg = np.ones(offsets.shape[0])
        idx = list(itertools.product(range(15), repeat=dim))
        idx = np.array(idx).reshape(-1, dim)
        for j in range(dim):
            wk = wk * KRONROD_WEIGHTS[idx[:, j]]
            wg = wg * GAUSS_WEIGHTS[idx[:, j]]
        wg_axis = np.empty((dim, offsets.shape[0]))
        for d in range(dim):
            w = np.ones(offsets.shape[0])
            for j in range(dim):
                w = w * (GAUSS_WEIGHTS if j == d else KRONROD_WEIGHTS)[idx[:, j]]
            wg_axis[d] = w
        _RULES[dim] = _Rule(dim, offsets, wk, wg, wg_axis)
    return _RULES[dim]


def _estimate(vals: np.ndarray, wk: np.ndarray, wg: np.ndarray, vol: np.ndarray):
    """QUADPACK-style error estimate for a batch of boxes (vals: (B, m)).

    ``vol`` is the Jacobian of the map from ``[-1, 1]^dim`` to each box.
    """
    resk = vals @ wk
    resg = vals @ wg
    mean = resk / wk.sum()
    resasc = np.abs(vals - mean[:, None]) @ wk
    resabs = np.abs(vals) @ wk
    raw = np.abs(resk - resg)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(resasc > 0, (200.0 * raw / resasc) ** 1.5, 0.0)
    err = np.where(resasc > 0, resasc * np.minimum(1.0, ratio), raw)
    floor = 50.0 * np.finfo(float).eps * resabs
    err = np.maximum(err, floor)
    return resk * vol, err * vol


def adaptive_cubature(f, lo, hi, tol: float, budget: int = DEFAULT_BUDGET,
                      rel_tol: float = 0.0, min_width: float = 1e-15) -> QuadResult:
    """Integrate ``f`` over the union of boxes ``[lo_i, hi_i]``.

    ``f`` maps points of shape ``(N, dim)`` to ``N`` complex (or real) values.
    The tolerance ``tol`` is absolute and split among boxes by volume.
    """
    lo = np.atleast_2d(np.asarray(lo, dtype=float))
    hi = np.atleast_2d(np.asarray(hi, dtype=float))
    dim = lo.shape[1]
    rule = _rule(dim)
    m = rule.offsets.shape[0]
    total_vol = float(np.prod(hi - lo, axis=1).sum())
    if total_vol <= 0.0:
        return QuadResult(0j, 0.0, 1, 0)

    done_val: list[complex] = []
    done_err: list[float] = []
    evals = 0
    last_vals: list[complex] = []
    last_errs: list[float] = []
    pend_lo, pend_hi = lo, hi
    while True:
        nb = pend_lo.shape[0]
        if evals + nb * m > budget:
            # best estimate: accepted boxes plus the parents of pending ones
            val = _fsum_complex(done_val + last_vals)
            err = math.fsum(done_err + last_errs)
            raise BudgetExceededError(
                f"evaluation budget of {budget} exhausted (error estimate {err:.3g})",
                QuadResult(val, err, len(done_val) + len(last_vals), evals),
            )
        half = (pend_hi - pend_lo) / 2.0
        center = (pend_hi + pend_lo) / 2.0
        pts = center[:, None, :] + half[:, None, :] * rule.offsets[None, :, :]
        vals = np.asarray(f(pts.reshape(-1, dim)), dtype=complex).reshape(nb, m)
        evals += nb * m
        jac = np.prod(half, axis=1)
        value, err = _estimate(vals, rule.wk, rule.wg, jac)
        vol = np.prod(2.0 * half, axis=1)

        running = _fsum_complex(done_val + list(value))
        allowed = max(tol, rel_tol * abs(running)) * vol / total_vol
        width = np.max(2.0 * half, axis=1)
        accept = (err <= allowed) | (width <= min_width)
        if math.fsum(done_err) + float(err.sum()) <= max(tol, rel_tol * abs(running)):
            accept[:] = True
        done_val.extend(value[accept].tolist())
        done_err.extend(err[accept].tolist())
        if accept.all():
            return QuadResult(_fsum_complex(done_val), math.fsum(done_err), len(done_val), evals)

        split = ~accept
        last_vals = list(value[split])
        last_errs = list(err[split])
        # split axis from one-dimensional Gauss/Kronrod differences
        axis_err = np.abs(vals[split] @ rule.wk[:, None] - vals[split] @ rule.wg_axis.T)
        axis = np.argmax(axis_err * (2.0 * half[split]), axis=1)
        slo, shi = pend_lo[split], pend_hi[split]
        mid = (slo + shi) / 2.0
        rows = np.arange(slo.shape[0])
        left_hi = shi.copy()
        left_hi[rows, axis] = mid[rows, axis]
        right_lo = slo.copy()
        right_lo[rows, axis] = mid[rows, axis]
        pend_lo = np.concatenate([slo, right_lo])
        pend_hi = np.concatenate([left_hi, shi])


def _fsum_complex(values) -> complex:
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def uniform_boxes(lo, hi, counts) -> tuple[np.ndarray, np.ndarray]:
    """Split the box ``[lo, hi]`` into ``counts[j]`` equal panels along axis j."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    edges = [np.linspace(lo[j], hi[j], int(counts[j]) + 1) for j in range(lo.size)]
    return boxes_from_edges(edges)


def boxes_from_edges(edges) -> tuple[np.ndarray, np.ndarray]:
    """Tensor-product boxes from per-axis breakpoint arrays."""
    los = [e[:-1] for e in edges]
    his = [e[1:] for e in edges]
    glo = np.meshgrid(*los, indexing="ij")
    ghi = np.meshgrid(*his, indexing="ij")
    return (np.stack([g.ravel() for g in glo], axis=-1),
            np.stack([g.ravel() for g in ghi], axis=-1))


def geometric_edges(a: float, b: float, toward: str = "a", ratio: float = 0.5,
                    min_width: float = 1e-14) -> np.ndarray:
    """Breakpoints on ``[a, b]`` graded geometrically toward one end."""
    length = b - a
    fr = [1.0]
    while fr[-1] * length > min_width and len(fr) < 200:
        fr.append(fr[-1] * ratio)
    fr = np.array(fr[::-1])
    if toward == "a":
        return np.concatenate([[a], a + fr * length])
    return np.concatenate([[a], b - fr[::-1][1:] * length, [b]])
