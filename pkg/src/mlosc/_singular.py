"""One-dimensional integrals with algebraic endpoint singularities.

Near a point ``s`` where the integrand behaves like ``|x - s|^(-e)`` with
``0 < e < 1`` the substitution ``x = s +/- L w^g``, ``g = 1/(1 - e)`` makes the
transformed integrand bounded.  The ``w`` interval is additionally graded
geometrically toward ``w = 0`` (ratio 1/2 down to 1e-14) before adaptive
refinement.  Points with ``e == 0`` mark sharp but finite peaks; they are only
used as breakpoints with graded meshes.

The integrand is supplied as ``factor(base, off)`` and evaluated at
``x = base + off``.  ``base`` is always a breakpoint, so a factor of the form
``|(base - s) + off|`` is computed without cancellation when ``base == s``.
"""

from __future__ import annotations

import math

import numpy as np

from ._adaptive import DEFAULT_BUDGET, QuadResult, adaptive_cubature, geometric_edges
from .errors import BudgetExceededError

GRADING_RATIO = 0.5
GRADING_DEPTH = 1e-14


def _piece(factor, base: float, length: float, sign: float, exponent: float | None,
           tol: float, budget: int, rel_tol: float = 0.0) -> QuadResult:
    """Integrate over ``base + sign * [0, length]``; ``exponent`` None means no grading."""
    if exponent is None:
        def g(w):
            off = sign * length * w[:, 0]
            return factor(base, off) * length

        return adaptive_cubature(g, [[0.0]], [[1.0]], tol, budget, rel_tol)

    gam = 1.0 / (1.0 - exponent)

    def g(w):
        w = w[:, 0]
        off = sign * length * w**gam
        with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
            vals = factor(base, off) * (length * gam) * w ** (gam - 1.0)
        # underflowed offsets (w**gam == 0) sit on a region of width < 1e-16
        return np.where(np.isfinite(vals), vals, 0.0)

    edges = geometric_edges(0.0, 1.0, toward="a", ratio=GRADING_RATIO, min_width=GRADING_DEPTH)
    return adaptive_cubature(g, edges[:-1, None], edges[1:, None], tol, budget, rel_tol)


def integrate_algebraic(factor, a: float, b: float, points, tol: float,
                        budget: int = DEFAULT_BUDGET, rel_tol: float = 0.0) -> QuadResult:
    """Integrate over ``[a, b]`` given special points ``[(s, e), ...]``.

    ``e > 0`` is the local singular exponent at ``s``, ``e == 0`` marks a
    peak.  Points outside ``[a, b]`` are ignored; the endpoints may be special.
    ``rel_tol`` applies to each piece separately.
    """
    special: dict[float, float] = {}
    for s, e in points:
        if a <= s <= b:
            special[s] = max(special.get(s, 0.0), e)
    breaks = sorted({a, b, *special})
    pieces = []  # (base, length, sign, exponent-or-None)
    for u, v in zip(breaks[:-1], breaks[1:]):
        su, sv = u in special, v in special
        if su and sv:
            m = 0.5 * (u + v)
            pieces.append((u, m - u, 1.0, special[u]))
            pieces.append((v, v - m, -1.0, special[v]))
        elif su:
            pieces.append((u, v - u, 1.0, special[u]))
        elif sv:
            pieces.append((v, v - u, -1.0, special[v]))
        else:
            pieces.append((u, v - u, 1.0, None))
    share = tol / len(pieces)
    total = 0j
    err = 0.0
    panels = 0
    evals = 0
    for base, length, sign, e in pieces:
        if length <= 0.0:
            continue
        try:
            r = _piece(factor, base, length, sign, e, share, max(budget - evals, 1), rel_tol)
        except BudgetExceededError as exc:
            best = exc.result
            raise BudgetExceededError(
                str(exc),
                QuadResult(total + best.value, err + best.error_estimate,
                           panels + best.panels_used, evals + best.evaluations),
            ) from None
        total += r.value
        err += r.error_estimate
        panels += r.panels_used
        evals += r.evaluations
    return QuadResult(total, err, max(panels, 1), evals)


def snap(x: float, targets, tol: float = 1e-12) -> float:
    for t in targets:
        if abs(x - t) <= tol * max(1.0, abs(t)):
            return t
    return x


def near_axis(z: complex, width: float) -> bool:
    return abs(z.imag) <= width and not math.isnan(z.real)
