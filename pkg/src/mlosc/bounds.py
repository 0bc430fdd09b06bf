"""Parameter sweeps that compare measured quantities with the right-hand
sides of decay estimates.

Every ``verify_*`` function evaluates its sweep twice: on the requested grid
and on a nested grid with midpoints inserted.  The reported rows come from
the requested grid; the refined grid only feeds the stability verdict.  A
report is ``bounded`` when ``c_fit`` moves by less than ``DRIFT_LIMIT``
under refinement and no approach family shows a growing running maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CaseRoutingError,
    DerivativeConditionError,
    InsufficientPointsError,
    InvalidParameterError,
    NonPositiveValueError,
    PreconditionError,
    ZeroDiscriminantError,
)
from .polynomials import BinaryCubic, PolyPhase, binary_discriminant, depressed_discriminant
from .quadrature import (
    Amplitude,
    Domain,
    IntegralSpec,
    angular_J2,
    integrate_generalized,
    integrate_homogeneous_cubic,
    integrate_singular,
)
from .special_functions import MLParams, ml_decay_ratio
from .sublevel import default_size, derivative_lower_bound, sublevel_measure

__all__ = [
    "BOUNDED",
    "UNSTABLE",
    "VIOLATED",
    "BoundReport",
    "BoundRow",
    "FitResult",
    "fit_decay",
    "log_grid",
    "refine_grid",
    "verify_cor1",
    "verify_lemma1",
    "verify_lemma2",
    "verify_prop1",
    "verify_thm1",
    "verify_theorem2",
    "verify_theorem3",
    "verify_theorem4",
]

BOUNDED = "bounded"
UNSTABLE = "unstable"
VIOLATED = "violated_preconditions"

DRIFT_LIMIT = 0.2
GROWTH_LIMIT = 0.1
DEFAULT_POINTS = 24
DEFAULT_TOL = 1e-7


# {{{ fitting


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float


def fit_decay(points) -> FitResult:
    """Least squares line through ``(log t, log v)``."""
    pts = [(float(t), float(v)) for t, v in points]
    if len(pts) < 3:
        raise InsufficientPointsError(f"need at least 3 points, got {len(pts)}")
    if any(not (t > 0 and v > 0) for t, v in pts):
        raise NonPositiveValueError("fit_decay needs strictly positive t and v")
    x = np.log([t for t, _ in pts])
    y = np.log([v for _, v in pts])
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return FitResult(float(slope), float(intercept), float(min(1.0, max(0.0, r2))))


# }}}


# {{{ grids


def log_grid(lo: float, hi: float, n: int = DEFAULT_POINTS) -> list[float]:
    return [float(v) for v in np.geomspace(lo, hi, n)]


def refine_grid(values, geometric: bool = True) -> list[float]:
    """Insert midpoints (geometric or arithmetic) between consecutive values."""
    vals = sorted(float(v) for v in values)
    out = [vals[0]]
    for a, b in zip(vals[:-1], vals[1:]):
        mid = math.sqrt(a * b) if geometric and a > 0 and b > 0 else 0.5 * (a + b)
        out.extend([mid, b])
    return out


# }}}


# {{{ reports


@dataclass(frozen=True)
class BoundRow:
    """One sweep point.  ``ratio`` is NaN for flagged rows."""

    params: tuple[tuple[str, object], ...]
    measured: float
    rhs: float
    ratio: float
    flag: str = ""
    extra: tuple[tuple[str, float], ...] = ()

    def param(self, name: str):
        return dict(self.params)[name]


@dataclass(frozen=True)
class BoundReport:
    theorem_id: str
    rows: tuple[BoundRow, ...]
    c_fit: float
    slope_fit: float | None
    verdict: str
    c_fit_refined: float = math.nan
    drift: float = math.nan
    growth: tuple[tuple[str, float], ...] = ()
    notes: tuple[tuple[str, object], ...] = field(default=())

    @property
    def param_names(self) -> list[str]:
        names: list[str] = []
        for row in self.rows:
            for k, _ in row.params:
                if k not in names:
                    names.append(k)
        return names

    @property
    def extra_names(self) -> list[str]:
        names: list[str] = []
        for row in self.rows:
            for k, _ in row.extra:
                if k not in names:
                    names.append(k)
        return names

    def note(self, key: str, default=None):
        return dict(self.notes).get(key, default)

    def ratios(self) -> list[float]:
        return [r.ratio for r in self.rows if math.isfinite(r.ratio)]


def _row(params: dict, measured: float, rhs: float, flag: str = "", extra: dict | None = None) -> BoundRow:
    ratio = measured / rhs if not flag and rhs > 0 and math.isfinite(rhs) else math.nan
    if flag:
        ratio = math.nan
    return BoundRow(tuple(params.items()), float(measured), float(rhs), float(ratio), flag,
                    tuple((extra or {}).items()))


def _max_ratio(rows) -> float:
    vals = [r.ratio for r in rows if math.isfinite(r.ratio)]
    if not vals:
        raise PreconditionError("no admissible rows in the sweep")
    return max(vals)


def running_max_slope(pairs) -> float:
    """Log-log slope of the running maximum over the tail half of a family.

    ``pairs`` are ``(s, ratio)`` with ``s`` increasing toward the limit.
    """
    pairs = sorted((s, r) for s, r in pairs if s > 0 and math.isfinite(r))
    if len(pairs) < 3:
        return 0.0
    best = []
    m = 0.0
    for s, r in pairs:
        m = max(m, r)
        best.append((s, m))
    tail = best[len(best) // 2:]
    if len(tail) < 3:
        tail = best[-3:]
    if any(v <= 0 for _, v in tail):
        return 0.0
    return fit_decay(tail).slope


def _finish(theorem_id: str, rows, refined_rows, families=None, slope_fit=None, notes=None) -> BoundReport:
    c = _max_ratio(rows)
    c_ref = _max_ratio(refined_rows)
    drift = abs(c_ref - c) / c if c > 0 else (0.0 if c_ref == 0 else math.inf)
    growth = []
    for name, selector in (families or {}).items():
        pairs = [(s, r.ratio) for r in refined_rows for s in [selector(r)] if s is not None]
        growth.append((name, running_max_slope(pairs)))
    ok = drift < DRIFT_LIMIT and all(g <= GROWTH_LIMIT for _, g in growth)
    return BoundReport(theorem_id, tuple(rows), c, slope_fit, BOUNDED if ok else UNSTABLE,
                       c_ref, drift, tuple(growth), tuple((notes or {}).items()))


class _Memo:
    """Evaluate rows once per parameter key; coarse grids are subsets of refined ones."""

    def __init__(self, fn):
        self.fn = fn
        self.cache: dict = {}

    def __call__(self, *key):
        if key not in self.cache:
            self.cache[key] = self.fn(*key)
        return self.cache[key]


# }}}


# {{{ Mittag-Leffler decay


def verify_prop1(ml_grid=None, ts=None, include_zero: bool = True) -> BoundReport:
    """``|E_{alpha,beta}(i t)| (1 + |t|)`` over parameter pairs and ``t``."""
    if ml_grid is None:
        ml_grid = [(a, b) for a in (0.3, 0.5, 0.7, 0.9) for b in (0.5, 1.0, 1.5)]
    ts = log_grid(1.0, 1e6) if ts is None else [float(t) for t in ts]

    def row(a, b, t):
        r = ml_decay_ratio(a, b, 1j * t)
        return _row({"alpha": a, "beta": b, "t": t}, r / (1.0 + t), 1.0 / (1.0 + t))

    memo = _Memo(row)
    params = [MLParams(a, b) for a, b in ml_grid]

    def sweep(tgrid):
        out = []
        for p in params:
            if include_zero:
                out.append(memo(p.alpha, p.beta, 0.0))
            out.extend(memo(p.alpha, p.beta, t) for t in tgrid)
        return out

    rows = sweep(ts)
    fams = {
        f"alpha={p.alpha:g},beta={p.beta:g}": (
            lambda r, p=p: r.param("t") if (r.param("alpha"), r.param("beta")) == (p.alpha, p.beta) else None
        )
        for p in params
    }
    return _finish("prop1", rows, sweep(refine_grid(ts)), fams)


# }}}


# {{{ sublevel sets


def verify_thm1(P: PolyPhase, kappa, mus=None, method: str = "grid", size: int | None = None,
                seed: int = 0) -> BoundReport:
    """Sublevel measure against ``mu^(1/|kappa|)``; requires ``|D^kappa P| >= 1``."""
    kappa = tuple(int(k) for k in kappa)
    order = sum(kappa)
    if order < 1:
        raise InvalidParameterError("|kappa| must be at least 1")
    low = derivative_lower_bound(P, kappa)
    if low < 1.0 - 1e-9:
        raise DerivativeConditionError(f"min |D^{kappa} P| on the cube is {low:.6g} < 1")
    mus = log_grid(1e-4, 1e-1) if mus is None else [float(m) for m in mus]
    e = 1.0 / order

    def row(mu, sz):
        m = sublevel_measure(P, mu, method, sz, seed).measure
        return _row({"mu": mu}, m, mu**e)

    memo = _Memo(row)
    base = size or default_size(P.dim, method)
    rows = [memo(m, base) for m in mus]
    refined = [memo(m, 2 * base if method == "grid" else base) for m in refine_grid(mus)]
    pos = [(r.param("mu"), r.measured) for r in rows if r.measured > 0]
    slope = fit_decay(pos).slope if len(pos) >= 3 else None
    return _finish("thm1", rows, refined, None, slope,
                   {"kappa": "-".join(map(str, kappa)), "exponent": e, "method": method, "size": base})


# }}}


# {{{ oscillatory integrals


def _abs_integral(ml: MLParams, phase: PolyPhase, amplitude: Amplitude, tol: float) -> float:
    spec = IntegralSpec(ml, phase, amplitude, Domain.unit_cube(phase.dim))
    return abs(integrate_generalized(spec, tol).value)


def verify_cor1(phase: PolyPhase | None = None, mus=None, tol: float = DEFAULT_TOL) -> BoundReport:
    """Classical integrals ``|int exp(i mu P)|`` against ``mu^(-1/d)``."""
    phase = phase or PolyPhase.monomial((1,))
    d = max(phase.degree, 1)
    mus = log_grid(1.0, 1e3) if mus is None else [float(m) for m in mus]
    one = MLParams(1.0, 1.0)
    memo = _Memo(lambda mu: _row({"mu": mu}, _abs_integral(one, phase * mu, Amplitude.constant(), tol),
                                 mu ** (-1.0 / d)))
    rows = [memo(m) for m in mus]
    refined = [memo(m) for m in refine_grid(mus)]
    return _finish("cor1", rows, refined, {"ray": lambda r: r.param("mu")},
                   notes={"phase": phase.to_expression(), "exponent": 1.0 / d})


def verify_lemma1(a0: PolyPhase, kappa, ml: MLParams, mus=None, amplitude: Amplitude | None = None,
                  tol: float = DEFAULT_TOL) -> BoundReport:
    """``|I_{alpha,beta}(mu a0)|`` against ``mu^(-1/|kappa|)`` for a unit-norm ``a0``."""
    ml.check_integral()
    kappa = tuple(int(k) for k in kappa)
    order = sum(kappa)
    norm = a0.coeff_norm("l1_all")
    if abs(norm - 1.0) > 1e-12:
        raise PreconditionError(f"a0 must have unit l1 norm, got {norm:.15g}")
    if order < 2:
        raise PreconditionError("|kappa| must be at least 2")
    low = derivative_lower_bound(a0, kappa)
    if not low > 0.0:
        raise DerivativeConditionError(f"D^{kappa} a0 vanishes on the cube")
    amplitude = amplitude or Amplitude.constant()
    mus = log_grid(10.0, 1e5) if mus is None else [float(m) for m in mus]
    e = 1.0 / order
    memo = _Memo(lambda mu: _row({"mu": mu}, _abs_integral(ml, a0 * mu, amplitude, tol), mu ** (-e)))
    rows = [memo(m) for m in mus]
    refined = [memo(m) for m in refine_grid(mus)]
    slope = fit_decay([(r.param("mu"), r.measured) for r in rows]).slope
    return _finish("lem1", rows, refined, {"ray": lambda r: r.param("mu")}, slope,
                   {"phase": a0.to_expression(), "kappa": "-".join(map(str, kappa)), "exponent": e,
                    "alpha": ml.alpha, "beta": ml.beta, "delta_min": low})


def verify_theorem2(d: int, n: int, ml: MLParams, amplitude: Amplitude | None = None,
                    families=None, mus=None, tol: float = DEFAULT_TOL) -> BoundReport:
    """Rays ``mu * a`` with both candidate exponents.

    ``ratio`` uses ``|a|^(1/d)``; the ``ratio_inv_alpha`` column uses
    ``|a|^(1/alpha)``.  Notes record the growth of both along each ray.
    """
    ml.check_integral()
    if d < 1 or n < 1:
        raise InvalidParameterError("d and n must be positive")
    amplitude = amplitude or Amplitude.constant()
    if families is None:
        families = [PolyPhase(n, {tuple(d if j == i else 0 for j in range(n)): 1.0 / n for i in range(n)})]
    for fam in families:
        if fam.dim != n or fam.degree > d:
            raise InvalidParameterError("family does not match (d, n)")
    mus = log_grid(10.0, 1e4) if mus is None else [float(m) for m in mus]

    def row(k, mu):
        phase = families[k] * mu
        norm = phase.coeff_norm("l1_all")
        val = _abs_integral(ml, phase, amplitude, tol)
        return _row({"family": k, "mu": mu, "norm": norm}, val, norm ** (-1.0 / d),
                    extra={"ratio_inv_alpha": val * norm ** (1.0 / ml.alpha)})

    memo = _Memo(row)

    def sweep(grid):
        return [memo(k, m) for k in range(len(families)) for m in grid]

    rows = sweep(mus)
    refined = sweep(refine_grid(mus))
    notes: dict[str, object] = {"d": d, "n": n, "alpha": ml.alpha, "beta": ml.beta}
    alpha_ok = True
    for k in range(len(families)):
        seq = [dict(r.extra)["ratio_inv_alpha"] for r in rows if r.param("family") == k]
        growth = seq[-1] / seq[0] if seq[0] > 0 else math.inf
        mono = all(b >= a for a, b in zip(seq[:-1], seq[1:]))
        notes[f"family{k}"] = families[k].to_expression()
        notes[f"family{k}_inv_alpha_growth"] = growth
        notes[f"family{k}_inv_alpha_monotone"] = mono
        alpha_ok = alpha_ok and not (mono and growth >= 10.0)
    notes["c_fit_inv_alpha"] = max(dict(r.extra)["ratio_inv_alpha"] for r in rows)
    fams = {f"family{k}": (lambda r, k=k: r.param("mu") if r.param("family") == k else None)
            for k in range(len(families))}
    slope = None
    if len(families) == 1:
        slope = fit_decay([(r.param("mu"), r.measured) for r in rows if r.measured > 0]).slope
    report = _finish("thm2", rows, refined, fams, slope, notes)
    inv_d_ok = report.verdict == BOUNDED
    label = {(True, True): "both", (True, False): "1/d", (False, True): "1/alpha", (False, False): "none"}
    notes["bounded_exponent"] = label[(inv_d_ok, alpha_ok)]
    return _finish("thm2", rows, refined, fams, slope, notes)


# }}}


# {{{ cubic estimates


def theorem3_rhs(p: float, q: float, delta: float) -> float:
    """Right-hand side without the constant for the case ``delta`` falls in."""
    h = abs(p) ** 3 / 27.0 + q * q / 4.0
    if 1.0 / 3.0 <= delta <= 0.5:
        return h ** (-(3.0 * delta - 1.0) / 6.0)
    D = depressed_discriminant(p, q).discriminant
    if D == 0.0:
        return math.inf
    return 1.0 / (abs(D) ** (delta - 0.5) * h ** ((2.0 - 3.0 * delta) / 6.0))


def theorem3_case(delta: float) -> str:
    if 1.0 / 3.0 <= delta <= 0.5:
        return "thm3_case1"
    if 0.5 < delta < 1.0:
        return "thm3_case2"
    raise CaseRoutingError(f"delta = {delta} lies outside [1/3, 1); no estimate case applies")


def _grid_values(n: int, scale: float) -> list[float]:
    return [float(v) for v in np.linspace(-scale, scale, n)]


ORIGIN_SHAPES = ((-1.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-3.0, 1.5))


def verify_theorem3(deltas=(0.45, 0.75), grid: int = 9, scale: float = 6.0, ts=None, eps=None,
                    lams=None, tol: float = 1e-10, rel_tol: float = 1e-10) -> list[BoundReport]:
    """One report per ``delta``; measured ``J(p, q) = int |x^3 + p x + q|^(-delta)``.

    Rows: the ``grid x grid`` lattice on ``[-scale, scale]^2`` without the
    origin; the exact degenerate family ``p = -3 t^2, q = 2 t^3``; its
    approach ``q = 2 t^3 + eps``; and scalings ``(lam^2 p0, lam^3 q0)`` of a
    few shapes toward the excluded origin, where both sides scale alike.
    Divergent exact-family rows are flagged.
    """
    cases = [(float(dl), theorem3_case(float(dl))) for dl in deltas]
    ts = [float(t) for t in np.linspace(0.1, 1.0, 10)] if ts is None else [float(t) for t in ts]
    eps = log_grid(1e-1, 1e-8, 8) if eps is None else [float(e) for e in eps]
    lams = log_grid(1.0, 1e-4, 9) if lams is None else [float(v) for v in lams]
    approach_t = (0.5, 1.0)
    reports = []
    for delta, case in cases:
        def row(family, p, q, t, e, delta=delta):
            params = {"family": family, "p": p, "q": q, "t": t, "eps": e}
            rhs = theorem3_rhs(p, q, delta)
            try:
                val = integrate_singular(p, q, delta, tol, rel_tol)
            except ArithmeticError:
                return _row(params, math.inf, rhs, "divergent")
            if not math.isfinite(rhs):
                return _row(params, val, rhs, "zero_discriminant")
            return _row(params, val, rhs)

        memo = _Memo(row)

        def sweep(g, tvals, evals, lvals):
            vals = _grid_values(g, scale)
            out = [memo("grid", p, q, 0.0, 0.0) for p in vals for q in vals if (p, q) != (0.0, 0.0)]
            out += [memo("degenerate", -3 * t * t, 2 * t**3, t, 0.0) for t in tvals]
            out += [memo("approach", -3 * t * t, 2 * t**3 + e, t, e) for t in approach_t for e in evals]
            out += [memo(f"origin{k}", lam**2 * p0, lam**3 * q0, lam, 0.0)
                    for k, (p0, q0) in enumerate(ORIGIN_SHAPES) for lam in lvals]
            return out

        rows = sweep(grid, ts, eps, lams)
        refined = sweep(2 * grid - 1, refine_grid(ts, geometric=False), refine_grid(eps), refine_grid(lams))
        fams = {f"approach_t={t:g}": (lambda r, t=t: 1.0 / r.param("eps")
                                      if r.param("family") == "approach" and r.param("t") == t else None)
                for t in approach_t}
        fams.update({f"origin{k}": (lambda r, k=k: 1.0 / r.param("t") if r.param("family") == f"origin{k}" else None)
                     for k in range(len(ORIGIN_SHAPES))})
        reports.append(_finish(case, rows, refined, fams,
                               notes={"delta": delta, "grid": f"{grid}x{grid}", "scale": scale,
                                      "skipped": int(0.0 in _grid_values(grid, scale))}))
    return reports


def theorem4_families(ts=None, eps=None) -> list[tuple[str, BinaryCubic]]:
    """Default cubics: base forms, their scalings ``t c`` and a ``D -> 0`` approach."""
    ts = log_grid(1.0, 1e3, 7) if ts is None else ts
    eps = log_grid(1e-1, 1e-6, 6) if eps is None else eps
    out = [("base", BinaryCubic(1, 0, 1, 0)), ("base", BinaryCubic(1, 1, 1, 1))]
    for base in (BinaryCubic(1, 0, 0, 1), BinaryCubic(1, 0, -1, 0)):
        out += [("scaled", base.scaled(t)) for t in ts]
    out += [("approach", BinaryCubic(1, 1, 1, 1 + e)) for e in eps]
    return out


def verify_theorem4(cubics=None, ml: MLParams | None = None, amplitude: Amplitude | None = None,
                    tol: float = DEFAULT_TOL, refined_cubics=None) -> BoundReport:
    """``|I| |D|^(1/6) / |psi|_inf`` over binary cubics on the unit disc.

    ``cubics`` is a list of ``(family, BinaryCubic)``; rows with ``D = 0`` are
    flagged.  ``refined_cubics`` defaults to the family grids with midpoints.
    """
    ml = ml or MLParams(0.5, 1.0)
    ml.check_integral()
    amplitude = amplitude or Amplitude.constant()
    sup = amplitude.sup_norm(Domain.unit_disc())
    if cubics is None:
        cubics = theorem4_families()
        refined_cubics = theorem4_families(refine_grid(log_grid(1.0, 1e3, 7)), refine_grid(log_grid(1e-1, 1e-6, 6)))
    cubics = [c if isinstance(c, tuple) else ("custom", c) for c in cubics]
    refined_cubics = cubics if refined_cubics is None else refined_cubics

    def row(family, c):
        D = binary_discriminant(c)
        params = {"family": family, "a0": c.a0, "a1": c.a1, "a2": c.a2, "a3": c.a3, "D": D}
        scale = sum(abs(a) for a in c.coeffs) ** 4
        if abs(D) <= 1e-15 * scale:
            return _row(params, math.nan, math.nan, "zero_discriminant")
        val = abs(integrate_homogeneous_cubic(c, ml, amplitude, tol).value)
        return _row(params, val, sup / abs(D) ** (1.0 / 6.0))

    memo = _Memo(row)
    rows = [memo(f, c) for f, c in cubics]
    if not any(math.isfinite(r.ratio) for r in rows):
        raise ZeroDiscriminantError("every cubic in the sweep has zero discriminant")
    refined = [memo(f, c) for f, c in refined_cubics]
    fams = {"approach": lambda r: 1.0 / abs(r.param("D")) if r.param("family") == "approach" and r.param("D") else None,
            "scaled": lambda r: abs(r.param("D")) if r.param("family") == "scaled" else None}
    return _finish("thm4", rows, refined, fams,
                   notes={"alpha": ml.alpha, "beta": ml.beta, "psi_sup": sup})


def verify_lemma2(grid: int = 9, scale: float = 6.0, ts=None, eps=None, eps_fixed: float = 1e-3,
                  tol: float = 1e-10) -> BoundReport:
    """``J_2(p, q) |D|^(1/6)`` over a lattice and near-degenerate families.

    Lattice points with ``D = 0`` are skipped and counted in the notes.
    """
    if scale > 6.0:
        raise PreconditionError("the lattice must stay inside |p|, |q| <= 6")
    ts = [float(t) for t in np.linspace(0.2, 1.4, 7)] if ts is None else [float(t) for t in ts]
    eps = log_grid(1e-1, 1e-8, 8) if eps is None else [float(e) for e in eps]

    def row(family, p, q, t, e):
        D = depressed_discriminant(p, q).discriminant
        val = angular_J2(p, q, tol)
        return _row({"family": family, "p": p, "q": q, "t": t, "eps": e}, val, abs(D) ** (-1.0 / 6.0))

    memo = _Memo(row)

    def sweep(g, tvals, evals):
        out = []
        skipped = 0
        vals = _grid_values(g, scale)
        for p in vals:
            for q in vals:
                if depressed_discriminant(p, q).discriminant == 0.0:
                    skipped += 1
                    continue
                out.append(memo("grid", p, q, 0.0, 0.0))
        out += [memo("eps_fixed", -3 * t * t, 2 * t**3 + eps_fixed, t, eps_fixed) for t in tvals]
        out += [memo("approach", -3.0, 2.0 + e, 1.0, e) for e in evals]
        return out, skipped

    rows, skipped = sweep(grid, ts, eps)
    refined, _ = sweep(2 * grid - 1, refine_grid(ts, geometric=False), refine_grid(eps))
    fams = {"approach": lambda r: 1.0 / r.param("eps") if r.param("family") == "approach" else None}
    return _finish("lem2", rows, refined, fams,
                   notes={"grid": f"{grid}x{grid}", "scale": scale, "skipped": skipped, "eps_fixed": eps_fixed})


# }}}
