"""Sparse multivariate polynomial phases and cubic invariants."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import DegenerateError, DimensionMismatchError, InvalidParameterError, ParseError

__all__ = [
    "MultiIndex",
    "PolyPhase",
    "CubicInvariants",
    "BinaryCubic",
    "CubicReduction",
    "depressed_discriminant",
    "binary_discriminant",
    "cubic_roots",
    "rotate_binary_cubic",
    "reduce_homogeneous_cubic",
    "parse_polynomial",
]

MultiIndex = tuple[int, ...]

NORM_MODES = ("l1_all", "l1_nonconstant", "max")


def _check_index(lam: Iterable[int], dim: int | None = None) -> MultiIndex:
    lam = tuple(int(v) for v in lam)
    if any(v < 0 for v in lam):
        raise InvalidParameterError(f"multi-index entries must be non-negative: {lam}")
    if dim is not None and len(lam) != dim:
        raise DimensionMismatchError(f"multi-index {lam} does not have length {dim}")
    return lam


@dataclass(frozen=True)
class PolyPhase:
    """Polynomial ``sum a_lambda x**lambda`` in ``dim`` variables.

    Coefficients are stored sparsely; exact zeros are dropped, nothing else is.
    ``degree_bound`` defaults to the actual degree.
    """

    dim: int
    coeffs: Mapping[MultiIndex, float] = field(default_factory=dict)
    degree_bound: int | None = None

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidParameterError("dim must be at least 1")
        clean: dict[MultiIndex, float] = {}
        for lam, c in dict(self.coeffs).items():
            lam = _check_index(lam, self.dim)
            c = float(c)
            if not math.isfinite(c):
                raise InvalidParameterError(f"non-finite coefficient for {lam}")
            c = clean.get(lam, 0.0) + c
            if c == 0.0:
                clean.pop(lam, None)
            else:
                clean[lam] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))
        deg = max((sum(lam) for lam in clean), default=0)
        if self.degree_bound is None:
            object.__setattr__(self, "degree_bound", deg)
        elif deg > self.degree_bound:
            raise InvalidParameterError(f"degree {deg} exceeds degree_bound {self.degree_bound}")

    # constructors

    @classmethod
    def monomial(cls, lam: Iterable[int], coeff: float = 1.0) -> PolyPhase:
        lam = tuple(lam)
        return cls(len(lam), {lam: coeff})

    @classmethod
    def univariate(cls, coeffs: Iterable[float]) -> PolyPhase:
        """From ascending coefficients ``[c0, c1, ...]`` in one variable."""
        return cls(1, {(k,): c for k, c in enumerate(coeffs)})

    @classmethod
    def depressed_cubic(cls, p: float, q: float) -> PolyPhase:
        return cls.univariate([q, p, 0.0, 1.0])

    # basic properties

    @property
    def degree(self) -> int:
        return max((sum(lam) for lam in self.coeffs), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyPhase):
            return NotImplemented
        return self.dim == other.dim and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.dim, tuple(self.coeffs.items())))

    def scaled(self, factor: float) -> PolyPhase:
        return PolyPhase(self.dim, {lam: factor * c for lam, c in self.coeffs.items()}, self.degree_bound)

    def __mul__(self, factor: float) -> PolyPhase:
        return self.scaled(float(factor))

    __rmul__ = __mul__

    def normalized(self, mode: str = "l1_all") -> PolyPhase:
        n = self.coeff_norm(mode)
        if n == 0.0:
            raise DegenerateError("cannot normalise the zero polynomial")
        return self.scaled(1.0 / n)

    # evaluation

    def __call__(self, x) -> np.ndarray | float:
        return self.eval(x)

    def eval(self, x):
        """Evaluate at points ``x`` of shape ``(..., dim)`` (or a scalar when dim=1)."""
        x = np.asarray(x, dtype=float)
        scalar = False
        if self.dim == 1 and (x.ndim == 0 or x.shape[-1:] != (1,)):
            scalar = x.ndim == 0
            x = x[..., None]
        if x.shape[-1] != self.dim:
            raise DimensionMismatchError(f"point dimension {x.shape[-1]} != polynomial dimension {self.dim}")
        out = np.zeros(x.shape[:-1])
        if not self.coeffs:
            return float(out) if scalar else out
        # power tables per variable, built by repeated multiplication
        maxdeg = [max(lam[j] for lam in self.coeffs) for j in range(self.dim)]
        tables = []
        for j in range(self.dim):
            xj = x[..., j]
            pw = [np.ones_like(xj)]
            for _ in range(maxdeg[j]):
                pw.append(pw[-1] * xj)
            tables.append(pw)
        for lam, c in self.coeffs.items():
            term = np.full(x.shape[:-1], c)
            for j, e in enumerate(lam):
                if e:
                    term = term * tables[j][e]
            out = out + term
        return float(out) if scalar else out

    # calculus

    def partial_derivative(self, kappa: Iterable[int]) -> PolyPhase:
        """Exact ``D^kappa`` of the polynomial."""
        kappa = _check_index(kappa, self.dim)
        out: dict[MultiIndex, float] = {}
        for lam, c in self.coeffs.items():
            if any(l < k for l, k in zip(lam, kappa)):
                continue
            factor = 1.0
            for l, k in zip(lam, kappa):
                factor *= math.perm(l, k)
            out[tuple(l - k for l, k in zip(lam, kappa))] = c * factor
        bound = max(0, self.degree_bound - sum(kappa))
        return PolyPhase(self.dim, out, bound)

    def coeff_norm(self, mode: str = "l1_all") -> float:
        """``l1_all``: sum of all |a|; ``l1_nonconstant``: without the constant
        term; ``max``: largest |a|."""
        if mode not in NORM_MODES:
            raise InvalidParameterError(f"unknown norm mode {mode!r}; expected one of {NORM_MODES}")
        vals = [abs(c) for lam, c in self.coeffs.items() if mode != "l1_nonconstant" or sum(lam) > 0]
        if mode == "max":
            return max(vals, default=0.0)
        return math.fsum(vals)

    # text forms

    def to_text(self) -> str:
        """Whitespace-separated lines ``lambda_1 ... lambda_n coeff``."""
        lines = [" ".join(str(v) for v in lam) + " " + repr(c) for lam, c in self.coeffs.items()]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, dim: int | None = None) -> PolyPhase:
        coeffs: dict[MultiIndex, float] = {}
        width = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ParseError(f"line {lineno}: expected 'lambda_1 ... lambda_n coeff'")
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise ParseError(f"line {lineno}: inconsistent number of fields")
            try:
                lam = tuple(int(v) for v in parts[:-1])
                c = float(parts[-1])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from None
            if any(v < 0 for v in lam) or not math.isfinite(c):
                raise ParseError(f"line {lineno}: negative exponent or non-finite coefficient")
            coeffs[lam] = coeffs.get(lam, 0.0) + c
        if width is None:
            if dim is None:
                raise ParseError("empty polynomial file and no dimension given")
            return cls(dim, {})
        n = width - 1
        if dim is not None and dim != n:
            raise ParseError(f"file has dimension {n}, expected {dim}")
        return cls(n, coeffs)

    def to_expression(self) -> str:
        """Inverse of :func:`parse_polynomial` (``c*x1^a*x2^b + ...``)."""
        if not self.coeffs:
            return "0"
        names = ["x"] if self.dim == 1 else [f"x{j + 1}" for j in range(self.dim)]
        out = []
        for lam, c in self.coeffs.items():
            factors = [repr(abs(c))]
            for name, e in zip(names, lam):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            sign = "-" if c < 0 else "+"
            out.append((sign, "*".join(factors)))
        text = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text


# {{{ inline parser

_FACTOR = re.compile(r"^x(\d*)(?:\^(\d+))?$")


def _split_terms(expr: str) -> list[str]:
    terms: list[str] = []
    cur = ""
    for i, ch in enumerate(expr):
        if ch in "+-" and cur and not (cur[-1] in "eE" and i > 1 and expr[i - 2].isdigit()):
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    if cur:
        terms.append(cur)
    return terms


def parse_polynomial(expr: str, dim: int | None = None) -> PolyPhase:
    """Parse ``"3*x1^2*x2 - 2.5*x + 1"``.

    ``x`` is shorthand for ``x1``.  The dimension is the largest variable
    index used unless ``dim`` is given.
    """
    s = expr.replace(" ", "").replace("**", "^")
    if not s:
        raise ParseError("empty polynomial expression")
    raw_terms: list[tuple[float, dict[int, int]]] = []
    nvars = 1
    for term in _split_terms(s):
        sign = 1.0
        if term[0] in "+-":
            sign = -1.0 if term[0] == "-" else 1.0
            term = term[1:]
        if not term:
            raise ParseError(f"dangling sign in {expr!r}")
        coeff = sign
        powers: dict[int, int] = {}
        for fac in term.split("*"):
            if not fac:
                raise ParseError(f"empty factor in {expr!r}")
            m = _FACTOR.match(fac)
            if m:
                idx = int(m.group(1)) if m.group(1) else 1
                if idx < 1:
                    raise ParseError(f"variable index must start at 1: {fac!r}")
                powers[idx] = powers.get(idx, 0) + (int(m.group(2)) if m.group(2) else 1)
                nvars = max(nvars, idx)
                continue
            try:
                val = float(fac)
            except ValueError:
                raise ParseError(f"cannot parse factor {fac!r} in {expr!r}") from None
            if not math.isfinite(val):
                raise ParseError(f"non-finite coefficient in {expr!r}")
            coeff *= val
        raw_terms.append((coeff, powers))
    if dim is None:
        dim = nvars
    elif nvars > dim:
        raise ParseError(f"expression uses x{nvars} but dim={dim}")
    coeffs: dict[MultiIndex, float] = {}
    for c, powers in raw_terms:
        lam = tuple(powers.get(j + 1, 0) for j in range(dim))
        coeffs[lam] = coeffs.get(lam, 0.0) + c
    return PolyPhase(dim, coeffs)


# }}}


# {{{ cubic invariants


@dataclass(frozen=True)
class CubicInvariants:
    """``p``, ``q`` of ``x^3 + p x + q`` and ``D = p^3/27 + q^2/4``."""

    p: float
    q: float
    discriminant: float


def depressed_discriminant(p: float, q: float) -> CubicInvariants:
    p, q = float(p), float(q)
    return CubicInvariants(p, q, p**3 / 27.0 + q**2 / 4.0)


@dataclass(frozen=True)
class BinaryCubic:
    """``a0 x^3 + 3 a1 x^2 y + 3 a2 x y^2 + a3 y^3``."""

    a0: float
    a1: float
    a2: float
    a3: float

    def __post_init__(self) -> None:
        for name in ("a0", "a1", "a2", "a3"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidParameterError(f"{name} must be finite")
            object.__setattr__(self, name, v)

    @property
    def coeffs(self) -> tuple[float, float, float, float]:
        return (self.a0, self.a1, self.a2, self.a3)

    @property
    def discriminant(self) -> float:
        return binary_discriminant(self)

    def scaled(self, t: float) -> BinaryCubic:
        return BinaryCubic(*(t * a for a in self.coeffs))

    def __call__(self, x, y):
        a0, a1, a2, a3 = self.coeffs
        return a0 * x**3 + 3 * a1 * x**2 * y + 3 * a2 * x * y**2 + a3 * y**3

    def to_phase(self) -> PolyPhase:
        a0, a1, a2, a3 = self.coeffs
        return PolyPhase(2, {(3, 0): a0, (2, 1): 3 * a1, (1, 2): 3 * a2, (0, 3): a3}, 3)

    def angular_zeros(self) -> list[float]:
        """Angles in ``[0, 2 pi)`` where ``P(cos t, sin t) = 0`` (empty if identically zero)."""
        a0, a1, a2, a3 = self.coeffs
        if not any(self.coeffs):
            return []
        # P(cos t, sin t) = sin^3 t * P(u, 1) with u = cot t
        poly = np.array([a0, 3 * a1, 3 * a2, a3])
        nz = np.flatnonzero(poly)
        roots = np.roots(poly[nz[0]:]) if nz[0] < 3 else np.array([])
        angles = [math.atan2(1.0, r.real) for r in roots if abs(r.imag) <= 1e-12 * max(1.0, abs(r))]
        if a0 == 0.0:
            angles.append(0.0)
        out = sorted({round(a, 15) for a in angles} | {round(a + math.pi, 15) for a in angles})
        return [a for a in out if 0.0 <= a < 2 * math.pi]


def binary_discriminant(c: BinaryCubic) -> float:
    a0, a1, a2, a3 = c.coeffs
    return 3 * a1**2 * a2**2 + 6 * a0 * a1 * a2 * a3 - 4 * a0 * a2**3 - 4 * a1**3 * a3 - a0**2 * a3**2


DOUBLE_ROOT_RTOL = 1e-12


def cubic_roots(p: float, q: float, merge_tol: float = 1e-10) -> list[tuple[complex, int]]:
    """Roots of ``x^3 + p x + q`` with multiplicities.

    Closed form (Cardano / trigonometric) followed by Newton polishing of
    simple real roots.  Roots closer than ``merge_tol`` (relative to
    ``max(1, |root|)``) are merged into one multiple root, and a complex pair
    with imaginary part below that threshold becomes a real double root.
    A discriminant below ``DOUBLE_ROOT_RTOL * (|p|^3/27 + q^2/4)`` is
    rounding noise and also yields a double root.
    """
    p, q = float(p), float(q)
    if p == 0.0 and q == 0.0:
        return [(0.0, 3)]
    D = p**3 / 27.0 + q**2 / 4.0
    if abs(D) <= DOUBLE_ROOT_RTOL * (abs(p) ** 3 / 27.0 + q**2 / 4.0):
        # double root
        return sorted([(3 * q / p, 1), (-1.5 * q / p, 2)], key=lambda r: r[0].real)
    if D > 0:
        sq = math.sqrt(D)
        A = -math.copysign(1.0, q if q != 0 else 1.0) * np.cbrt(abs(q) / 2.0 + sq)
        B = -p / (3.0 * A)
        r = _newton(float(A + B), p, q)
        re = -r / 2.0
        im = math.sqrt(3.0) / 2.0 * abs(A - B)
        roots = [complex(r), complex(re, im), complex(re, -im)]
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        phi = math.acos(max(-1.0, min(1.0, arg)))
        roots = [complex(_newton(m * math.cos(phi / 3.0 - 2.0 * math.pi * k / 3.0), p, q)) for k in range(3)]
    return _merge_roots(roots, merge_tol)


def _newton(x: float, p: float, q: float) -> float:
    for _ in range(4):
        f = (x * x + p) * x + q
        df = 3.0 * x * x + p
        if df == 0.0:
            break
        step = f / df
        x_new = x - step
        if abs(((x_new * x_new + p) * x_new + q)) >= abs(f):
            break
        x = x_new
    return x


def _merge_roots(roots: list[complex], tol: float) -> list[tuple[complex, int]]:
    roots = sorted(roots, key=lambda z: (z.real, z.imag))
    # snap near-real pairs onto the axis
    groups: list[list[complex]] = []
    for z in roots:
        for g in groups:
            ref = sum(g) / len(g)
            if abs(z - ref) < tol * max(1.0, abs(ref)):
                g.append(z)
                break
        else:
            groups.append([z])
    out = []
    for g in groups:
        z = sum(g) / len(g)
        if len(g) > 1:
            z = complex(z.real, 0.0)
        out.append((z if z.imag != 0.0 else complex(z.real, 0.0), len(g)))
    return sorted(out, key=lambda r: (r[0].real, r[0].imag))


def rotate_binary_cubic(c: BinaryCubic, theta: float) -> BinaryCubic:
    """Coefficients of ``Q(x', y') = P(x' cos t - y' sin t, x' sin t + y' cos t)``."""
    co, si = math.cos(theta), math.sin(theta)
    a0, a1, a2, a3 = c.coeffs
    P = np.polynomial.Polynomial
    u = P([co, -si])  # x as a function of t = y'/x'
    v = P([si, co])
    q = a0 * u**3 + 3 * a1 * u**2 * v + 3 * a2 * u * v**2 + a3 * v**3
    b = np.zeros(4)
    b[: len(q.coef)] = q.coef
    return BinaryCubic(b[0], b[1] / 3.0, b[2] / 3.0, b[3])


@dataclass(frozen=True)
class CubicReduction:
    """Result of rotating and shearing a binary cubic to ``lead*(x^3 + p x y^2 + q y^3)``.

    ``binary_discriminant(original) == scale * depressed_discriminant(p, q)``
    with ``scale = -4 * lead**4``.
    """

    theta: float
    p: float
    q: float
    lead: float
    rotated: BinaryCubic
    scale: float


def _golden_max(f, a: float, b: float, tol: float = 1e-12) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def reduce_homogeneous_cubic(c: BinaryCubic, samples: int = 256) -> CubicReduction:
    """Rotate so the leading coefficient dominates, then shear away ``a1``.

    No rotation is applied when ``|a0|`` already is the largest coefficient
    magnitude.  Otherwise ``theta`` maximises ``|P(cos t, sin t)|`` (the new
    leading coefficient) by a 256-point scan of ``[0, pi)`` refined by
    golden-section search.  The output satisfies ``|p|, |q| <= 6``.
    """
    mags = [abs(a) for a in c.coeffs]
    if max(mags) < 1e-300:
        raise DegenerateError("binary cubic has all coefficients below 1e-300")
    theta = 0.0
    if mags[0] < max(mags):
        f = lambda t: abs(c(math.cos(t), math.sin(t)))
        grid = np.linspace(0.0, math.pi, samples, endpoint=False)
        vals = np.abs(c(np.cos(grid), np.sin(grid)))
        k = int(np.argmax(vals))
        h = math.pi / samples
        theta = _golden_max(f, grid[k] - h, grid[k] + h) % math.pi
    rot = rotate_binary_cubic(c, theta) if theta else c
    a0, a1, a2, a3 = rot.coeffs
    p = (3 * a0 * a2 - 3 * a1**2) / a0**2
    q = (a0**2 * a3 + 2 * a1**3 - 3 * a0 * a1 * a2) / a0**3
    scale = -4.0 * a0**4
    d_orig = binary_discriminant(c)
    d_rot = binary_discriminant(rot)
    size = sum(mags) ** 4
    if abs(d_orig - d_rot) > 1e-9 * max(abs(d_orig), size * 1e-3):
        raise ArithmeticError("discriminant not invariant under rotation")
    if abs(d_orig - scale * depressed_discriminant(p, q).discriminant) > 1e-9 * max(abs(d_orig), size * 1e-3):
        raise ArithmeticError("discriminant scale relation violated")
    if abs(p) > 6 + 1e-9 or abs(q) > 6 + 1e-9:
        raise ArithmeticError(f"reduction left |p|={abs(p)}, |q|={abs(q)} above 6")
    return CubicReduction(theta, p, q, a0, rot, scale)


# }}}
