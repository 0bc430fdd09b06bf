"""Generalized oscillatory integrals with Mittag-Leffler carriers."""

from __future__ import annotations

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    BoundRow,
    FitResult,
    fit_decay,
    verify_cor1,
    verify_lemma1,
    verify_lemma2,
    verify_prop1,
    verify_theorem2,
    verify_theorem3,
    verify_theorem4,
    verify_thm1,
)
from .errors import (
    BudgetExceededError,
    CaseRoutingError,
    DegenerateError,
    DerivativeConditionError,
    DivergentIntegralError,
    InvalidParameterError,
    MLOscError,
    ParseError,
    PreconditionError,
    ZeroDiscriminantError,
)
from .polynomials import (
    BinaryCubic,
    PolyPhase,
    binary_discriminant,
    cubic_roots,
    depressed_discriminant,
    parse_polynomial,
    reduce_homogeneous_cubic,
)
from .quadrature import (
    Amplitude,
    Domain,
    IntegralSpec,
    QuadResult,
    angular_J2,
    integrate_classical,
    integrate_cubic_J,
    integrate_generalized,
    integrate_homogeneous_cubic,
    integrate_singular,
)
from .special_functions import MLParams, gamma, mittag_leffler, ml_decay_ratio, rgamma
from .sublevel import SublevelEstimate, sublevel_measure, verify_ccw
