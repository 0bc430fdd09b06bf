"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line (shown even when pytest
captures output) before asserting.  Run alone with::

    pytest tests/test_acceptance.py -v
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from mlosc.bounds import (
    BOUNDED,
    log_grid,
    verify_cor1,
    verify_lemma1,
    verify_lemma2,
    verify_prop1,
    verify_theorem2,
    verify_theorem3,
    verify_theorem4,
)
from mlosc.cli import main
from mlosc.polynomials import parse_polynomial
from mlosc.special_functions import MLParams, mittag_leffler
from mlosc.sublevel import sublevel_measure, verify_ccw


@pytest.fixture
def report(capsys):
    def emit(label: str, ok: bool, elapsed: float, limit: float | None, detail: str) -> None:
        in_time = limit is None or elapsed < limit
        status = "PASS" if ok and in_time else "FAIL"
        budget = f" (limit {limit:g}s)" if limit is not None else ""
        with capsys.disabled():
            print(f"\n[{status}] {label}: {detail}; {elapsed:.1f}s{budget}")
        assert ok, detail
        assert in_time, f"runtime {elapsed:.1f}s exceeds {limit}s"

    return emit


def test_criterion_1_ml_identities(report):
    t0 = time.perf_counter()
    r = np.linspace(0.5, 10.0, 8)
    th = np.linspace(0.0, 2 * np.pi, 8, endpoint=False)
    z = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    e11 = float(np.max(np.abs(mittag_leffler(1.0, 1.0, z) - np.exp(z)) / np.abs(np.exp(z))))
    e12 = float(np.max(np.abs(mittag_leffler(1.0, 2.0, z) * z - np.expm1(z)) / np.abs(np.expm1(z))))
    rng = np.random.default_rng(1)
    e0 = max(
        abs(complex(mittag_leffler(a, b, 0.0)) * math.gamma(b) - 1.0)
        for a, b in zip(rng.uniform(0.05, 1.95, 20), rng.uniform(0.05, 5.0, 20))
    )
    ok = e11 <= 1e-10 and e12 <= 1e-9 and e0 <= 1e-12
    report("1 Mittag-Leffler identities", ok, time.perf_counter() - t0, 5.0,
           f"E11 rel {e11:.2e}, E12 rel {e12:.2e}, E(0) rel {e0:.2e}")


def test_criterion_2_decay_constant(report):
    t0 = time.perf_counter()
    rep = verify_prop1(include_zero=False)
    ok = math.isfinite(rep.c_fit) and rep.drift < 0.05
    report("2 |E(it)|(1+t) bounded", ok, time.perf_counter() - t0, 30.0,
           f"c_fit {rep.c_fit:.4g}, refined {rep.c_fit_refined:.4g}, drift {rep.drift:.2%}")


def test_criterion_3_sublevel_exponent(report):
    t0 = time.perf_counter()
    mus = log_grid(1e-4, 1e-1, 12)
    s2 = verify_ccw(parse_polynomial("x^2"), (2,), mus).slope
    s3 = verify_ccw(parse_polynomial("x^3"), (3,), mus).slope
    size = 2048
    errs = []
    for mu in (1e-3, 1e-2, 0.1, 0.25):
        errs.append(abs(sublevel_measure(parse_polynomial("x^2"), mu).measure - math.sqrt(mu)) <= 1 / size)
        errs.append(abs(sublevel_measure(parse_polynomial("x^3"), mu).measure - mu ** (1 / 3)) <= 1 / size)
        exact = mu * (1 - math.log(mu))
        hyp = parse_polynomial("x1*x2")
        errs.append(abs(sublevel_measure(hyp, mu).measure - exact) <= 4 / size)
        mc = sublevel_measure(hyp, mu, "monte_carlo", seed=0)
        errs.append(abs(mc.measure - exact) <= 3 * mc.ci_halfwidth)
    ok = abs(s2 - 0.5) <= 0.05 and abs(s3 - 1 / 3) <= 0.05 and all(errs)
    report("3 sublevel exponent", ok, time.perf_counter() - t0, 60.0,
           f"slopes {s2:.4f} (x^2), {s3:.4f} (x^3); closed forms {sum(errs)}/{len(errs)} within tolerance")


def test_criterion_4_classical_anchor(report):
    t0 = time.perf_counter()
    rep = verify_cor1(mus=log_grid(1.0, 1e3, 24))
    worst = max(abs(r.measured - abs((np.exp(1j * r.param("mu")) - 1) / (1j * r.param("mu")))) for r in rep.rows)
    ok = worst <= 1e-8 and abs(rep.c_fit - 2.0) <= 0.05 * 2.0
    report("4 classical anchor", ok, time.perf_counter() - t0, 10.0,
           f"max closed-form error {worst:.2e}, c_fit {rep.c_fit:.4f}")


def test_criterion_5_ray_slopes(report):
    t0 = time.perf_counter()
    parts, ok = [], True
    for d in (2, 3):
        for alpha in (0.5, 0.8):
            rep = verify_lemma1(parse_polynomial(f"x^{d}"), (d,), MLParams(alpha, 1.0), mus=log_grid(10.0, 1e5))
            ok = ok and rep.slope_fit <= -1 / d + 0.1
            parts.append(f"d={d} a={alpha}: {rep.slope_fit:.3f}")
    report("5 ray decay slopes", ok, time.perf_counter() - t0, 60.0, ", ".join(parts))


def test_criterion_6_singular_cubic(report):
    t0 = time.perf_counter()
    reps = verify_theorem3(deltas=(0.45, 0.75), grid=9)
    ok = all(r.verdict == BOUNDED for r in reps)
    for r in reps:
        fams = {row.param("family") for row in r.rows}
        ok = ok and {"grid", "degenerate"} <= fams
        degenerate_t = sorted(row.param("t") for row in r.rows if row.param("family") == "degenerate")
        ok = ok and degenerate_t[0] == pytest.approx(0.1) and degenerate_t[-1] == pytest.approx(1.0)
    detail = ", ".join(f"{r.theorem_id} c_fit {r.c_fit:.4g} drift {r.drift:.1%} {r.verdict}" for r in reps)
    report("6 cubic singular integral", ok, time.perf_counter() - t0, 120.0, detail)


def test_criterion_7_discriminant_bounds(report):
    t0 = time.perf_counter()
    t4 = verify_theorem4()
    l2 = verify_lemma2()
    has_approach = all(any(r.param("family") == "approach" for r in rep.rows) for rep in (t4, l2))
    ok = t4.verdict == BOUNDED and l2.verdict == BOUNDED and has_approach
    report("7 discriminant bounds", ok, time.perf_counter() - t0, 180.0,
           f"thm4 c_fit {t4.c_fit:.4g} {t4.verdict}; lem2 c_fit {l2.c_fit:.4g} {l2.verdict}")


def test_criterion_8_exponent_report(report):
    t0 = time.perf_counter()
    parts, ok = [], True
    for d in (2, 3):
        rep = verify_theorem2(d, 1, MLParams(0.5, 1.0))
        growth = rep.note("family0_inv_alpha_growth")
        mono = rep.note("family0_inv_alpha_monotone")
        ok = ok and rep.verdict == BOUNDED and rep.drift < 0.2 and mono and growth >= 10
        ok = ok and rep.note("bounded_exponent") == "1/d"
        parts.append(f"d={d}: 1/d c_fit {rep.c_fit:.3g} drift {rep.drift:.1%}, 1/alpha growth {growth:.3g}x "
                     f"monotone={mono}, recorded {rep.note('bounded_exponent')}")
    report("8 exponent report", ok, time.perf_counter() - t0, None, "; ".join(parts))


def test_criterion_9_determinism(report, tmp_path, capsys):
    t0 = time.perf_counter()
    commands = [
        ["verify", "thm1", "--phase", "x1*x2", "--kappa", "1,1", "--method", "monte_carlo", "--size", "100000"],
        ["verify", "prop1", "--points", "12"],
        ["verify", "lem2"],
        ["verify", "thm3"],
    ]
    same = []
    for k, cmd in enumerate(commands):
        blobs = []
        for rep in range(2):
            out = tmp_path / f"c{k}_{rep}.csv"
            main([*cmd, "--seed", "5", "--out", str(out)])
            blobs.append(out.read_bytes())
        same.append(blobs[0] == blobs[1] and len(blobs[0]) > 0)
    capsys.readouterr()
    report("9 determinism", all(same), time.perf_counter() - t0, None,
           f"{sum(same)}/{len(same)} verify commands byte-identical across repeats")
