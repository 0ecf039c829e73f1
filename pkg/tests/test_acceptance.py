"""Exit-criteria suite: one PASS/FAIL line per criterion in the terminal summary."""

import itertools
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from bevolume import CATALOG, ModelSpace, check_alpha_monotone, explicit_constants, make_manifold
from bevolume.checks import (
    check_bounded_gradient_remark,
    check_dyadic_bound,
    check_integral_estimate,
    check_main_theorem,
    check_petersen_wei,
    check_psi_lp,
    check_ratio_derivative,
    check_ratio_derivative_reduced,
    check_riccati,
    volume_ratio,
)
from bevolume.config import conformal_grid
from bevolume.conformal import (
    ConformalPair,
    conformal_hessian_residual,
    conformal_ricci_residual,
    conformal_volumes,
    make_factor,
)
from bevolume.model_space import ball_volume_model, weighted_ball_volume_model
from bevolume.norms import kappa_for_growth, weighted_ball_volume
from bevolume.quadrature import integrate
from bevolume.radial_manifold import psi, riccati_trace_residual

pytestmark = pytest.mark.acceptance

EXPONENTS = {2: (1.5, 8.0, 2.0), 3: (2.0, 8.0, 3.0), 4: (2.5, 10.0, 4.0)}
SWEEP_MANIFOLDS = {"hyperbolic": {"k": 1.0}, "gaussian_soliton": {"c": 0.25},
                   "perturbed": {"eps": 0.02}, "bounded_weight": {"b": 0.5}}
SWEEP_LAMBDA_A = [(0.0, 0.0), (-0.25, 0.1), (0.25, 0.0)]
SWEEP_R = [1.0, 1.5]


def _sweep_cells():
    for (name, params), n, (lam, a), R in itertools.product(
        SWEEP_MANIFOLDS.items(), (2, 3, 4), SWEEP_LAMBDA_A, SWEEP_R
    ):
        yield make_manifold(name, n, params), lam, a, R, EXPONENTS[n]


def _grid(R, points=512):
    return np.linspace(0.0, R, points + 1)[1:]


def _summary(reports):
    bad = [r for r in reports if not r.passed]
    worst = min(r.margin for r in reports)
    return bad, worst


def test_criterion_1_model_match(acceptance_line):
    start = time.perf_counter()
    cases = [("euclidean", {}, 0.0, 1.0), ("hyperbolic", {"k": 1.0}, -1.0, 1.0),
             ("sphere", {"k": 1.0}, 1.0, math.pi / 2)]
    reports, psi_max, ratio_err, lhs_max = [], 0.0, 0.0, 0.0
    for (name, params, lam, R), n in itertools.product(cases, (2, 3, 4)):
        m = make_manifold(name, n, params)
        p, q, l = EXPONENTS[n]
        psi_max = max(psi_max, float(np.max(psi(m, lam, 0.0, _grid(R)))))
        for t in (0.25 * R, 0.5 * R, R):
            ratio_err = max(ratio_err, abs(volume_ratio(m, lam, 0.0, t) - 1.0))
        Rs = 0.9 * R
        batch = [
            check_riccati(m, lam, 0.0, grid=_grid(R)),
            check_integral_estimate(m, lam, 0.0, p, R),
            check_dyadic_bound(m, 0.0, p, q, None, l, R),
            check_psi_lp(m, lam, 0.0, p, q, None, l, R),
            check_ratio_derivative(m, lam, 0.0, Rs),
            check_ratio_derivative_reduced(m, lam, 0.0, p, Rs),
            check_main_theorem(m, lam, 0.0, p, q, l, R / 4, R),
            check_bounded_gradient_remark(m, lam, 0.0, p, R / 4, R),
        ]
        if lam <= 0:
            batch.append(check_petersen_wei(m, lam, p, R / 4, R))
        reports += batch
        lhs_max = max(lhs_max, *(abs(r.lhs) for r in batch if r.check_name != "riccati"))
    elapsed = time.perf_counter() - start
    bad, _ = _summary(reports)
    ok = psi_max <= 1e-9 and ratio_err <= 1e-8 and not bad and lhs_max <= 1e-8 and elapsed < 10
    acceptance_line(1, ok, f"psi_max={psi_max:.2e} ratio_err={ratio_err:.2e} "
                           f"max|lhs|={lhs_max:.2e} checks={len(reports)} failed={len(bad)} t={elapsed:.1f}s")
    assert ok, [r.check_name for r in bad]


def test_criterion_2_riccati_tightness(acceptance_line):
    start = time.perf_counter()
    worst, count = 0.0, 0
    for name, n in itertools.product(CATALOG, (2, 3, 4, 5)):
        m = make_manifold(name, n)
        R = min(m.r_max, 3.0)
        grid = _grid(R)
        if grid[-1] >= m.r_max:
            grid = grid[:-1]
        worst = max(worst, float(np.max(np.abs(riccati_trace_residual(m, grid)))))
        count += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 5
    acceptance_line(2, ok, f"max residual={worst:.2e} over {count} manifolds x 512 points t={elapsed:.2f}s")
    assert ok


def test_criterion_3_lemma_chain(acceptance_line):
    start = time.perf_counter()
    reports, cells = [], 0
    for m, lam, a, R, (p, q, l) in _sweep_cells():
        cells += 1
        reports += [
            check_riccati(m, lam, a, grid=_grid(R)),
            check_integral_estimate(m, lam, a, p, R),
            check_dyadic_bound(m, a, p, q, None, l, R),
            check_psi_lp(m, lam, a, p, q, None, l, R),
            check_ratio_derivative(m, lam, a, R),
            check_ratio_derivative_reduced(m, lam, a, p, R),
        ]
    elapsed = time.perf_counter() - start
    bad, worst = _summary(reports)
    ok = cells >= 48 and not bad and elapsed < 300
    acceptance_line(3, ok, f"cells={cells} reports={len(reports)} failed={len(bad)} "
                           f"min margin={worst:.3e} t={elapsed:.1f}s")
    assert ok, [(r.check_name, dict(r.parameters)) for r in bad]


def test_criterion_4_main_theorem(acceptance_line):
    start = time.perf_counter()
    reports = []
    for m, lam, a, R, (p, q, l) in _sweep_cells():
        rep = check_main_theorem(m, lam, a, p, q, l, R / 4, R)
        assert rep.resolution["kappa"] > 0
        reports.append(rep)
    spreads = []
    for name in ("gaussian_soliton", "perturbed", "bounded_weight"):
        for n, (p, q, l) in EXPONENTS.items():
            m = make_manifold(name, n, SWEEP_MANIFOLDS[name])
            kappa = kappa_for_growth(m, l, 1.0)
            expo = 1 - n / (2 * p)
            for lam, a in SWEEP_LAMBDA_A:
                scaled = [explicit_constants(n, p, q, kappa, l, lam, a, t).C_thm / t**expo
                          for t in np.geomspace(0.01, 0.1, 11)]
                spreads.append(max(scaled) / min(scaled))
    elapsed = time.perf_counter() - start
    bad, worst = _summary(reports)
    spread = max(spreads)
    ok = len(reports) >= 48 and not bad and spread <= 2.0 and elapsed < 300
    acceptance_line(4, ok, f"cells={len(reports)} failed={len(bad)} min margin={worst:.3e} "
                           f"scaling spread={spread:.4f} t={elapsed:.1f}s")
    assert ok


def test_criterion_5_petersen_wei(acceptance_line):
    reports = []
    for (name, params), n, lam in itertools.product(
        [("euclidean", {}), ("hyperbolic", {"k": 1.0}), ("perturbed", {"eps": 0.02})], (2, 3, 4), (0.0, -0.25, -1.0)
    ):
        p = EXPONENTS[n][0]
        reports.append(check_petersen_wei(make_manifold(name, n, params), lam, p, 0.25, 1.0))
    slope_err = max(abs(r.resolution["loglog_slope"] - r.resolution["expected_slope"]) for r in reports)
    bad, worst = _summary(reports)
    ok = not bad and slope_err <= 0.1
    acceptance_line(5, ok, f"cells={len(reports)} failed={len(bad)} max slope error={slope_err:.2e}")
    assert ok


def test_criterion_6_bounded_gradient(acceptance_line):
    reports = []
    for b, n, lam in itertools.product((0.25, 0.5, 1.0), (2, 3, 4), (0.0, -0.25)):
        m = make_manifold("bounded_weight", n, {"b": b})
        reports.append(check_bounded_gradient_remark(m, lam, b, EXPONENTS[n][0], 0.25, 1.0))
    no_kappa = all("kappa" not in r.resolution and "kappa" not in r.parameters for r in reports)
    bad, worst = _summary(reports)
    ok = not bad and no_kappa
    acceptance_line(6, ok, f"cells={len(reports)} failed={len(bad)} min margin={worst:.3e} kappa consumed={not no_kappa}")
    assert ok


def test_criterion_7_alpha_monotone(acceptance_line):
    reports = []
    for lam, n in itertools.product((-1.0, 0.0, 1.0), range(2, 7)):
        top = math.pi / 2 if lam > 0 else 5.0
        reports.append(check_alpha_monotone(ModelSpace(n, lam), _grid(top, 1024)))
    min_diff = min(r.rhs for r in reports)
    ok = all(r.passed for r in reports) and min_diff >= -1e-10
    acceptance_line(7, ok, f"cases={len(reports)} min forward difference={min_diff:.3e}")
    assert ok


def test_criterion_8_conformal(acceptance_line):
    worst, vol_err, pairs = 0.0, 0.0, 0
    for name, n, factor in itertools.product(CATALOG, (2, 3, 4), ("log1p_sq", "bump", "quadratic")):
        base = make_manifold(name, n)
        pair = ConformalPair(base, make_factor(factor), factor)
        R = min(0.95 * base.r_max, 2.0)
        grid = conformal_grid(R, 64)
        for res in (*conformal_ricci_residual(pair, grid), *conformal_hessian_residual(pair, grid)):
            worst = max(worst, float(np.max(np.abs(res))))
        chart, direct = conformal_volumes(pair, R)
        vol_err = max(vol_err, abs(chart - direct) / abs(direct))
        pairs += 1
    ok = worst < 1e-8 and vol_err < 1e-8
    acceptance_line(8, ok, f"pairs={pairs} max residual={worst:.2e} volume rel err={vol_err:.2e}")
    assert ok


def test_criterion_9_quadrature_oracles(acceptance_line):
    area2, area3 = 2 * math.pi, 4 * math.pi
    cases = {
        "int e^t t": (integrate(lambda t: np.exp(t) * t, 0.0, 1.0).value, 1.0),
        "euclidean ball n=3": (ball_volume_model(ModelSpace(3, 0.0), 1.0), area3 / 3),
        "hyperbolic disc": (ball_volume_model(ModelSpace(2, -1.0), 1.0), area2 * (math.cosh(1) - 1)),
        "hyperbolic ball n=3": (ball_volume_model(ModelSpace(3, -1.0), 1.0), math.pi * (math.sinh(2) - 2)),
        "hemisphere": (ball_volume_model(ModelSpace(2, 1.0), math.pi / 2), area2),
        "spherical cap n=3": (ball_volume_model(ModelSpace(3, 1.0), 1.0), math.pi * (2 - math.sin(2))),
        "v_a e^t t": (weighted_ball_volume_model(ModelSpace(2, 0.0), 1.0, 1.0), area2),
        "gaussian n=2": (weighted_ball_volume(make_manifold("gaussian_soliton", 2), 2.0),
                         4 * math.pi * (1 - math.exp(-1))),
        "gaussian n=3": (weighted_ball_volume(make_manifold("gaussian_soliton", 3), 2.0),
                         area3 * (2 * math.sqrt(math.pi) * math.erf(1) - 4 * math.exp(-1))),
        "hyperbolic manifold disc": (weighted_ball_volume(make_manifold("hyperbolic", 2), 1.0),
                                     area2 * (math.cosh(1) - 1)),
    }
    errors = {k: abs(v - ref) / abs(ref) for k, (v, ref) in cases.items()}
    worst_key = max(errors, key=errors.get)
    ok = errors[worst_key] <= 1e-9
    acceptance_line(9, ok, f"integrals={len(cases)} worst rel err={errors[worst_key]:.2e} ({worst_key})")
    assert ok, errors


PASSING = """
manifolds:
  - {name: hyperbolic, n: [2, 3]}
  - {name: gaussian_soliton, n: 3}
checks:
  - name: ratio_derivative
    grid: {lambda: [0.0, -1.0], a: 0.0, R: 1.0}
  - name: main_theorem
    grid: {lambda: 0.0, a: 0.0, p: 2.0, q: 8.0, l: 3.0, r: 0.25, R: 1.0, n: 3}
"""

FAILING = """
tolerance: {abs: 0.0, rel: 0.0}
manifolds:
  - {name: hyperbolic, n: [2, 3, 4]}
checks:
  - name: riccati
    grid: {lambda: 0.0, a: 0.0, R: 1.0, points: 4096}
"""

INVALID = """
manifolds:
  - {name: euclidean, n: 4}
checks:
  - name: main_theorem
    grid: {lambda: 0.0, a: 0.0, p: 2.0, q: 8.0, l: 4.0, r: 0.25, R: 1.0}
"""


def _sweep(tmp_path, text, out):
    cfg = tmp_path / f"{out}.yaml"
    cfg.write_text(text)
    return subprocess.run([sys.executable, "-m", "bevolume.cli", "sweep", "--config", str(cfg),
                           "--out", str(tmp_path / out)], capture_output=True, text=True)


def test_criterion_10_determinism_and_exit_codes(acceptance_line, tmp_path):
    first, second = _sweep(tmp_path, PASSING, "a"), _sweep(tmp_path, PASSING, "b")
    identical = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
                    for f in ("report.csv", "report.json"))
    failing = _sweep(tmp_path, FAILING, "fail")
    invalid = _sweep(tmp_path, INVALID, "invalid")
    codes = (first.returncode, second.returncode, failing.returncode, invalid.returncode)
    ok = identical and codes == (0, 0, 1, 2) and not (tmp_path / "invalid").exists()
    acceptance_line(10, ok, f"byte-identical={identical} exit codes pass/pass/fail/invalid={codes}")
    assert ok, (first.stderr, failing.stderr, invalid.stderr)
