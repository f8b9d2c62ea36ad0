"""Acceptance criteria, one test each, with the tolerances pinned below.

Every test prints a single ``criterion N: PASS|FAIL`` line with its worst
measured value so the verdicts are readable straight from ``pytest -v``.
"""

import time
from collections import Counter

import numpy as np
import pytest

from ptcoupled import cli, fockrep, reports, wavefn
from ptcoupled.model import ModelParams
from ptcoupled.spectrum import Regime, classify_regime, level_indices, spectrum_table

EPSILONS = (0.0, 0.3, 0.6, 0.9)
SHIFTS = ((0.0, 1.0), (1.0, 1.0), (1.0, 2.0))

# pinned tolerances
C1_TOL, C1_N, C1_MAX_TOTAL, C1_SECONDS = 1e-5, 24, 3, 60.0
C2_TOL, C2_N = 1e-9, 20
C3_TOL, C3_N = 1e-9, 20
C4_TOL, C4_N = 1e-9, 20
C5_TOL, C5_ROUTE_TOL, C5_NMAX, C5_ORDER = 1e-8, 1e-10, 4, 96
C6_TOL = 1e-9
C7_IMAG_TOL, C7_UNBROKEN_MAX, C7_BROKEN_MIN = 1e-10, 0.95, 1.05
C7_CONJ_TOL, C7_PT_UNBROKEN, C7_PT_BROKEN, C7_N = 1e-8, 1e-9, 1e-2, 24
C8_MAX_TOTAL = 4


def grid_params(eps, shift, **kw):
    # (0, 1) is Model 1 itself; every other shift pair runs as Model 2
    if shift == (0.0, 1.0):
        return ModelParams.model1(eps, **kw)
    return ModelParams.model2(eps, *shift, **kw)


UNBROKEN_GRID = [grid_params(e, s) for e in EPSILONS for s in SHIFTS]


def label(p):
    return f"model{p.model.value} eps={p.epsilon} tau=({p.tau1},{p.tau2})"


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} | {detail}")
    return emit


def test_criterion_1_closed_form_vs_oracle(verdict):
    start = time.perf_counter()
    worst, failures = 0.0, []
    for params in UNBROKEN_GRID:
        rows = fockrep.compare_with_closed_form(params, C1_N, C1_MAX_TOTAL)
        delta = max(r["delta"] for r in rows)
        worst = max(worst, delta)
        if delta > C1_TOL:
            failures.append(f"{label(params)} max|dE|={delta:.2e}")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed <= C1_SECONDS
    verdict(1, ok, f"worst |dE|={worst:.2e} (tol {C1_TOL:g}), {elapsed:.1f}s; "
                   f"over tolerance: {'; '.join(failures) or 'none'}")
    assert elapsed <= C1_SECONDS
    assert not failures, failures


def test_criterion_2_counterpart_commutator(verdict):
    defects = [fockrep.commutator_counterpart_check(ModelParams.model1(e), C2_N).defects["commutator_plus_4p2"]
               for e in (0.0, 0.5, 0.9)]
    ok = max(defects) <= C2_TOL
    verdict(2, ok, f"max ||[H,Hh]+4p2|| = {max(defects):.2e} (tol {C2_TOL:g})")
    assert ok


def test_criterion_3_ladder_algebra(verdict):
    worst, where = 0.0, ""
    for params in UNBROKEN_GRID:
        report = fockrep.ladder_algebra_check(params, C3_N)
        if report.worst > worst:
            worst, where = report.worst, label(params)
    ok = worst <= C3_TOL
    verdict(3, ok, f"worst defect {worst:.2e} at {where} (tol {C3_TOL:g})")
    assert ok


def test_criterion_4_metric_positivity(verdict):
    worst_herm, min_eig = 0.0, np.inf
    for params in UNBROKEN_GRID:
        report = fockrep.verify_pseudo_hermiticity(params, C4_N)
        worst_herm = max(worst_herm, report.defects["eta_hermiticity"])
        min_eig = min(min_eig, report.details["min_eigenvalue"])
    ok = worst_herm <= C4_TOL and min_eig > 0
    verdict(4, ok, f"max eta hermiticity defect {worst_herm:.2e} (tol {C4_TOL:g}), "
                   f"smallest interior eigenvalue {min_eig:.2e}")
    assert ok


def test_criterion_5_gram_orthonormality(verdict):
    worst, worst_route = 0.0, 0.0
    for params in UNBROKEN_GRID:
        pv = wavefn.gram(params, C5_NMAX, C5_ORDER, "pv")
        ptv = wavefn.gram(params, C5_NMAX, C5_ORDER, "ptv")
        worst = max(worst, pv.max_deviation)
        worst_route = max(worst_route, float(np.max(np.abs(pv.entries - ptv.entries))))
    ok = worst <= C5_TOL and worst_route <= C5_ROUTE_TOL
    verdict(5, ok, f"max |G - 1| = {worst:.2e} (tol {C5_TOL:g}), "
                   f"max |PV - PTV| = {worst_route:.2e} (tol {C5_ROUTE_TOL:g})")
    assert ok


def test_criterion_6_contour_shift(verdict):
    worst, count = 0.0, 0
    for params in UNBROKEN_GRID:
        for n in level_indices(3):
            for m in level_indices(3):
                ef_n, ef_m = wavefn.eigenfunction(params, *n), wavefn.eigenfunction(params, *m)
                worst = max(worst, wavefn.contour_shift_check(ef_n, ef_m))
                count += 1
    ok = worst <= C6_TOL
    verdict(6, ok, f"max |shifted - real axis| = {worst:.2e} over {count} pairs (tol {C6_TOL:g})")
    assert ok


def test_criterion_7_pt_breaking(verdict):
    config = cli.RunConfig("phase-scan", model=1, eps_from=0.0, eps_to=2.0, steps=40,
                           oracle=True, truncation=C7_N)
    status, text = cli.run(config)
    assert status == cli.EXIT_OK
    points = reports.loads(text)["points"]
    unbroken = [p for p in points if p["epsilon"] <= C7_UNBROKEN_MAX]
    broken = [p for p in points if p["epsilon"] >= C7_BROKEN_MIN]
    real_ok = all(p["max_abs_imag"] <= C7_IMAG_TOL for p in unbroken)
    complex_ok = all(p["max_abs_imag"] > C7_IMAG_TOL for p in broken)
    conj_worst = max(p["oracle_conjugation_defect"] for p in broken)

    # broken oracle spectra contain genuine conjugate pairs, not just real values
    pairs_ok = True
    for eps in (1.05, 1.5, 2.0):
        eig = fockrep.oracle_eigensolve(ModelParams.model1(eps), C7_N).eigenvalues
        scale = max(1.0, float(np.max(np.abs(eig))))
        paired = [z for z in eig if abs(z.imag) > 0.5
                  and np.min(np.abs(eig - z.conjugate())) <= C7_CONJ_TOL * scale]
        pairs_ok &= bool(paired)

    pt_unbroken = max(wavefn.pt_deviation(ModelParams.model1(e), *n)
                      for e in (0.0, 0.3, 0.6, 0.9, 0.95) for n in level_indices(4))
    pt_broken = {}
    for eps in (1.05, 1.5, 2.0):
        for zeta in (1, -1):
            params = ModelParams.model1(eps, zeta=zeta)
            pt_broken[(eps, zeta)] = max(wavefn.pt_deviation(params, *n) for n in level_indices(4))
    broken_pt_ok = all(v >= C7_PT_BROKEN for v in pt_broken.values())

    ok = (real_ok and complex_ok and conj_worst <= C7_CONJ_TOL and pairs_ok
          and pt_unbroken <= C7_PT_UNBROKEN and broken_pt_ok)
    verdict(7, ok,
            f"real for eps<=0.95: {real_ok}; complex for eps>=1.05: {complex_ok}; "
            f"worst conjugation defect {conj_worst:.1e} (tol {C7_CONJ_TOL:g}); pairs |Im|>0.5: {pairs_ok}; "
            f"PT deviation unbroken max {pt_unbroken:.1e} (tol {C7_PT_UNBROKEN:g}), "
            f"broken min-over-params of max-over-index {min(pt_broken.values()):.2f} (need >= {C7_PT_BROKEN:g})")
    assert ok


def test_criterion_8_gauge_and_zeta(verdict):
    gauges = [(1 / np.sqrt(2), 1 / np.sqrt(2)), (0.5, 0.5), (1.0, 2.0), (-0.3, 1.7), (3.0, -0.25)]
    bases = [grid_params(e, s) for e in (0.0, 0.3, 0.6, 0.9, 1.5, -2.5) for s in SHIFTS]
    gauge_ok = zeta_ok = True
    for base in bases:
        for zeta in (1, -1):
            ref = [lv.value for lv in spectrum_table(base.replace(zeta=zeta), C8_MAX_TOTAL)]
            for a, b in gauges:
                got = [lv.value for lv in spectrum_table(base.replace(a=a, b=b, zeta=zeta), C8_MAX_TOTAL)]
                gauge_ok &= got == ref
        plus = Counter(lv.value for lv in spectrum_table(base.replace(zeta=1), C8_MAX_TOTAL))
        minus = Counter(lv.value for lv in spectrum_table(base.replace(zeta=-1), C8_MAX_TOTAL))
        zeta_ok &= plus == minus
    ok = gauge_ok and zeta_ok
    verdict(8, ok, f"bit-identical across gauges: {gauge_ok}; zeta-flip multisets identical: {zeta_ok} "
                   f"({len(bases)} parameter sets, n1+n2 <= {C8_MAX_TOTAL})")
    assert ok


def test_grid_is_unbroken():
    assert all(classify_regime(p.epsilon) is Regime.UNBROKEN for p in UNBROKEN_GRID)
