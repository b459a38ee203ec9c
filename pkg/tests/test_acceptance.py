"""The ten acceptance checks, one test each, with a pass/fail line per run.

Tolerances are pinned inside horocurv.acceptance; these tests only execute
and report.  The suite is also reachable as ``horocurv verify``.
"""

from horocurv.acceptance import CRITERIA


def _run(cid):
    res = CRITERIA[cid]()
    print(res.line())
    for msg in res.details:
        print("   ", msg)
    assert res.passed, "; ".join(res.details)


def test_criterion_01_flat_invariant_vanishes():
    _run(1)


def test_criterion_02_constant_curvature_invariant():
    _run(2)


def test_criterion_03_circle_curvature_closed_forms():
    _run(3)


def test_criterion_04_large_circle_sandwich():
    _run(4)


def test_criterion_05_jacobi_bounds_suite():
    _run(5)


def test_criterion_06_phase_derivative_fidelity():
    _run(6)


def test_criterion_07_mixed_bound_saturation():
    _run(7)


def test_criterion_08_hessian_classification():
    _run(8)


def test_criterion_09_torus_decay():
    _run(9)


def test_criterion_10_oscillatory_sweep_slopes():
    _run(10)
