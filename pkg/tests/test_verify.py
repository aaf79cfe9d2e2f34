import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phsolve.errors import ConditioningError
from phsolve.grid import make_grid
from phsolve.model import FunctionSpec, catalog_1d, make_model
from phsolve.operators import build_metric, build_pseudo
from phsolve.spectra import eigen_general, eigen_hermitian
from phsolve.operators import build_hermitian
from phsolve.verify import (CheckResult, EmptyReportError, VerificationReport,
                            check_eigenfunction_map, check_isospectral, check_level_normalizability,
                            check_normalizability, check_operator_identity, check_pseudo_hermiticity,
                            check_pseudo_hermiticity_order, map_eigenfunction, observed_orders,
                            refine, run_all, skipped)


# -- operator identity

@settings(max_examples=20, deadline=None)
@given(model=st.sampled_from(catalog_1d()), n=st.integers(8, 160),
       scheme=st.sampled_from(["central2", "central4"]), half=st.floats(1.0, 8.0))
def test_operator_identity_any_grid(model, n, scheme, half):
    lo, hi = (-2.0, -2.0 + 2 * half) if model.name == "morse" else (-half, half)
    res = check_operator_identity(make_grid(lo, hi, n), model, scheme)
    assert res.passed and res.residual <= 1e-13


def test_operator_identity_zero_gauge_exact():
    res = check_operator_identity(make_grid(-3, 3, 50), make_model("free"))
    assert res.residual == 0.0


def test_operator_identity_harmonic_512(harmonic):
    assert check_operator_identity(make_grid(-6, 6, 512), harmonic).residual <= 1e-13


def test_operator_identity_ignores_defect(harmonic):
    # the identity is internal algebra: a corrupted f' still satisfies it
    res = check_operator_identity(make_grid(-6, 6, 200), harmonic.corrupted(1e-3))
    assert res.passed


# -- pseudo-Hermiticity

def test_pseudo_hermiticity_trivial_metric(small_grid):
    free = make_model("free")
    eta = build_metric(small_grid, free)
    for mode in ("similarity", "continuum"):
        res = check_pseudo_hermiticity(build_pseudo(small_grid, free, mode=mode), eta)
        assert res.residual <= 1e-14


def test_pseudo_hermiticity_similarity_harmonic(harmonic):
    g = make_grid(-4, 4, 800)
    eta = build_metric(g, harmonic)
    assert eta.log_condition <= 16
    res = check_pseudo_hermiticity(build_pseudo(g, harmonic, mode="similarity"), eta)
    assert res.passed and res.residual <= 1e-10


def test_pseudo_hermiticity_wrong_sign_is_large(harmonic):
    """Hη - ηH† vanishes; the transposed ordering ηH - H†η does not."""
    g = make_grid(-4, 4, 200)
    h = build_pseudo(g, harmonic, mode="similarity").matrix
    eta = build_metric(g, harmonic).diagonal
    wrong = eta[:, None] * h - h.T * eta[None, :]
    assert np.linalg.norm(wrong) / np.linalg.norm(eta[:, None] * h) > 1e-2


def test_pseudo_hermiticity_skips_ill_conditioned(harmonic):
    g = make_grid(-10, 10, 200)
    res = check_pseudo_hermiticity(build_pseudo(g, harmonic, mode="similarity"),
                                   build_metric(g, harmonic))
    assert res.skipped and "log_condition" in res.reason


@pytest.mark.parametrize("name,domain", [("harmonic_gauge", (-10, 10)), ("morse", (-2, 9)),
                                         ("miao_xu", (-8, 8)), ("harmonic_dual_p", (-10, 10))])
def test_pseudo_hermiticity_continuum_order(name, domain):
    res = check_pseudo_hermiticity_order(make_model(name), refine(make_grid(*domain, 1999), 3))
    assert res.passed, res.details
    assert np.min(res.details["observed_orders"]) >= 1.9


def test_refine_halves_h():
    grids = refine(make_grid(0, 1, 1999), 3)
    assert [g.n for g in grids] == [499, 999, 1999]
    np.testing.assert_allclose([grids[0].h / grids[1].h, grids[1].h / grids[2].h], 2.0)


def test_observed_orders_exact_power():
    hs = np.array([0.4, 0.2, 0.1])
    np.testing.assert_allclose(observed_orders(hs, 3 * hs ** 2), [2.0, 2.0])


# -- isospectrality

@pytest.mark.parametrize("model", catalog_1d(), ids=lambda m: m.name)
def test_isospectral_similarity_catalog(model):
    domain = (-2, 9) if model.name == "morse" else (-8, 8)
    res = check_isospectral(model, make_grid(*domain, 500), "similarity", 8)
    assert res.passed, res.details


def test_isospectral_continuum_morse(morse):
    res = check_isospectral(morse, make_grid(-2, 9, 1500), "continuum", 3, 5e-2, 1e-4)
    assert res.passed and res.details["max_abs_im"] <= 1e-4


# -- eigenfunction map

def test_map_identity_for_zero_gauge(small_grid):
    psi = eigen_hermitian(build_hermitian(small_grid, make_model("free")), 1).eigenvectors[:, 0]
    phi = map_eigenfunction(psi, FunctionSpec("zero"), small_grid)
    np.testing.assert_allclose(phi.values, psi, atol=1e-14)
    assert phi.log_norm_before == pytest.approx(0.0, abs=1e-13)


def test_map_harmonic_ground_state_is_gaussian(harmonic):
    g = make_grid(-8, 8, 1000)
    psi = eigen_hermitian(build_hermitian(g, harmonic), 1).eigenvectors[:, 0]
    phi = map_eigenfunction(psi, harmonic.f, g).values
    ref = np.exp(-g.points ** 2)
    ref /= np.sqrt(np.sum(ref ** 2) * g.h)
    assert np.max(np.abs(phi - ref)) < 1e-3


def test_map_residual_second_order(harmonic):
    errs, hs = [], []
    for g in refine(make_grid(-8, 8, 1599), 3):
        errs.append(check_eigenfunction_map(harmonic, g, 0, "continuum").residual)
        hs.append(g.h)
    assert np.min(observed_orders(hs, errs)) >= 1.9


def test_map_residual_similarity_machine_level(morse):
    res = check_eigenfunction_map(morse, make_grid(-2, 9, 800), 0, "similarity", tol=1e-8)
    assert res.passed


def test_map_morse_ground_state_matches_general_eigenvector(morse):
    g = make_grid(-2, 9, 800)
    psi = eigen_hermitian(build_hermitian(g, morse), 1).eigenvectors[:, 0]
    phi = map_eigenfunction(psi, morse.f, g)
    assert np.isfinite(phi.log_norm_before)
    v = eigen_general(build_pseudo(g, morse, mode="continuum"), 1, vectors=True).eigenvectors[:, 0]
    overlap = abs(np.vdot(v, phi.values)) * g.h
    assert overlap > 1 - 1e-3


def test_map_overflow_guard():
    g = make_grid(0, 40, 50)
    with pytest.raises(ConditioningError):
        map_eigenfunction(np.ones(50), FunctionSpec("polynomial", {"coeffs": [0, 0, 1.0]}), g)


# -- normalizability

def test_normalizability_harmonic(harmonic):
    g = make_grid(-10, 10, 2000)
    res = check_level_normalizability(harmonic, g, 0, tol=1e-12)
    assert res.passed
    assert res.details["slope_left"] < 0 and res.details["slope_right"] < 0


@pytest.mark.parametrize("level,expected", [(0, True), (1, True), (2, True), (3, False)])
def test_normalizability_morse_levels(morse, level, expected):
    res = check_level_normalizability(morse, make_grid(-2, 9, 1500), level)
    assert res.passed is expected
    # analytic tail exponent sqrt(D - E_n) - sqrt(D)/2 changes sign between E_2 and E_3
    assert (res.details["energy"] < 27.0) is expected


def test_normalizability_growing_tail_fails():
    g = make_grid(0, 5, 100)
    res = check_normalizability(np.exp(g.points), g)
    assert not res.passed and res.details["slope_right"] > 0


# -- aggregation

def test_report_rejects_all_skipped():
    with pytest.raises(EmptyReportError):
        VerificationReport("m", {}, "continuum", [skipped("a", "why")])


def test_report_sorted_and_skips_excluded():
    checks = [CheckResult("z", 0.0, 1.0, True), skipped("a", "no"), CheckResult("m", 0.5, 1.0, True)]
    rep = VerificationReport("m", {}, "both", checks)
    assert [c.check_id for c in rep.checks] == ["a", "m", "z"]
    assert rep.overall
    rep.checks.append(CheckResult("q", 2.0, 1.0, False))
    assert not rep.overall


def test_run_all_harmonic_suite(harmonic):
    rep = run_all(harmonic, make_grid(-8, 8, 800),
                  tolerances={"pseudo_hermiticity_continuum": {"tol": 1e-2},
                              "normalizability": {"tol": 1e-12}})
    failed = [c.check_id for c in rep.checks if not c.passed and not c.skipped]
    assert rep.overall, failed
    ids = [c.check_id for c in rep.checks]
    assert ids == sorted(ids)


def test_run_all_trivial_model_zero_residuals():
    rep = run_all(make_model("free"), make_grid(-8, 8, 300),
                  tolerances={"normalizability": {"levels": []},
                              "eigenfunction_map": {"tol": 1e-8},
                              "isospectral_continuum": {"tol_re": 1e-8, "tol_im": 1e-8}})
    assert rep.overall
    for cid in ("operator_identity", "pseudo_hermiticity_similarity",
                "pseudo_hermiticity_continuum", "mode_difference"):
        assert rep.get(cid).residual == 0.0


def test_run_all_negative_control(harmonic):
    rep = run_all(harmonic.corrupted(1e-3), make_grid(-8, 8, 1000),
                  checks=["operator_identity", "isospectral_similarity", "isospectral_continuum"])
    assert rep.get("operator_identity").passed
    assert not rep.get("isospectral_similarity").passed
    assert not rep.get("isospectral_continuum").passed
    assert not rep.overall


def test_run_all_2d_records_skips():
    g = make_grid(-5, 5, 20)
    rep = run_all(make_model("harmonic_2d"), (g, g), k=4,
                  tolerances={"analytic_spectrum": {"atol": 0.5},
                              "isospectral_continuum": {"tol_re": 0.5},
                              "mode_difference": {"tol": 0.5},
                              "pseudo_hermiticity_continuum": {"tol": 1.0}})
    assert rep.get("operator_identity").skipped
    assert rep.overall


def test_run_all_errors_become_skips():
    # exponents beyond the metric guard: checks needing eta are skipped, not raised
    g = make_grid(-40, 40, 200)
    rep = run_all(make_model("harmonic_gauge"), g, checks=["operator_identity",
                                                           "pseudo_hermiticity_similarity"])
    ph = rep.get("pseudo_hermiticity_similarity")
    assert ph.skipped and "ConditioningError" in ph.reason
