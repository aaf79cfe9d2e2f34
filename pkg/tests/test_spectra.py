import numpy as np
import pytest

from phsolve.errors import ConfigurationError, SolverError
from phsolve.grid import make_grid
from phsolve.model import catalog_1d, make_model
from phsolve.operators import build_hermitian, build_pseudo
from phsolve.spectra import (analytic_levels, eigen_general, eigen_hermitian, match_spectra,
                             morse_analytic, morse_levels)
from phsolve.verify import observed_orders


def _domain(model):
    return {"morse": (-2.0, 9.0)}.get(model.name, (-8.0, 8.0))


# -- Morse oracle: validated against dense diagonalization before it is used anywhere else

def test_morse_formula_values():
    assert morse_analytic(36, 1, 0) == 5.75
    assert morse_analytic(36, 1, 1) == 15.75
    assert morse_analytic(36, 1, 2) == 23.75
    assert morse_analytic(36, 1, 3) == 29.75
    assert morse_analytic(36, 1, 5) == 35.75
    assert morse_analytic(36, 1, 6) is None
    assert len(morse_levels(36, 1)) == 6


def test_morse_formula_cross_validated_by_convergence(morse):
    hs, vals = [], []
    for n in (750, 1500, 3000):
        g = make_grid(-2, 9, n)
        vals.append(eigen_hermitian(build_hermitian(g, morse), 3, vectors=False).eigenvalues.real)
        hs.append(g.h)
    vals = np.array(vals)
    errs = np.abs(vals - [5.75, 15.75, 23.75])
    assert np.all(errs[-1] < 2e-4)
    # h² Richardson limit of the two finest grids
    r = (hs[1] / hs[2]) ** 2
    limit = vals[2] + (vals[2] - vals[1]) / (r - 1)
    np.testing.assert_allclose(limit, [5.75, 15.75, 23.75], atol=1e-4)
    for j in range(3):
        assert np.min(observed_orders(hs, errs[:, j])) >= 1.9


def test_morse_level_count_matches_diagonalization(morse):
    g = make_grid(-2, 40, 4000)
    vals = eigen_hermitian(build_hermitian(g, morse), 12, vectors=False).eigenvalues.real
    assert np.count_nonzero(vals < 36.0) == len(morse_levels(36, 1))


@pytest.mark.parametrize("D,alpha", [(1.0, 2.0), (100.0, 0.5), (4.0, 1.0)])
def test_morse_level_count_other_parameters(D, alpha):
    levels = morse_levels(D, alpha)
    assert len(levels) == int(np.ceil(np.sqrt(D) / alpha - 0.5))
    assert all(0 < e < D for e in levels)
    assert levels == sorted(levels)


# -- solvers

def test_harmonic_lowest_eight(harmonic):
    g = make_grid(-10, 10, 2000)
    res = eigen_hermitian(build_hermitian(g, harmonic), 8)
    exact = np.arange(8) * 2 + 1
    assert np.max(np.abs(res.eigenvalues.real - exact) / exact) < 1e-3
    assert np.all(res.eigenvalues.imag == 0)
    assert res.residual_max <= 1e-8 * res.matrix_norm
    # grid-normalized eigenvectors
    np.testing.assert_allclose(np.sum(np.abs(res.eigenvectors) ** 2, axis=0) * g.h, 1.0, rtol=1e-12)
    gram = res.eigenvectors.T @ res.eigenvectors * g.h
    np.testing.assert_allclose(gram, np.eye(8), atol=1e-10)


def test_particle_in_a_box():
    errs = []
    for n in (199, 399):
        g = make_grid(0, 1, n)
        vals = eigen_hermitian(build_hermitian(g, make_model("free")), 3, vectors=False)
        exact = (np.pi * np.arange(1, 4)) ** 2
        errs.append(np.max(np.abs(vals.eigenvalues.real - exact) / exact))
    assert errs[1] < errs[0] / 3.5


def test_continuum_harmonic_general_solver(harmonic):
    g = make_grid(-10, 10, 2000)
    res = eigen_general(build_pseudo(g, harmonic, mode="continuum"), 5)
    np.testing.assert_allclose(res.eigenvalues.real, [1, 3, 5, 7, 9], atol=1e-2)
    assert np.max(np.abs(res.eigenvalues.imag)) <= 1e-6


@pytest.mark.parametrize("model", catalog_1d(), ids=lambda m: m.name)
def test_similarity_matches_partner(model):
    g = make_grid(*_domain(model), 600)
    hh = build_hermitian(g, model)
    a = eigen_general(build_pseudo(g, model, mode="similarity"), 8)
    b = eigen_hermitian(hh, 8, vectors=False)
    tol = 1e-8 * np.linalg.norm(hh.matrix)
    rep = match_spectra(a, b, 8, tol, tol)
    assert rep.passed, rep


@pytest.mark.parametrize("model", catalog_1d(), ids=lambda m: m.name)
def test_solver_consistency_on_hermitian_input(model):
    g = make_grid(*_domain(model), 300)
    hh = build_hermitian(g, model)
    a = eigen_hermitian(hh, vectors=False).eigenvalues.real
    b = eigen_general(hh).eigenvalues
    assert np.max(np.abs(b.imag)) <= 1e-10 * np.max(np.abs(a))
    np.testing.assert_allclose(b.real, a, rtol=1e-10, atol=1e-10 * np.max(np.abs(a)))


@pytest.mark.parametrize("model", catalog_1d(), ids=lambda m: m.name)
def test_conjugate_pair_closure(model):
    g = make_grid(*_domain(model), 300)
    vals = eigen_general(build_pseudo(g, model, mode="continuum")).eigenvalues
    conj = np.sort_complex(np.conj(vals))
    np.testing.assert_allclose(np.sort_complex(vals), conj, rtol=0,
                               atol=1e-10 * np.max(np.abs(vals)))


def test_general_residual_and_vectors(morse):
    g = make_grid(-2, 9, 400)
    res = eigen_general(build_pseudo(g, morse, mode="continuum"), 4, vectors=True)
    assert res.residual_max <= 1e-8 * res.matrix_norm
    np.testing.assert_allclose(np.sum(np.abs(res.eigenvectors) ** 2, axis=0) * g.h, 1.0, rtol=1e-12)


def test_harmonic_grid_convergence_order(harmonic):
    hs, errs = [], []
    for n in (499, 999, 1999):
        g = make_grid(-10, 10, n)
        e0 = eigen_hermitian(build_hermitian(g, harmonic), 1, vectors=False).eigenvalues[0].real
        hs.append(g.h)
        errs.append(abs(e0 - 1))
    assert np.min(observed_orders(hs, errs)) >= 1.9


def test_eigen_hermitian_rejects_non_hermitian(harmonic, small_grid):
    with pytest.raises(ConfigurationError):
        eigen_hermitian(build_pseudo(small_grid, harmonic))


def test_non_finite_matrix_is_solver_error():
    m = np.eye(4)
    m[1, 2] = np.nan
    with pytest.raises(SolverError, match="non-finite"):
        eigen_general(m)


# -- matching

def test_match_identical():
    a = np.array([1.0, 3.0, 5.0], dtype=complex)
    rep = match_spectra(a, a, 3, 0.0, 0.0)
    assert rep.max_abs_re_diff == 0 and rep.max_abs_im == 0 and rep.passed


def test_match_arithmetic_example():
    rep = match_spectra(np.array([1.001, 3.002, 4.999]), np.array([1.0, 3.0, 5.0]), 3, 0.01, 1e-6)
    assert rep.passed
    assert rep.max_abs_re_diff == pytest.approx(0.002)
    assert [p[:2] for p in rep.pairs] == [(0, 0), (1, 1), (2, 2)]


def test_match_reports_imaginary_failure():
    rep = match_spectra(np.array([1 + 1e-3j, 3]), np.array([1.0, 3.0]), 2, 1e-2, 1e-6)
    assert not rep.passed and rep.max_abs_im == pytest.approx(1e-3)


def test_match_greedy_handles_degenerate_cluster():
    a = np.array([2.0, 4.0001, 3.9999, 6.0])
    b = np.array([2.0, 4.0, 4.0, 6.0])
    rep = match_spectra(a, b, 4, 1e-3, 0)
    assert rep.passed
    assert sorted(p[1] for p in rep.pairs) == [0, 1, 2, 3]


def test_match_needs_k_levels():
    with pytest.raises(ConfigurationError):
        match_spectra(np.ones(2), np.ones(3), 3, 1, 1)


def test_analytic_levels_2d(harmonic):
    assert analytic_levels(make_model("harmonic_2d"), 6) == [2, 4, 4, 6, 6, 6]
    assert analytic_levels(make_model("miao_xu"), 3) is None
    assert analytic_levels(harmonic, 3) == [1, 3, 5]
