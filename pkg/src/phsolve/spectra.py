"""
Dense eigensolvers, greedy spectrum matching and analytic reference spectra.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as sla

from .errors import ConfigurationError, SolverError


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenvalues sorted by real part, optional grid-normalized eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = field(default=None, repr=False)
    solver: str = "symmetric"
    residual_max: float = float("nan")
    matrix_norm: float = float("nan")

    def __len__(self):
        return len(self.eigenvalues)

    def lowest(self, k):
        return self.eigenvalues[:k]


@dataclass(frozen=True)
class MatchReport:
    pairs: List[Tuple[int, int, float, float]]
    k_matched: int
    max_abs_re_diff: float
    max_abs_im: float
    tol_re: float
    tol_im: float

    @property
    def passed(self):
        return self.max_abs_re_diff <= self.tol_re and self.max_abs_im <= self.tol_im


def _matrix_stats(m):
    return (f"shape={m.shape}, finite={bool(np.all(np.isfinite(m)))}, "
            f"max|M|={np.max(np.abs(m)) if m.size else 0:.3e}")


def _guard_finite(m):
    if not np.all(np.isfinite(m)):
        raise SolverError(f"matrix has non-finite entries ({_matrix_stats(m)})")


def _normalize(vecs, measure):
    """Columns scaled to sum |v|^2 h = 1, largest-magnitude entry made real positive."""
    norms = np.sqrt(np.sum(np.abs(vecs) ** 2, axis=0) * measure)
    vecs = vecs / norms
    idx = np.argmax(np.abs(vecs), axis=0)
    pivot = vecs[idx, np.arange(vecs.shape[1])]
    return vecs * (np.abs(pivot) / pivot)


def _residual_max(m, vals, vecs):
    if vecs is None or vecs.shape[1] == 0:
        return float("nan")
    r = m @ vecs - vecs * vals[None, :]
    return float(np.max(np.linalg.norm(r, axis=0) / np.linalg.norm(vecs, axis=0)))


def _unwrap(op):
    m = getattr(op, "matrix", op)
    measure = getattr(op, "measure", 1.0)
    return np.asarray(m), measure


def eigen_hermitian(op, k=None, vectors=True):
    """Real spectrum of a Hermitian operator (LAPACK ``?syevr``/``?heevr``).

    ``k`` restricts the computation to the lowest ``k`` eigenpairs.
    """
    if getattr(op, "hermiticity", "hermitian") != "hermitian":
        raise ConfigurationError("eigen_hermitian needs an operator tagged hermitian")
    m, measure = _unwrap(op)
    _guard_finite(m)
    n = m.shape[0]
    subset = None if k is None or k >= n else (0, int(k) - 1)
    try:
        if vectors:
            vals, vecs = sla.eigh(m, subset_by_index=subset, driver="evr")
        else:
            vals = sla.eigh(m, eigvals_only=True, subset_by_index=subset, driver="evr")
            vecs = None
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"symmetric eigensolver failed: {exc} ({_matrix_stats(m)})") from exc
    if vecs is not None:
        vecs = _normalize(vecs, measure)
    return SpectrumResult(vals.astype(complex), vecs, "symmetric",
                          _residual_max(m, vals, vecs), float(np.linalg.norm(m)))


def eigen_general(op, k=None, vectors=False):
    """Complex spectrum of an arbitrary square matrix (LAPACK ``?geev``), sorted by real part.

    ``k`` truncates the returned list after sorting; the full problem is
    always solved.
    """
    m, measure = _unwrap(op)
    _guard_finite(m)
    try:
        if vectors:
            vals, vecs = sla.eig(m, right=True)
        else:
            vals, vecs = sla.eigvals(m), None
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"general eigensolver failed: {exc} ({_matrix_stats(m)})") from exc
    order = np.lexsort((vals.imag, vals.real))
    if k is not None:
        order = order[:k]
    vals = vals[order]
    if vecs is not None:
        vecs = _normalize(vecs[:, order], measure)
    return SpectrumResult(vals.astype(complex), vecs, "general",
                          _residual_max(m, vals, vecs), float(np.linalg.norm(m)))


def match_spectra(a, b, k, tol_re, tol_im):
    """Greedy nearest-real-part pairing of the ``k`` lowest levels of ``a`` (H) and ``b`` (H_H).

    For each level of ``a`` in order, the closest still-unmatched level of
    ``b`` is taken; ties go to the lower index.
    """
    ea = np.asarray(getattr(a, "eigenvalues", a), dtype=complex)
    eb = np.asarray(getattr(b, "eigenvalues", b), dtype=complex)
    if len(ea) < k or len(eb) < k:
        raise ConfigurationError(f"match_spectra needs >= {k} eigenvalues on both sides")
    ea, eb = ea[:k], eb[:k]
    free = list(range(k))
    pairs = []
    for i, z in enumerate(ea):
        diffs = [abs(z.real - eb[j].real) for j in free]
        pick = int(np.argmin(diffs))
        j = free.pop(pick)
        pairs.append((i, j, float(diffs[pick]), float(abs(z.imag))))
    max_re = max((p[2] for p in pairs), default=0.0)
    max_im = max((p[3] for p in pairs), default=0.0)
    return MatchReport(pairs, k, max_re, max_im, float(tol_re), float(tol_im))


# -- analytic oracles ----------------------------------------------------------

def morse_analytic(D, alpha, n_level):
    """Bound level E_n = 2 alpha sqrt(D)(n + 1/2) - alpha^2 (n + 1/2)^2 of p² + D(1 - e^{-alpha x})².

    Levels exist while n + 1/2 < sqrt(D)/alpha; returns None above that.
    """
    if D <= 0 or alpha <= 0 or n_level < 0:
        raise ConfigurationError("morse_analytic needs D > 0, alpha > 0, n >= 0")
    s = n_level + 0.5
    if s >= np.sqrt(D) / alpha:
        return None
    e = 2.0 * alpha * np.sqrt(D) * s - alpha ** 2 * s ** 2
    return e if 0.0 < e < D else None


def morse_levels(D, alpha):
    out = []
    n = 0
    while (e := morse_analytic(D, alpha, n)) is not None:
        out.append(e)
        n += 1
    return out


def harmonic_levels(k, a=0.5):
    """p² + (2a)² x²: E_n = 2a(2n + 1)."""
    return [2.0 * a * (2 * n + 1) for n in range(k)]


def _pair_sums(ex, ey, k):
    return sorted(x + y for x in ex for y in ey)[:k]


def analytic_levels(model, k):
    """Lowest ``k`` exact levels of the model's Hermitian partner, or None.

    Returns fewer than ``k`` values when the oracle has fewer bound levels.
    """
    oracle = model.analytic_spectrum
    p = model.params
    if oracle == "harmonic":
        return harmonic_levels(k, p.get("a", 0.5))
    if oracle == "morse":
        return morse_levels(p["D"], p["alpha"])[:k]
    if oracle == "harmonic_2d":
        e = harmonic_levels(k, p.get("a", 0.5))
        return _pair_sums(e, e, k)
    if oracle == "morse_harmonic_2d":
        return _pair_sums(morse_levels(p["D"], p["alpha"]), harmonic_levels(k, p.get("a", 0.5)), k)
    return None
