"""
Dense matrices for H_H = p² + V + f'², H = p² + V + i(f'p + pf') and η = e^{2f}.

With p = -i d/dx the symmetrized term i(f'p + pf') is the real matrix
F·D1 + D1·F (F = diag f'), so every matrix here is real even though H is
not symmetric.  In the momentum representation x = +i d/dp and the dual
term -i(g'x + xg') is again G·D1 + D1·G, so both representations share one
assembly path.

Two construction modes are available for H:

``continuum``   discretize the differential operator directly (p² -> -D2);
``similarity``  conjugate the discrete H_H by S = diag(e^{f(x_j)}), entry by
                entry as (H_H)_jk e^{f_j - f_k}, which is exactly isospectral.
"""
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import kernels
from .errors import ConditioningError, ConfigurationError, UnsupportedModelError
from .grid import Grid, diff_matrix
from .model import evaluate, evaluate_prime

MODES = ("continuum", "similarity")

# per-entry exponent guard for similarity scaling
SIMILARITY_EXPONENT_LIMIT = 300.0
# |2f| guard for the metric
METRIC_EXPONENT_LIMIT = 700.0


@dataclass(frozen=True)
class OperatorMatrix:
    matrix: np.ndarray = field(repr=False)
    hermiticity: str
    mode: str
    grid: Any
    model: Any
    p2: str = "-D2"
    partner: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def measure(self):
        """Grid volume element h (1D) or hx*hy (2D)."""
        if isinstance(self.grid, tuple):
            return self.grid[0].h * self.grid[1].h
        return self.grid.h


@dataclass(frozen=True)
class MetricMatrix:
    diagonal: np.ndarray = field(repr=False)
    log_condition: float
    f_values: np.ndarray = field(repr=False)

    def dense(self):
        return np.diag(self.diagonal)


def hermiticity_defect(m):
    """max |M - M^†| relative to max |M|."""
    scale = np.max(np.abs(m))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)) / scale)


def _require_1d(model, what):
    if model.dimension != 1:
        raise UnsupportedModelError(f"{what} needs a one-dimensional model, got {model.name!r}")


def _check_scheme(scheme):
    if scheme not in ("central2", "central4"):
        raise ConfigurationError(f"unknown scheme {scheme!r}")


def _check_mode(mode):
    if mode not in MODES:
        raise ConfigurationError(f"unknown construction mode {mode!r}; expected one of {MODES}")


def _axis_terms(grid, V, f):
    x = grid.points
    return evaluate(V, x), evaluate_prime(f, x)


def _hermitian_1d(grid, V, f, scheme, fp_scale=1.0):
    v, fp = _axis_terms(grid, V, f)
    fp = fp * fp_scale
    m = -diff_matrix(grid, "second", scheme).matrix.copy()
    m[np.diag_indices_from(m)] += v + fp * fp
    return m


def _continuum_1d(grid, V, f, scheme, fp_scale=1.0):
    v, fp = _axis_terms(grid, V, f)
    d1 = np.ascontiguousarray(diff_matrix(grid, "first", scheme).matrix)
    m = kernels.symmetrized_product(d1, np.ascontiguousarray(fp * fp_scale))
    m -= diff_matrix(grid, "second", scheme).matrix
    m[np.diag_indices_from(m)] += v
    return m


def similarity_transform(hh, f_values):
    """Return S·H_H·S⁻¹ with S = diag(e^f), evaluated on the nonzero pattern."""
    out, max_expo = kernels.similarity_scale(np.ascontiguousarray(hh, dtype=float),
                                             np.ascontiguousarray(f_values, dtype=float))
    if max_expo > SIMILARITY_EXPONENT_LIMIT:
        raise ConditioningError(
            f"similarity scaling needs |f(x_j) - f(x_k)| = {max_expo:.1f} > "
            f"{SIMILARITY_EXPONENT_LIMIT:g} inside the matrix band; refine the grid or shrink the domain")
    return out


def build_hermitian(grid, model, scheme="central2"):
    """Real symmetric matrix -D2 + diag(V + f'²)."""
    _require_1d(model, "build_hermitian")
    _check_scheme(scheme)
    m = _hermitian_1d(grid, model.V, model.f, scheme)
    return OperatorMatrix(m, "hermitian", "continuum", grid, model)


def build_pseudo(grid, model, scheme="central2", mode="continuum"):
    """Non-Hermitian partner H in the requested construction mode."""
    _require_1d(model, "build_pseudo")
    _check_scheme(scheme)
    _check_mode(mode)
    scale = 1.0 + model.fprime_defect
    if mode == "continuum":
        m = _continuum_1d(grid, model.V, model.f, scheme, scale)
        return OperatorMatrix(m, "non_hermitian", mode, grid, model)
    hh = _hermitian_1d(grid, model.V, model.f, scheme, scale)
    m = similarity_transform(hh, evaluate(model.f, grid.points))
    return OperatorMatrix(m, "non_hermitian", mode, grid, model, partner=hh)


def _metric_from_f(f_values):
    f_values = np.asarray(f_values, dtype=float)
    worst = float(np.max(np.abs(2.0 * f_values)))
    if worst > METRIC_EXPONENT_LIMIT:
        raise ConditioningError(
            f"metric exponent |2f| reaches {worst:.1f} > {METRIC_EXPONENT_LIMIT:g}; shrink the domain")
    return MetricMatrix(np.exp(2.0 * f_values),
                        float(2.0 * (f_values.max() - f_values.min())), f_values)


def build_metric(grid, model):
    """η = diag(e^{2f(x_j)}) with log_condition = 2(max f - min f).

    Accepts a pair of grids for separable 2D models (row-major x, y order).
    """
    if isinstance(grid, tuple):
        return _metric_from_f(_f_values_2d(grid[0], grid[1], model))
    _require_1d(model, "build_metric")
    return _metric_from_f(evaluate(model.f, grid.points))


def build_momentum_dual(grid_p, model, scheme="central2"):
    """Hermitian partner x² + V(p) + g'² and dual x² + V(p) - i(g'x + xg') on a p grid."""
    if model.representation != "momentum":
        raise ConfigurationError(
            f"build_momentum_dual needs a momentum-representation model, got {model.name!r}")
    herm = build_hermitian(grid_p, model, scheme)
    pseudo = build_pseudo(grid_p, model, scheme, "continuum")
    return herm, pseudo


def _f_values_2d(grid_x, grid_y, model):
    if model.dimension != 2 or not model.separable:
        raise UnsupportedModelError(f"model {model.name!r} is not an additively separable 2D model")
    fx = evaluate(model.f[0], grid_x.points)
    fy = evaluate(model.f[1], grid_y.points)
    return (fx[:, None] + fy[None, :]).ravel()


def _kron_sum(a, b):
    return np.kron(a, np.eye(b.shape[0])) + np.kron(np.eye(a.shape[0]), b)


def build_2d(grid_x, grid_y, model, scheme="central2", mode="continuum"):
    """(H_H, H) for a separable 2D model as Kronecker sums of 1D pieces.

    Flattened index is ``i * n_y + j`` for the point (x_i, y_j).
    """
    if model.dimension != 2 or not model.separable:
        raise UnsupportedModelError(f"build_2d needs a separable 2D model, got {model.name!r}")
    _check_scheme(scheme)
    _check_mode(mode)
    grids = (grid_x, grid_y)
    scale = 1.0 + model.fprime_defect
    hh = _kron_sum(_hermitian_1d(grid_x, model.V[0], model.f[0], scheme),
                   _hermitian_1d(grid_y, model.V[1], model.f[1], scheme))
    herm = OperatorMatrix(hh, "hermitian", "continuum", grids, model)
    if mode == "continuum":
        m = _kron_sum(_continuum_1d(grid_x, model.V[0], model.f[0], scheme, scale),
                      _continuum_1d(grid_y, model.V[1], model.f[1], scheme, scale))
        return herm, OperatorMatrix(m, "non_hermitian", mode, grids, model)
    partner = hh
    if scale != 1.0:
        partner = _kron_sum(_hermitian_1d(grid_x, model.V[0], model.f[0], scheme, scale),
                            _hermitian_1d(grid_y, model.V[1], model.f[1], scheme, scale))
    m = similarity_transform(partner, _f_values_2d(grid_x, grid_y, model))
    return herm, OperatorMatrix(m, "non_hermitian", mode, grids, model, partner=partner)


def build_pair(grid, model, scheme="central2", mode="continuum"):
    """(H_H, H) for any catalog model; ``grid`` is a Grid or an (x, y) pair."""
    if model.dimension == 2:
        if not isinstance(grid, tuple):
            raise ConfigurationError("2D models need a pair of grids")
        return build_2d(grid[0], grid[1], model, scheme, mode)
    if not isinstance(grid, Grid):
        raise ConfigurationError("1D models need a single grid")
    return build_hermitian(grid, model, scheme), build_pseudo(grid, model, scheme, mode)


def f_values(grid, model):
    if isinstance(grid, tuple):
        return _f_values_2d(grid[0], grid[1], model)
    return evaluate(model.f, grid.points)
