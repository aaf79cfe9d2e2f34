"""
Uniform grids on a truncated line and central-difference matrices.

Functions are taken to vanish at ``x_min`` and ``x_max``; the endpoints are
not grid points.  Row ``j`` of a stencil whose half-width reaches past the
ends simply drops the missing neighbours (Dirichlet truncation), which keeps
first-derivative matrices exactly antisymmetric and second-derivative
matrices exactly symmetric.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigurationError

SCHEMES = ("central2", "central4")
ORDERS = ("first", "second")

# (offsets, weights) with weights in units of h^-order
_STENCILS = {
    ("first", "central2"): ((-1, 1), (-0.5, 0.5)),
    ("first", "central4"): ((-2, -1, 1, 2), (1 / 12, -8 / 12, 8 / 12, -1 / 12)),
    ("second", "central2"): ((-1, 0, 1), (1.0, -2.0, 1.0)),
    ("second", "central4"): ((-2, -1, 0, 1, 2),
                             (-1 / 12, 16 / 12, -30 / 12, 16 / 12, -1 / 12)),
}


@dataclass(frozen=True)
class Grid:
    """Interior points ``x_j = x_min + (j + 1) h`` of ``[x_min, x_max]``."""

    x_min: float
    x_max: float
    n: int
    h: float = field(init=False)
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        h = (self.x_max - self.x_min) / (self.n + 1)
        pts = self.x_min + h * np.arange(1, self.n + 1)
        pts.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "points", pts)

    @property
    def length(self):
        return self.x_max - self.x_min

    def metadata(self):
        return {"x_min": self.x_min, "x_max": self.x_max, "n": self.n, "h": self.h}


def make_grid(x_min, x_max, n, *, min_n=8):
    """Build a :class:`Grid`; raises ConfigurationError on bad input."""
    try:
        x_min = float(x_min)
        x_max = float(x_max)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"grid bounds must be real numbers: {exc}") from None
    if not (np.isfinite(x_min) and np.isfinite(x_max)):
        raise ConfigurationError("grid bounds must be finite")
    if not x_min < x_max:
        raise ConfigurationError(f"grid needs x_min < x_max, got [{x_min}, {x_max}]")
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ConfigurationError(f"grid n must be an integer, got {n!r}")
    if n < min_n:
        raise ConfigurationError(f"grid n must be >= {min_n}, got {n}")
    return Grid(x_min, x_max, int(n))


@dataclass(frozen=True)
class DiffMatrix:
    order: str
    scheme: str
    matrix: np.ndarray = field(repr=False)
    grid: Grid

    @property
    def half_width(self):
        return stencil_half_width(self.scheme)


def stencil_half_width(scheme):
    return 1 if scheme == "central2" else 2


def diff_matrix(grid, order="first", scheme="central2"):
    """Dense central-difference matrix for d/dx (``first``) or d²/dx² (``second``).

    >>> g = make_grid(-1.0, 1.0, 3, min_n=3)
    >>> diff_matrix(g, "second").matrix
    array([[-8.,  4.,  0.],
           [ 4., -8.,  4.],
           [ 0.,  4., -8.]])
    """
    if order not in ORDERS:
        raise ConfigurationError(f"unknown derivative order {order!r}")
    if scheme not in SCHEMES:
        raise ConfigurationError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    offsets, weights = _STENCILS[(order, scheme)]
    scale = grid.h if order == "first" else grid.h ** 2
    m = kernels.band_matrix(
        grid.n,
        np.asarray(offsets, dtype=np.int64),
        np.asarray(weights, dtype=np.float64) / scale,
    )
    m.setflags(write=False)
    return DiffMatrix(order, scheme, m, grid)


def interior_mask(grid, scheme="central2"):
    """True away from the boundary band polluted by Dirichlet truncation."""
    hw = stencil_half_width(scheme)
    mask = np.ones(grid.n, dtype=bool)
    mask[:hw] = False
    mask[-hw:] = False
    return mask
