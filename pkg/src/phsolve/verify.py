"""
Named residual checks for the similarity construction and their aggregation.

Every check returns a :class:`CheckResult`.  Order-of-accuracy checks
report ``residual = target_order - observed_order`` against tolerance 0, so
``passed`` is always ``residual <= tolerance`` plus, for the spectrum
matching checks, the secondary imaginary-part bound listed in ``details``.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from . import kernels
from .errors import (ConditioningError, ConfigurationError, PhsolveError,
                     UnsupportedModelError)
from .grid import Grid, diff_matrix, make_grid
from .model import evaluate, evaluate_prime, morse_consistency
from .operators import (build_hermitian, build_metric, build_pair, build_pseudo,
                        f_values)
from .spectra import analytic_levels, eigen_general, eigen_hermitian, match_spectra

MAX_LOG_CONDITION = 60.0
MAP_EXPONENT_LIMIT = 300.0


@dataclass
class CheckResult:
    check_id: str
    residual: float
    tolerance: float
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)
    skipped: bool = False
    reason: Optional[str] = None

    def to_dict(self):
        return {
            "check_id": self.check_id,
            "residual": _json_float(self.residual),
            "tolerance": _json_float(self.tolerance),
            "passed": bool(self.passed),
            "skipped": self.skipped,
            "reason": self.reason,
            "details": _jsonable(self.details),
        }


def skipped(check_id, reason, **details):
    return CheckResult(check_id, float("nan"), float("nan"), False, dict(details), True, reason)


def _result(check_id, residual, tol, details=None, extra_ok=True):
    residual = float(residual)
    ok = bool(residual <= tol and extra_ok)
    return CheckResult(check_id, residual, float(tol), ok, dict(details or {}))


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _json_float(obj)
    if isinstance(obj, complex):
        return [_json_float(obj.real), _json_float(obj.imag)]
    return obj


@dataclass
class VerificationReport:
    model: str
    grid: Any
    mode: str
    checks: List[CheckResult]

    def __post_init__(self):
        self.checks = sorted(self.checks, key=lambda c: c.check_id)
        if not any(not c.skipped for c in self.checks):
            raise EmptyReportError(f"no check ran for model {self.model!r}")

    @property
    def overall(self):
        return all(c.passed for c in self.checks if not c.skipped)

    def get(self, check_id):
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def to_dict(self):
        return {
            "model": self.model,
            "grid": self.grid,
            "mode": self.mode,
            "checks": [c.to_dict() for c in self.checks],
            "overall": self.overall,
        }


class EmptyReportError(PhsolveError):
    """Every requested check was skipped."""


# -- helpers -------------------------------------------------------------------

# errors at or below this are rounding, and order estimates from them are meaningless
EXACT_FLOOR = 1e-13


def _order_result(check_id, hs, errs, min_order, details):
    """Order-deficit residual; error sequences at rounding level count as exact."""
    errs = np.asarray(errs, dtype=float)
    if np.max(errs) <= EXACT_FLOOR:
        return _result(check_id, 0.0, 0.0, {**details, "exact": True})
    if errs.ndim == 1:
        orders = observed_orders(hs, errs)
    else:
        orders = np.array([observed_orders(hs, errs[:, j]) for j in range(errs.shape[1])])
    return _result(check_id, min_order - float(np.min(orders)), 0.0,
                   {**details, "observed_orders": orders})


def observed_orders(hs, errors):
    """Pairwise log(e_i / e_{i+1}) / log(h_i / h_{i+1})."""
    hs = np.asarray(hs, dtype=float)
    e = np.asarray(errors, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(e[:-1] / e[1:]) / np.log(hs[:-1] / hs[1:])


def refine(grid, levels=3):
    """``levels`` grids on the same interval ending at ``grid``, h halving each step."""
    ns = [grid.n]
    for _ in range(levels - 1):
        ns.append((ns[-1] + 1) // 2 - 1)
    return [make_grid(grid.x_min, grid.x_max, n) for n in reversed(ns)]


def _grid_meta(grid):
    if isinstance(grid, tuple):
        return {"x": grid[0].metadata(), "y": grid[1].metadata()}
    return grid.metadata()


def _fprime(model, grid):
    return evaluate_prime(model.f, grid.points)


# -- operator identity ---------------------------------------------------------

def check_operator_identity(grid, model, scheme="central2", tol=1e-13):
    """(P + iF')² against P² - F'² + i(F'P + PF') with P = -i D1 (so P² = -D1²).

    In the momentum representation the mirrored identity
    (X - iG')² = X² - G'² - i(G'X + XG') with X = +i D1 is checked.
    """
    if model.dimension != 1:
        raise UnsupportedModelError("check_operator_identity is defined for 1D models")
    d1 = diff_matrix(grid, "first", scheme).matrix
    w = _fprime(model, grid) * (1.0 + model.fprime_defect)
    if model.representation == "coordinate":
        p, sign = -1j * d1, 1.0
    else:
        p, sign = 1j * d1, -1.0
    q = p + sign * 1j * np.diag(w)
    lhs = q @ q
    rhs = p @ p - np.diag(w * w) + sign * 1j * (w[:, None] * p + p * w[None, :])
    denom = np.linalg.norm(rhs)
    res = np.linalg.norm(lhs - rhs) / denom if denom else 0.0
    return _result("operator_identity", res, tol,
                   {"p2": "-D1^2", "scheme": scheme, "representation": model.representation})


# -- pseudo-Hermiticity ---------------------------------------------------------

def gaussian_probes(grid, count=5, width=None):
    """Unit-norm Gaussians centred across the middle half of the domain (columns).

    ``width`` defaults to 10 h.  For a pair of grids the probes are products
    of 1D Gaussians with centres along the diagonal.
    """
    grids = grid if isinstance(grid, tuple) else (grid,)
    axes = []
    for g in grids:
        w = 10.0 * g.h if width is None else width
        centres = np.linspace(g.x_min + 0.25 * g.length, g.x_max - 0.25 * g.length, count)
        axes.append(np.exp(-0.5 * ((g.points[:, None] - centres[None, :]) / w) ** 2))
    if len(axes) == 1:
        v = axes[0]
    else:
        v = np.einsum("ip,jp->ijp", axes[0], axes[1]).reshape(-1, count)
    return v / np.linalg.norm(v, axis=0)


def check_pseudo_hermiticity(H, eta, probes=5, tol=None, width=None,
                             max_log_condition=MAX_LOG_CONDITION):
    """Residual of H η = η H† (equivalently H† = η⁻¹ H η).

    similarity mode: ||Hη - ηH†||_F / ||Hη||_F.
    continuum mode:  max over Gaussian probes v of ||(B - B†) v|| / ||B v|| with
                     B = e^{-f} H e^{f}, the η^{-1/2} congruence of Hη, which keeps
                     only band-local exponents.
    """
    m = H.matrix
    if H.mode == "similarity":
        check_id = "pseudo_hermiticity_similarity"
        tol = 1e-10 if tol is None else tol
        if eta.log_condition > max_log_condition:
            return skipped(check_id, f"log_condition {eta.log_condition:.1f} > {max_log_condition:g}",
                           log_condition=eta.log_condition)
        a = kernels.column_scale(np.ascontiguousarray(m), eta.diagonal)
        res = np.linalg.norm(a - a.conj().T) / np.linalg.norm(a)
        return _result(check_id, res, tol, {"log_condition": eta.log_condition, "norm": "frobenius"})
    check_id = "pseudo_hermiticity_continuum"
    tol = 5e-2 if tol is None else tol
    b, defect = kernels.congruence(np.ascontiguousarray(m), np.ascontiguousarray(eta.f_values))
    v = gaussian_probes(H.grid, probes, width)
    ratios = np.linalg.norm(defect @ v, axis=0) / np.linalg.norm(b @ v, axis=0)
    return _result(check_id, float(np.max(ratios)), tol,
                   {"log_condition": eta.log_condition, "probes": probes,
                    "per_probe": ratios, "width": width if width is not None else "10h"})


def check_pseudo_hermiticity_order(model, grids, scheme="central2", probes=5, min_order=1.9):
    """Continuum-mode probe residual under h-halving; probe width frozen at 10 h_coarse."""
    grids = sorted(grids, key=lambda g: -g.h)
    width = 10.0 * grids[0].h
    errs, hs = [], []
    for g in grids:
        H = build_pseudo(g, model, scheme, "continuum")
        errs.append(check_pseudo_hermiticity(H, build_metric(g, model), probes, width=width).residual)
        hs.append(g.h)
    return _order_result("pseudo_hermiticity_order", hs, errs, min_order,
                         {"n": [g.n for g in grids], "h": hs, "residuals": errs,
                          "min_order": min_order, "width": width})


# -- spectra ---------------------------------------------------------------------

def check_isospectral(model, grid, mode, k=8, tol_re=None, tol_im=None, scheme="central2",
                      relative=False):
    """Match the k lowest levels of H (general solver) against H_H (symmetric solver).

    With ``relative=True`` (or tolerances omitted in similarity mode) the
    tolerances are multiples of ||H_H||_F.
    """
    herm, pseudo = build_pair(grid, model, scheme, mode)
    a = eigen_general(pseudo, k)
    b = eigen_hermitian(herm, k, vectors=False)
    norm = float(np.linalg.norm(herm.matrix))
    if mode == "similarity" and tol_re is None:
        tol_re, tol_im, relative = 1e-8, 1e-8, True
    if tol_re is None:
        tol_re, tol_im = 1e-2, 1e-6
    if tol_im is None:
        tol_im = tol_re
    if relative:
        tol_re, tol_im = tol_re * norm, tol_im * norm
    rep = match_spectra(a, b, k, tol_re, tol_im)
    return _result(f"isospectral_{mode}", rep.max_abs_re_diff, tol_re,
                   {"k": k, "max_abs_im": rep.max_abs_im, "tol_im": tol_im,
                    "hermitian_norm_fro": norm, "pairs": rep.pairs,
                    "hermitian": b.eigenvalues.real, "pseudo": a.eigenvalues},
                   extra_ok=rep.max_abs_im <= tol_im)


def check_analytic_spectrum(model, grid, k=8, rtol=None, atol=None, scheme="central2"):
    """Lowest k levels of H_H against the model's closed-form oracle."""
    exact = analytic_levels(model, k)
    if exact is None:
        return skipped("analytic_spectrum", f"model {model.name!r} has no analytic oracle")
    exact = np.asarray(exact)
    herm, _ = build_pair(grid, model, scheme, "continuum")
    got = eigen_hermitian(herm, len(exact), vectors=False).eigenvalues.real
    if atol is not None:
        res, tol, kind = np.max(np.abs(got - exact)), atol, "absolute"
    else:
        rtol = 1e-3 if rtol is None else rtol
        res, tol, kind = np.max(np.abs(got - exact) / np.abs(exact)), rtol, "relative"
    return _result("analytic_spectrum", res, tol,
                   {"k": len(exact), "exact": exact, "computed": got, "error": kind})


def check_spectrum_order(model, grids, levels=1, scheme="central2", min_order=1.9):
    """Observed order of the lowest ``levels`` H_H eigenvalue errors against the oracle."""
    exact = analytic_levels(model, levels)
    if exact is None:
        return skipped("spectrum_order", f"model {model.name!r} has no analytic oracle")
    grids = sorted(grids, key=lambda g: -g.h)
    errs = []
    for g in grids:
        vals = eigen_hermitian(build_hermitian(g, model, scheme), len(exact), vectors=False)
        errs.append(np.abs(vals.eigenvalues.real - exact))
    errs = np.array(errs)
    hs = [g.h for g in grids]
    return _order_result("spectrum_order", hs, errs, min_order,
                         {"n": [g.n for g in grids], "h": hs, "errors": errs,
                          "min_order": min_order})


def check_mode_difference(model, grid, k=8, tol=1e-2, scheme="central2"):
    """Cross-tabulate continuum and similarity spectra of H (pure discretization gap)."""
    _, hc = build_pair(grid, model, scheme, "continuum")
    _, hs = build_pair(grid, model, scheme, "similarity")
    a = eigen_general(hc, k)
    b = eigen_general(hs, k)
    rep = match_spectra(a, b, k, tol, np.inf)
    return _result("mode_difference", rep.max_abs_re_diff, tol,
                   {"k": k, "continuum": a.eigenvalues, "similarity": b.eigenvalues})


# -- eigenfunctions --------------------------------------------------------------

@dataclass(frozen=True)
class MappedState:
    values: np.ndarray = field(repr=False)
    log_norm_before: float
    grid: Grid


def map_eigenfunction(psi, f, grid):
    """φ_j = e^{f(x_j)} ψ_j, renormalized to sum |φ|² h = 1.

    The norm before renormalization is kept as its logarithm since e^f can
    exceed the float range of the norm even when each entry is finite.
    """
    fv = evaluate(f, grid.points)
    worst = float(np.max(fv))
    if worst > MAP_EXPONENT_LIMIT:
        j = int(np.argmax(fv))
        raise ConditioningError(
            f"e^f overflow guard: f({grid.points[j]:.6g}) = {worst:.1f} > {MAP_EXPONENT_LIMIT:g}")
    scaled = np.exp(fv - worst) * np.asarray(psi)
    norm = np.sqrt(np.sum(np.abs(scaled) ** 2) * grid.h)
    if norm == 0:
        raise ConditioningError("mapped state vanishes on the grid")
    return MappedState(scaled / norm, float(np.log(norm) + worst), grid)


def check_eigenfunction_map(model, grid, level=0, mode="continuum", tol=1e-2, scheme="central2"):
    """||H φ - E φ|| / ||φ|| for φ = e^f ψ, ψ an eigenvector of H_H with eigenvalue E."""
    herm = build_hermitian(grid, model, scheme)
    spec = eigen_hermitian(herm, level + 1)
    psi = spec.eigenvectors[:, level]
    e = spec.eigenvalues[level].real
    phi = map_eigenfunction(psi, model.f, grid).values
    H = build_pseudo(grid, model, scheme, mode)
    res = np.linalg.norm(H.matrix @ phi - e * phi) / np.linalg.norm(phi)
    return _result(f"eigenfunction_map:{level}", res, tol,
                   {"level": level, "energy": e, "mode": mode})


def _outward_slope(x, phi):
    keep = np.abs(phi) > 0
    if np.count_nonzero(keep) < 2:
        return float("-inf")
    return float(np.polyfit(x[keep], np.log(np.abs(phi[keep])), 1)[0])


def check_normalizability(phi, grid, tol=1e-3, check_id="normalizability"):
    """Tail mass over the outer 10% of points (5% per side) and outward decay slopes.

    Slopes come from a linear fit of log|φ| against distance from the
    interior over the outer 20% of points on each side; both must be negative.
    """
    values = getattr(phi, "values", phi)
    values = np.asarray(values)
    n = values.size
    nt = max(1, int(round(0.05 * n)))
    ns = max(2, int(round(0.2 * n)))
    w = np.abs(values) ** 2
    total = np.sum(w)
    tail = float((np.sum(w[:nt]) + np.sum(w[-nt:])) / total)
    x = grid.points
    left = _outward_slope(-x[:ns], values[:ns])
    right = _outward_slope(x[-ns:], values[-ns:])
    return _result(check_id, tail, tol, {"tail_mass": tail, "slope_left": left, "slope_right": right},
                   extra_ok=left < 0 and right < 0)


def check_level_normalizability(model, grid, level, tol=1e-3, scheme="central2"):
    spec = eigen_hermitian(build_hermitian(grid, model, scheme), level + 1)
    mapped = map_eigenfunction(spec.eigenvectors[:, level], model.f, grid)
    res = check_normalizability(mapped, grid, tol, f"normalizability:{level}")
    res.details["energy"] = float(spec.eigenvalues[level].real)
    return res


# -- aggregation -------------------------------------------------------------------

CHECK_IDS = (
    "analytic_spectrum",
    "eigenfunction_map",
    "isospectral_continuum",
    "isospectral_similarity",
    "mode_difference",
    "morse_consistency",
    "normalizability",
    "operator_identity",
    "pseudo_hermiticity_continuum",
    "pseudo_hermiticity_order",
    "pseudo_hermiticity_similarity",
    "spectrum_order",
)

DEFAULT_TOLERANCES = {
    "analytic_spectrum": {"rtol": 1e-3},
    "eigenfunction_map": {"tol": 1e-2, "level": 0},
    "isospectral_continuum": {"tol_re": 1e-2, "tol_im": 1e-6},
    "isospectral_similarity": {"tol_re_rel": 1e-8, "tol_im_rel": 1e-8},
    "mode_difference": {"tol": 1e-2},
    "morse_consistency": {"tol": 1e-12},
    "normalizability": {"tol": 1e-3, "levels": [0]},
    "operator_identity": {"tol": 1e-13},
    "pseudo_hermiticity_continuum": {"tol": 5e-2, "probes": 5},
    "pseudo_hermiticity_order": {"min_order": 1.9, "grid_levels": 3, "probes": 5},
    "pseudo_hermiticity_similarity": {"tol": 1e-10, "max_log_condition": MAX_LOG_CONDITION},
    "spectrum_order": {"min_order": 1.9, "grid_levels": 3, "states": 1},
}


def resolve_tolerances(overrides=None):
    out = {k: dict(v) for k, v in DEFAULT_TOLERANCES.items()}
    for key, val in (overrides or {}).items():
        if key not in out:
            raise ConfigurationError(f"unknown check id {key!r} in tolerances")
        out[key].update(val)
    return out


def _per_axis(grid):
    return grid if isinstance(grid, tuple) else (grid,)


def run_all(model, grid, modes=("continuum", "similarity"), k=8, scheme="central2",
            tolerances=None, checks="all"):
    """Run every applicable check and aggregate into a :class:`VerificationReport`.

    Checks that raise a phsolve error are recorded as skipped with the
    error text; a report in which nothing ran raises EmptyReportError.
    """
    if isinstance(modes, str):
        modes = ("continuum", "similarity") if modes == "both" else (modes,)
    tol = resolve_tolerances(tolerances)
    wanted = set(CHECK_IDS) if checks == "all" else set(checks)
    unknown = wanted - set(CHECK_IDS)
    if unknown:
        raise ConfigurationError(f"unknown check id {sorted(unknown)[0]!r}")
    two_d = model.dimension == 2
    results = []

    def run(check_id, fn, *args, **kwargs):
        if check_id.split(":")[0] not in wanted:
            return
        try:
            out = fn(*args, **kwargs)
        except PhsolveError as exc:
            out = skipped(check_id, f"{type(exc).__name__}: {exc}")
        results.extend(out if isinstance(out, list) else [out])

    def k_for(cid):
        return int(tol[cid].get("k", k))

    # -- algebra
    if two_d:
        run("operator_identity", lambda: skipped(
            "operator_identity", "matrix identity is checked on 1D models"))
    else:
        run("operator_identity", check_operator_identity, grid, model, scheme,
            tol["operator_identity"]["tol"])
    if model.name.startswith("morse") and not two_d:
        p = model.params
        run("morse_consistency", lambda: _result(
            "morse_consistency", morse_consistency(p["D"], p["alpha"]),
            tol["morse_consistency"]["tol"], {"D": p["D"], "alpha": p["alpha"]}))

    # -- spectra
    t = tol["analytic_spectrum"]
    run("analytic_spectrum", check_analytic_spectrum, model, grid, k_for("analytic_spectrum"),
        t.get("rtol"), t.get("atol"), scheme)
    if not two_d:
        t = tol["spectrum_order"]
        run("spectrum_order", lambda: check_spectrum_order(
            model, refine(grid, int(t["grid_levels"])), int(t["states"]), scheme, t["min_order"]))
    for mode in modes:
        cid = f"isospectral_{mode}"
        t = tol[cid]
        if mode == "similarity":
            run(cid, check_isospectral, model, grid, mode, k_for(cid),
                t["tol_re_rel"], t["tol_im_rel"], scheme, relative=True)
        else:
            run(cid, check_isospectral, model, grid, mode, k_for(cid),
                t["tol_re"], t["tol_im"], scheme)
    if len(modes) == 2:
        run("mode_difference", check_mode_difference, model, grid, k_for("mode_difference"),
            tol["mode_difference"]["tol"], scheme)

    # -- metric
    for mode in modes:
        cid = f"pseudo_hermiticity_{mode}"
        t = tol[cid]

        def ph(mode=mode, t=t):
            _, H = build_pair(grid, model, scheme, mode)
            eta = build_metric(grid, model)
            kw = {"max_log_condition": t["max_log_condition"]} if mode == "similarity" else {}
            return check_pseudo_hermiticity(H, eta, int(t.get("probes", 5)), t["tol"], **kw)
        run(cid, ph)
    if "continuum" in modes and not two_d:
        t = tol["pseudo_hermiticity_order"]
        run("pseudo_hermiticity_order", lambda: check_pseudo_hermiticity_order(
            model, refine(grid, int(t["grid_levels"])), scheme, int(t["probes"]), t["min_order"]))

    # -- eigenfunctions
    if not two_d:
        t = tol["eigenfunction_map"]
        for mode in modes:
            run("eigenfunction_map", lambda mode=mode: _tag_mode(check_eigenfunction_map(
                model, grid, int(t["level"]), mode, t["tol"] if mode == "continuum"
                else t.get("tol_similarity", 1e-8), scheme), mode))
        t = tol["normalizability"]
        for level in t["levels"]:
            run("normalizability", check_level_normalizability, model, grid, int(level),
                t["tol"], scheme)

    mode_label = "both" if len(modes) == 2 else modes[0]
    return VerificationReport(model.name, _grid_meta(grid), mode_label, results)


def _tag_mode(res, mode):
    res.check_id = f"{res.check_id}:{mode}"
    return res
