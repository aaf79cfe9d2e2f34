"""
Model functions V and f with exact first derivatives, and the model catalog.

A :class:`FunctionSpec` is a small tagged record (``kind`` + ``params``) that
evaluates itself and its derivative in closed form.  Derivatives are never
obtained by finite differences; the one exception is ``custom_table``, whose
linear interpolation is flagged as not machine-exact.
"""
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Tuple, Union

import numpy as np

from .errors import ConfigurationError, EvaluationError

KINDS = (
    "zero",
    "polynomial",
    "morse_V",
    "morse_f",
    "gaussian_gauge",
    "miao_xu_series",
    "custom_table",
)
REPRESENTATIONS = ("coordinate", "momentum")

# largest argument of exp() that stays finite in float64
_EXP_LIMIT = np.log(np.finfo(float).max)


def _real(params, key):
    try:
        value = float(params[key])
    except KeyError:
        raise ConfigurationError(f"missing parameter {key!r}") from None
    except (TypeError, ValueError):
        raise ConfigurationError(f"parameter {key!r} must be a real number") from None
    if not np.isfinite(value):
        raise ConfigurationError(f"parameter {key!r} must be finite")
    return value


def _real_list(params, key):
    try:
        values = np.asarray(params[key], dtype=float).ravel()
    except KeyError:
        raise ConfigurationError(f"missing parameter {key!r}") from None
    except (TypeError, ValueError):
        raise ConfigurationError(f"parameter {key!r} must be a list of reals") from None
    if values.size == 0:
        raise ConfigurationError(f"parameter {key!r} must not be empty")
    if not np.all(np.isfinite(values)):
        raise ConfigurationError(f"parameter {key!r} must be finite")
    return values


@dataclass(frozen=True)
class FunctionSpec:
    """One real function of a single variable (x or p).

    kinds and their params:

    ``zero``            --
    ``polynomial``      ``coeffs`` ascending, c0 + c1 t + ...
    ``morse_V``         ``D``, ``alpha``: (3D/4)(1 - e^{-alpha t})^2
    ``morse_f``         ``D``, ``alpha``: (sqrt(D)/2)(t + e^{-alpha t}/alpha)
    ``gaussian_gauge``  ``a``: -a t^2
    ``miao_xu_series``  ``n``, ``coeffs``: -sum_k c_k t^{k+n+1} / (k+n+1)
    ``custom_table``    ``t``, ``values``, ``derivatives`` (linear interpolation)
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    representation: str = "coordinate"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown function kind {self.kind!r}; expected one of {KINDS}")
        if self.representation not in REPRESENTATIONS:
            raise ConfigurationError(f"unknown representation {self.representation!r}")
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "_data", self._validate())

    def _validate(self):
        p = self.params
        if self.kind in ("morse_V", "morse_f"):
            if _real(p, "D") <= 0 or _real(p, "alpha") <= 0:
                raise ConfigurationError(f"{self.kind} requires D > 0 and alpha > 0")
            return None
        if self.kind == "gaussian_gauge":
            return np.array([0.0, 0.0, -_real(p, "a")])
        if self.kind == "polynomial":
            return _real_list(p, "coeffs")
        if self.kind == "miao_xu_series":
            n = p.get("n")
            if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 0:
                raise ConfigurationError(f"miao_xu_series requires integer n >= 0, got {n!r}")
            c = _real_list(p, "coeffs")
            k = np.arange(c.size)
            poly = np.zeros(c.size + n + 1)
            poly[k + n + 1] = -c / (k + n + 1)
            return poly
        if self.kind == "custom_table":
            t = _real_list(p, "t")
            vals = _real_list(p, "values")
            ders = _real_list(p, "derivatives")
            if not (t.size == vals.size == ders.size) or t.size < 2:
                raise ConfigurationError("custom_table needs t, values, derivatives of equal length >= 2")
            if np.any(np.diff(t) <= 0):
                raise ConfigurationError("custom_table t must be strictly increasing")
            return (t, vals, ders)
        return None

    @property
    def exact(self):
        """False only for tabulated functions (excluded from machine-precision checks)."""
        return self.kind != "custom_table"

    def to_dict(self):
        params = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.params.items()}
        return {"kind": self.kind, "params": params, "representation": self.representation}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, Mapping):
            raise ConfigurationError("function spec must be an object with 'kind'")
        unknown = set(data) - {"kind", "params", "representation"}
        if unknown:
            raise ConfigurationError(f"unknown function spec key {sorted(unknown)[0]!r}")
        if "kind" not in data:
            raise ConfigurationError("function spec is missing 'kind'")
        return cls(data["kind"], data.get("params", {}), data.get("representation", "coordinate"))


def _morse_exp(spec, t):
    alpha = float(spec.params["alpha"])
    arg = -alpha * t
    bad = arg > _EXP_LIMIT
    if np.any(bad):
        where = np.ravel(t)[np.argmax(np.ravel(bad))]
        raise EvaluationError(
            f"{spec.kind}: exp(-alpha*t) overflows at t={where!r} (alpha={alpha})")
    return np.exp(arg)


def evaluate(spec, t):
    """Exact value of ``spec`` at ``t`` (scalar or array)."""
    t_arr = np.asarray(t, dtype=float)
    kind = spec.kind
    if kind == "zero":
        out = np.zeros_like(t_arr)
    elif kind in ("polynomial", "gaussian_gauge", "miao_xu_series"):
        out = np.polynomial.polynomial.polyval(t_arr, spec._data)
    elif kind == "morse_V":
        D = float(spec.params["D"])
        out = 0.75 * D * (1.0 - _morse_exp(spec, t_arr)) ** 2
    elif kind == "morse_f":
        D, alpha = float(spec.params["D"]), float(spec.params["alpha"])
        out = 0.5 * np.sqrt(D) * (t_arr + _morse_exp(spec, t_arr) / alpha)
    else:  # custom_table
        tt, vals, _ = spec._data
        out = np.interp(t_arr, tt, vals)
    return _finish(spec, t_arr, out)


def evaluate_prime(spec, t):
    """Exact first derivative of ``spec`` at ``t``."""
    t_arr = np.asarray(t, dtype=float)
    kind = spec.kind
    if kind == "zero":
        out = np.zeros_like(t_arr)
    elif kind in ("polynomial", "gaussian_gauge", "miao_xu_series"):
        out = np.polynomial.polynomial.polyval(t_arr, np.polynomial.polynomial.polyder(spec._data))
    elif kind == "morse_V":
        D, alpha = float(spec.params["D"]), float(spec.params["alpha"])
        e = _morse_exp(spec, t_arr)
        out = 1.5 * D * alpha * (1.0 - e) * e
    elif kind == "morse_f":
        D = float(spec.params["D"])
        out = 0.5 * np.sqrt(D) * (1.0 - _morse_exp(spec, t_arr))
    else:
        tt, _, ders = spec._data
        out = np.interp(t_arr, tt, ders)
    return _finish(spec, t_arr, out)


def _finish(spec, t_arr, out):
    out = np.asarray(out, dtype=float)
    if not np.all(np.isfinite(out)):
        where = np.ravel(t_arr)[np.argmax(~np.isfinite(np.ravel(out)))]
        raise EvaluationError(f"{spec.kind}: non-finite value at t={where!r}")
    if out.ndim == 0:
        return float(out)
    return out


# spec-facing names
eval = evaluate  # noqa: A001
eval_prime = evaluate_prime


def morse_consistency(D, alpha, f=None, samples=None):
    """Max pointwise deviation of V + f'^2 from D(1 - e^{-alpha x})^2.

    The deviation is relative to max(1, |target|) so that the bound is
    meaningful where the potential wall is steep.  ``f`` replaces the
    catalog gauge (negative controls); ``samples`` defaults to 101 points
    on [-2, 8].
    """
    V = FunctionSpec("morse_V", {"D": D, "alpha": alpha})
    if f is None:
        f = FunctionSpec("morse_f", {"D": D, "alpha": alpha})
    x = np.linspace(-2.0, 8.0, 101) if samples is None else np.asarray(samples, dtype=float)
    target = D * (1.0 - np.exp(-alpha * x)) ** 2
    got = evaluate(V, x) + evaluate_prime(f, x) ** 2
    return float(np.max(np.abs(got - target) / np.maximum(1.0, np.abs(target))))


Axis = Union[FunctionSpec, Tuple[FunctionSpec, FunctionSpec]]


@dataclass(frozen=True)
class ModelDefinition:
    """A (V, f) pair generating H_H = p² + V + f'² and H = p² + V + i(f'p + pf').

    In two dimensions ``V`` and ``f`` are pairs of per-axis functions
    (additively separable).  ``fprime_defect`` multiplies f' by
    ``1 + fprime_defect`` in the non-Hermitian assembly only; it exists to
    build negative controls and is zero for every catalog entry.
    """

    name: str
    dimension: int
    V: Axis
    f: Axis
    representation: str = "coordinate"
    analytic_spectrum: Optional[str] = None
    params: Mapping[str, Any] = field(default_factory=dict)
    fprime_defect: float = 0.0

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ConfigurationError(f"dimension must be 1 or 2, got {self.dimension}")
        if self.representation not in REPRESENTATIONS:
            raise ConfigurationError(f"unknown representation {self.representation!r}")
        for spec in self.axis_specs():
            if spec.representation != self.representation:
                raise ConfigurationError(
                    f"model {self.name!r}: V and f must share the {self.representation} representation")
        object.__setattr__(self, "params", dict(self.params))

    def axis_specs(self):
        out = []
        for item in (self.V, self.f):
            out.extend(item if isinstance(item, tuple) else (item,))
        return out

    @property
    def separable(self):
        return (self.dimension == 1
                or (isinstance(self.V, tuple) and isinstance(self.f, tuple)
                    and len(self.V) == 2 and len(self.f) == 2))

    @property
    def exact(self):
        return all(s.exact for s in self.axis_specs())

    def corrupted(self, defect=1e-3):
        """Copy whose non-Hermitian partner uses (1 + defect) f'."""
        return ModelDefinition(self.name + "+defect", self.dimension, self.V, self.f,
                               self.representation, self.analytic_spectrum, self.params,
                               float(defect))

    def to_dict(self):
        def dump(item):
            if isinstance(item, tuple):
                return [s.to_dict() for s in item]
            return item.to_dict()
        return {
            "name": self.name,
            "dimension": self.dimension,
            "representation": self.representation,
            "params": dict(self.params),
            "V": dump(self.V),
            "f": dump(self.f),
            "analytic_spectrum": self.analytic_spectrum,
        }


# -- catalog -----------------------------------------------------------------

def free(**_):
    z = FunctionSpec("zero")
    return ModelDefinition("free", 1, z, z, params={})


def harmonic_gauge(a=0.5):
    if a <= 0:
        raise ConfigurationError("harmonic_gauge requires a > 0 (f = -a x^2 keeps e^f psi normalizable)")
    return ModelDefinition("harmonic_gauge", 1, FunctionSpec("zero"),
                           FunctionSpec("gaussian_gauge", {"a": a}),
                           analytic_spectrum="harmonic", params={"a": a})


def morse(D=36.0, alpha=1.0):
    p = {"D": D, "alpha": alpha}
    return ModelDefinition("morse", 1, FunctionSpec("morse_V", p), FunctionSpec("morse_f", p),
                           analytic_spectrum="morse", params=p)


def miao_xu(n=1, c=(1.0, 0.0, 0.05)):
    c = [float(v) for v in np.atleast_1d(c)]
    return ModelDefinition("miao_xu", 1, FunctionSpec("zero"),
                           FunctionSpec("miao_xu_series", {"n": n, "coeffs": c}),
                           params={"n": n, "c": c})


def harmonic_dual_p(a=0.5, quartic=0.0):
    rep = "momentum"
    V = (FunctionSpec("polynomial", {"coeffs": [0.0, 0.0, 0.0, 0.0, quartic]}, rep)
         if quartic else FunctionSpec("zero", representation=rep))
    return ModelDefinition("harmonic_dual_p", 1, V, FunctionSpec("gaussian_gauge", {"a": a}, rep),
                           representation=rep,
                           analytic_spectrum=None if quartic else "harmonic",
                           params={"a": a, "quartic": quartic})


def harmonic_2d(a=0.5):
    z = FunctionSpec("zero")
    g = FunctionSpec("gaussian_gauge", {"a": a})
    return ModelDefinition("harmonic_2d", 2, (z, z), (g, g),
                           analytic_spectrum="harmonic_2d", params={"a": a})


def morse_harmonic_2d(D=36.0, alpha=1.0, a=0.5):
    p = {"D": D, "alpha": alpha}
    return ModelDefinition("morse_harmonic_2d", 2,
                           (FunctionSpec("morse_V", p), FunctionSpec("zero")),
                           (FunctionSpec("morse_f", p), FunctionSpec("gaussian_gauge", {"a": a})),
                           analytic_spectrum="morse_harmonic_2d",
                           params={"D": D, "alpha": alpha, "a": a})


def custom(V, f, representation="coordinate", name="custom"):
    V = V if isinstance(V, FunctionSpec) else FunctionSpec.from_dict(V)
    f = f if isinstance(f, FunctionSpec) else FunctionSpec.from_dict(f)
    return ModelDefinition(name, 1, V, f, representation=representation,
                           params={"V": V.to_dict(), "f": f.to_dict()})


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    factory: Any
    defaults: Mapping[str, Any]
    domain: Tuple[float, float]
    dimension: int
    representation: str
    oracle: Optional[str]
    provenance: str


CATALOG = {
    e.name: e
    for e in (
        CatalogEntry("free", free, {}, (-8.0, 8.0), 1, "coordinate", None,
                     "V = 0, f = 0 (identity case)"),
        CatalogEntry("harmonic_gauge", harmonic_gauge, {"a": 0.5}, (-10.0, 10.0), 1,
                     "coordinate", "harmonic", "V = 0, f = -a x^2; H_H = p^2 + 4a^2 x^2"),
        CatalogEntry("morse", morse, {"D": 36.0, "alpha": 1.0}, (-2.0, 9.0), 1, "coordinate",
                     "morse", "V = (3D/4)(1-e^{-alpha x})^2, f = (sqrt D/2)(x + e^{-alpha x}/alpha); "
                     "H_H is the Morse oscillator"),
        CatalogEntry("miao_xu", miao_xu, {"n": 1, "c": [1.0, 0.0, 0.05]}, (-8.0, 8.0), 1,
                     "coordinate", None, "f = -sum_k c_k x^{k+n+1}/(k+n+1), truncated series, V = 0"),
        CatalogEntry("harmonic_dual_p", harmonic_dual_p, {"a": 0.5, "quartic": 0.0},
                     (-10.0, 10.0), 1, "momentum", "harmonic",
                     "momentum-space dual: g(p) = -a p^2, V(p) = quartic p^4, x = i d/dp"),
        CatalogEntry("harmonic_2d", harmonic_2d, {"a": 0.5}, (-5.0, 5.0), 2, "coordinate",
                     "harmonic_2d", "f = -a (x^2 + y^2), V = 0; 2D isotropic oscillator"),
        CatalogEntry("morse_harmonic_2d", morse_harmonic_2d, {"D": 36.0, "alpha": 1.0, "a": 0.5},
                     (-1.2, 7.0), 2, "coordinate", "morse_harmonic_2d",
                     "separable Morse (x) plus harmonic gauge (y)"),
        CatalogEntry("custom", custom, {}, (-8.0, 8.0), 1, "coordinate", None,
                     "user-supplied V and f function specs"),
    )
}


def make_model(name, params=None):
    """Instantiate a catalog model, validating parameter names."""
    if name not in CATALOG:
        raise ConfigurationError(f"unknown model {name!r}; see `phsolve list-models`")
    entry = CATALOG[name]
    params = dict(params or {})
    if name != "custom":
        unknown = set(params) - set(entry.defaults)
        if unknown:
            raise ConfigurationError(f"model {name!r} has no parameter {sorted(unknown)[0]!r}")
        merged = {**entry.defaults, **params}
    else:
        missing = {"V", "f"} - set(params)
        if missing:
            raise ConfigurationError(f"custom model needs parameter {sorted(missing)[0]!r}")
        merged = params
    try:
        return entry.factory(**merged)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for model {name!r}: {exc}") from None


def catalog_1d():
    """The five one-dimensional catalog models with default parameters."""
    return [make_model(n) for n in ("free", "harmonic_gauge", "morse", "miao_xu", "harmonic_dual_p")]
