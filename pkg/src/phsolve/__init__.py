"""Pseudo-Hermitian Hamiltonians built from Hermitian partners by e^f similarity."""
from ._accel import HAVE_NUMBA, backend
from .errors import (ConditioningError, ConfigurationError, EvaluationError, NumericalError,
                     PhsolveError, SolverError, UnsupportedModelError)
from .grid import DiffMatrix, Grid, diff_matrix, make_grid
from .model import (CATALOG, FunctionSpec, ModelDefinition, evaluate, evaluate_prime,
                    make_model, morse_consistency)
from .operators import (MetricMatrix, OperatorMatrix, build_2d, build_hermitian, build_metric,
                        build_momentum_dual, build_pseudo)
from .spectra import (MatchReport, SpectrumResult, eigen_general, eigen_hermitian,
                      match_spectra, morse_analytic)
from .verify import (CheckResult, VerificationReport, check_isospectral,
                     check_normalizability, check_operator_identity,
                     check_pseudo_hermiticity, map_eigenfunction, run_all)

__version__ = "0.1.0"
