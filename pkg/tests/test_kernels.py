import numpy as np
import pytest

from phsolve import kernels
from phsolve._accel import HAVE_NUMBA

PAIRS = [
    ("band_matrix", lambda rng: (12, np.array([-2, -1, 0, 1, 2]), rng.normal(size=5))),
    ("symmetrized_product", lambda rng: (rng.normal(size=(9, 9)) * (rng.random((9, 9)) > 0.5),
                                         rng.normal(size=9))),
    ("similarity_scale", lambda rng: (rng.normal(size=(9, 9)) * (rng.random((9, 9)) > 0.5),
                                      rng.normal(size=9))),
    ("column_scale", lambda rng: (rng.normal(size=(7, 7)), rng.random(7))),
    ("congruence", lambda rng: (rng.normal(size=(8, 8)), rng.normal(size=8))),
]


@pytest.mark.parametrize("name,make", PAIRS, ids=[p[0] for p in PAIRS])
def test_compiled_and_numpy_paths_agree(name, make):
    args = make(np.random.default_rng(7))
    a = getattr(kernels, f"{name}_numba")(*args)
    b = getattr(kernels, f"{name}_numpy")(*args)
    for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
        np.testing.assert_allclose(x, y, rtol=1e-14, atol=1e-14)


def test_dispatch_matches_flag():
    expected = kernels.similarity_scale_numba if HAVE_NUMBA else kernels.similarity_scale_numpy
    assert kernels.similarity_scale is expected


def test_similarity_scale_reports_exponent():
    m = np.array([[1.0, 2.0], [0.0, 3.0]])
    out, expo = kernels.similarity_scale_numpy(m, np.array([0.0, 1.0]))
    assert expo == 1.0
    np.testing.assert_allclose(out, [[1.0, 2.0 * np.exp(-1.0)], [0.0, 3.0]])


def test_numpy_fallback_subprocess():
    """PHSOLVE_DISABLE_NUMBA switches the public kernels to the numpy path."""
    import os
    import subprocess
    import sys
    env = dict(os.environ, PHSOLVE_DISABLE_NUMBA="1")
    code = ("import phsolve.kernels as k, phsolve._accel as a;"
            "print(a.HAVE_NUMBA, k.similarity_scale.__name__)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out == ["False", "similarity_scale_numpy"]
