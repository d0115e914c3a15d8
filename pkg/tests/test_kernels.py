import os
import subprocess
import sys

import numpy as np
import pytest

from fracfilm import _kernels

needs_numba = pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba unavailable")


@needs_numba
@pytest.mark.parametrize("alpha", [0.4, 1.0, 1.6])
def test_image_sum_paths_agree(alpha, rng):
    x, y = rng.uniform(0.01, 0.99, (2, 40))
    for skip in (False, True):
        a = _kernels.image_sum(x, y, alpha, 5000, skip, use_numba=True)
        b = _kernels.image_sum(x, y, alpha, 5000, skip, use_numba=False)
        assert np.allclose(a, b, rtol=1e-13, atol=0)


@needs_numba
@pytest.mark.parametrize("n, eps", [(1.0, 1e-3), (2.5, 1e-4), (3.0, 0.0), (4.0, 1.0)])
def test_entropy_paths_agree(n, eps):
    s = np.geomspace(0.01, 20, 30) if eps == 0 else np.linspace(-1, 20, 31)
    a = _kernels.entropy_quadrature(s, n, eps, use_numba=True)
    b = _kernels.entropy_quadrature(s, n, eps, use_numba=False)
    assert np.allclose(a, b, rtol=1e-13, atol=1e-15)


@needs_numba
def test_lag_paths_agree(rng):
    v = np.cumsum(rng.standard_normal((64, 5)), axis=0)
    assert np.array_equal(_kernels.max_lag_increments(v, 10, use_numba=True),
                          _kernels.max_lag_increments(v, 10, use_numba=False))


def test_lag_oracle():
    v = np.array([0.0, 1.0, 3.0, 2.0])
    out = _kernels.max_lag_increments(v, 3)[:, 0]
    assert out.tolist() == [2.0, 3.0, 2.0]


def test_lag_bounds():
    with pytest.raises(ValueError):
        _kernels.max_lag_increments(np.arange(5.0), 5)
    with pytest.raises(ValueError):
        _kernels.max_lag_increments(np.arange(5.0), 0)


def test_env_flag_disables_numba():
    env = dict(os.environ, FRACFILM_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "import fracfilm._kernels as k; print(k.HAS_NUMBA)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
