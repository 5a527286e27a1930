import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from hermpade import _accel


def grids():
    z = 0.8 * np.exp(2j * np.pi * np.arange(64) / 64)
    return z


def test_backends_agree():
    if not _accel.HAS_NUMBA:
        pytest.skip("numba path unavailable")
    z = grids()
    coeffs = np.array([1, -2.5, 1], dtype=np.complex128)
    locs = np.array([0.5, 2.0], dtype=np.complex128)
    orders = np.array([1, 2], dtype=np.int64)
    pc = np.array([[1, 0], [2, 3]], dtype=np.complex128)
    pairs = [
        (_accel.horner_grid_numba(coeffs, z), _accel.horner_grid_numpy(coeffs, z)),
        (_accel.principal_grid_numba(locs, orders, pc, z), _accel.principal_grid_numpy(locs, orders, pc, z)),
        (_accel.lacunary_grid_numba(z, 1e-18), _accel.lacunary_grid_numpy(z, 1e-18)),
        (_accel.dilog_grid_numba(z, 1.0, 1e-18), _accel.dilog_grid_numpy(z, 1.0, 1e-18)),
    ]
    for fast, ref in pairs:
        np.testing.assert_allclose(fast, ref, rtol=1e-12, atol=1e-14)


def test_lacunary_kernel_values():
    z = np.array([0.5, -0.5j])
    want = [sum(w ** k for k in (1, 2, 6, 24, 120)) for w in z]
    np.testing.assert_allclose(_accel.lacunary_grid(z, 1e-30), want, rtol=1e-14)


def test_env_flag_selects_numpy():
    env = dict(os.environ, HERMPADE_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from hermpade import _accel; print(_accel.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_backend_name():
    importlib.reload(_accel)
    assert _accel.backend() in ("numba", "numpy")
