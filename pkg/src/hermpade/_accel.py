"""
Double-precision kernels for the grid evaluations done on circles.

Each kernel exists twice: a numba ``@njit`` version and a pure-numpy
version with identical semantics.  The numba path is used when numba
imports cleanly and the environment variable ``HERMPADE_DISABLE_NUMBA``
is unset or ``0``.  ``benchmarks/bench_kernels.py`` times both.

The arbitrary-precision solver never goes through here; these kernels only
serve sup-norm sampling where double precision suffices (the censoring
floor in :mod:`hermpade.row_analysis` accounts for it).
"""
import math
import os

import numpy as np

_DISABLED = os.environ.get("HERMPADE_DISABLE_NUMBA", "0") not in ("", "0", "false", "False")

try:
    if _DISABLED:
        raise ImportError("numba disabled by HERMPADE_DISABLE_NUMBA")
    from numba import njit
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


# --------------------------------------------------------------------------
# pure numpy reference path
# --------------------------------------------------------------------------

def horner_grid_numpy(coeffs, z):
    """Evaluate the polynomial with ascending ``coeffs`` at every point of ``z``."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    out = np.zeros_like(z)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def principal_grid_numpy(locations, orders, coeffs, z):
    """Sum of ``coeffs[i, j-1] / (z - locations[i])**j`` for ``j <= orders[i]``."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.zeros_like(z)
    for i in range(len(locations)):
        inv = 1.0 / (z - locations[i])
        power = np.ones_like(z)
        for j in range(orders[i]):
            power = power * inv
            out = out + coeffs[i, j] * power
    return out


def lacunary_grid_numpy(z, floor):
    """``sum_{k>=1} z**(k!)`` truncated once ``|z|**(k!)`` drops below ``floor``."""
    z = np.asarray(z, dtype=np.complex128)
    r = float(np.max(np.abs(z))) if z.size else 0.0
    out = np.zeros_like(z)
    k, fact = 1, 1
    while True:
        if r > 0.0 and fact * math.log(r) < math.log(floor):
            break
        out = out + z ** fact
        k += 1
        fact *= k
        if fact > 10 ** 7:
            break
    return out


def dilog_grid_numpy(z, radius, floor):
    """``sum_{n>=0} (z/radius)**n / (n+1)**2`` truncated below ``floor``."""
    w = np.asarray(z, dtype=np.complex128) / radius
    r = float(np.max(np.abs(w))) if w.size else 0.0
    out = np.zeros_like(w)
    term = np.ones_like(w)
    n = 0
    while True:
        out = out + term / (n + 1) ** 2
        n += 1
        term = term * w
        if r ** n / (n + 1) ** 2 < floor or n > 200000:
            break
    return out


# --------------------------------------------------------------------------
# numba path
# --------------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True)
    def horner_grid_numba(coeffs, z):
        out = np.empty(z.size, np.complex128)
        for i in range(z.size):
            acc = 0j
            zi = z[i]
            for k in range(coeffs.size - 1, -1, -1):
                acc = acc * zi + coeffs[k]
            out[i] = acc
        return out

    @njit(cache=True)
    def principal_grid_numba(locations, orders, coeffs, z):
        out = np.zeros(z.size, np.complex128)
        for p in range(z.size):
            acc = 0j
            for i in range(locations.size):
                inv = 1.0 / (z[p] - locations[i])
                power = 1.0 + 0j
                for j in range(orders[i]):
                    power *= inv
                    acc += coeffs[i, j] * power
            out[p] = acc
        return out

    @njit(cache=True)
    def lacunary_grid_numba(z, floor):
        out = np.zeros(z.size, np.complex128)
        logfloor = math.log(floor)
        for p in range(z.size):
            zp = z[p]
            r = abs(zp)
            acc = 0j
            k = 1
            fact = 1
            while True:
                if r > 0.0 and fact * math.log(r) < logfloor:
                    break
                acc += zp ** fact
                k += 1
                fact *= k
                if fact > 10 ** 7:
                    break
            out[p] = acc
        return out

    @njit(cache=True)
    def dilog_grid_numba(z, radius, floor):
        out = np.zeros(z.size, np.complex128)
        for p in range(z.size):
            w = z[p] / radius
            r = abs(w)
            term = 1.0 + 0j
            acc = 0j
            n = 0
            while True:
                acc += term / ((n + 1) * (n + 1))
                n += 1
                term *= w
                if r ** n / ((n + 1) * (n + 1)) < floor or n > 200000:
                    break
            out[p] = acc
        return out

    horner_grid = horner_grid_numba
    principal_grid = principal_grid_numba
    lacunary_grid = lacunary_grid_numba
    dilog_grid = dilog_grid_numba
else:
    horner_grid = horner_grid_numpy
    principal_grid = principal_grid_numpy
    lacunary_grid = lacunary_grid_numpy
    dilog_grid = dilog_grid_numpy


def backend():
    """Name of the active kernel backend (``"numba"`` or ``"numpy"``)."""
    return "numba" if HAS_NUMBA else "numpy"
