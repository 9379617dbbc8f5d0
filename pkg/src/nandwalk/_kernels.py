"""Hot loops with a numba path and a pure-numpy fallback.

Set ``NANDWALK_DISABLE_NUMBA=1`` to force the numpy implementations.  Both
variants are always importable under explicit names so they can be tested
against each other and benchmarked.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba as nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    nb = None

USE_NUMBA = nb is not None and os.environ.get("NANDWALK_DISABLE_NUMBA", "0") not in ("1", "true", "yes")


# ---------------------------------------------------------------- numpy path


def _hop_numpy(src, dst, weight, psi, n):
    out = np.bincount(src, weights=(weight * psi[dst]).real, minlength=n).astype(np.complex128)
    out += 1j * np.bincount(src, weights=(weight * psi[dst]).imag, minlength=n)
    return out


def rk4_integrate_numpy(src, dst, weight, psi0, dz, nsteps):
    """Classical RK4 for i dpsi/dz = H psi, H given as a directed edge list.

    ``src``/``dst``/``weight`` list every nonzero H[src, dst] (both directions).
    """
    n = psi0.shape[0]
    psi = psi0.astype(np.complex128).copy()
    for _ in range(nsteps):
        k1 = -1j * _hop_numpy(src, dst, weight, psi, n)
        k2 = -1j * _hop_numpy(src, dst, weight, psi + 0.5 * dz * k1, n)
        k3 = -1j * _hop_numpy(src, dst, weight, psi + 0.5 * dz * k2, n)
        k4 = -1j * _hop_numpy(src, dst, weight, psi + dz * k3, n)
        psi = psi + (dz / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return psi


def region_sums_numpy(probs, labels, n_regions):
    """Sum columns of ``probs`` (n_z, n_sites) by integer site label."""
    onehot = np.zeros((labels.shape[0], n_regions))
    onehot[np.arange(labels.shape[0]), labels] = 1.0
    return probs @ onehot


# ---------------------------------------------------------------- numba path

if nb is not None:

    @nb.njit(cache=True)
    def _hop_numba(src, dst, weight, psi, out):
        out[:] = 0.0
        for e in range(src.shape[0]):
            out[src[e]] += weight[e] * psi[dst[e]]

    @nb.njit(cache=True)
    def rk4_integrate_numba(src, dst, weight, psi0, dz, nsteps):
        n = psi0.shape[0]
        psi = psi0.astype(np.complex128).copy()
        h1 = np.empty(n, np.complex128)
        h2 = np.empty(n, np.complex128)
        h3 = np.empty(n, np.complex128)
        h4 = np.empty(n, np.complex128)
        tmp = np.empty(n, np.complex128)
        for _ in range(nsteps):
            _hop_numba(src, dst, weight, psi, h1)
            for i in range(n):
                tmp[i] = psi[i] - 0.5j * dz * h1[i]
            _hop_numba(src, dst, weight, tmp, h2)
            for i in range(n):
                tmp[i] = psi[i] - 0.5j * dz * h2[i]
            _hop_numba(src, dst, weight, tmp, h3)
            for i in range(n):
                tmp[i] = psi[i] - 1j * dz * h3[i]
            _hop_numba(src, dst, weight, tmp, h4)
            for i in range(n):
                psi[i] = psi[i] - 1j * (dz / 6.0) * (h1[i] + 2.0 * h2[i] + 2.0 * h3[i] + h4[i])
        return psi

    @nb.njit(cache=True)
    def region_sums_numba(probs, labels, n_regions):
        nz, n = probs.shape
        out = np.zeros((nz, n_regions))
        for t in range(nz):
            for i in range(n):
                out[t, labels[i]] += probs[t, i]
        return out

else:  # pragma: no cover
    rk4_integrate_numba = rk4_integrate_numpy
    region_sums_numba = region_sums_numpy


if USE_NUMBA:
    rk4_integrate = rk4_integrate_numba
    region_sums = region_sums_numba
else:
    rk4_integrate = rk4_integrate_numpy
    region_sums = region_sums_numpy
