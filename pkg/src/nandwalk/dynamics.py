"""Hamiltonians, exact spectral propagation and Gaussian wave-packets.

States are plain complex ``numpy`` arrays indexed by ``site - 1``.  The
propagation distance ``z`` (mm) plays the role of time; couplings are in
mm^-1, so ``exp(-i H z)`` is dimensionless.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import CouplingGraph

NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Real symmetric hopping matrix ``sign * J_ab`` with cached eigenpairs."""

    matrix: np.ndarray
    sign: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def edge_list(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Directed (src, dst, weight) triples of the nonzero entries."""
        src, dst = np.nonzero(self.matrix)
        return src.astype(np.int64), dst.astype(np.int64), self.matrix[src, dst].astype(np.float64)


def _spectral(matrix: np.ndarray, sign: int) -> Hamiltonian:
    try:
        w, v = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        with np.printoptions(threshold=matrix.size, linewidth=200):
            dump = np.array2string(matrix)
        raise RuntimeError(f"eigendecomposition failed ({exc}); matrix:\n{dump}") from exc
    matrix.setflags(write=False)
    w.setflags(write=False)
    v.setflags(write=False)
    return Hamiltonian(matrix=matrix, sign=sign, eigenvalues=w, eigenvectors=v)


def hamiltonian_from_graph(g: CouplingGraph, sign: int = -1) -> Hamiltonian:
    """Build ``H = sign * sum_edges J_ab (|a><b| + |b><a|)`` and diagonalise it.

    ``sign=-1`` is the negative-hopping convention under which E = -2J cos(theta).
    The graphs built here are trees, hence bipartite, so site probabilities
    starting from a site-localised state do not depend on ``sign``.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    n = g.n_sites
    m = np.zeros((n, n))
    for a, b, c in g.edges:
        m[a - 1, b - 1] = m[b - 1, a - 1] = sign * c
    return _spectral(m, sign)


def hamiltonian_from_matrix(matrix: np.ndarray, sign: int = -1) -> Hamiltonian:
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("Hamiltonian matrix must be square")
    if not np.allclose(m, m.T, atol=1e-14, rtol=0):
        raise ValueError("Hamiltonian matrix must be symmetric")
    return _spectral(m, sign)


def _check_state(h: Hamiltonian, psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (h.dimension,):
        raise ValueError(f"state has shape {psi.shape}, Hamiltonian dimension is {h.dimension}")
    return psi


def evolve(h: Hamiltonian, psi0: np.ndarray, z: float) -> np.ndarray:
    """Exact ``exp(-i H z) psi0`` through the eigenbasis."""
    if z < 0:
        raise ValueError(f"propagation distance must be non-negative, got {z}")
    psi0 = _check_state(h, psi0)
    v = h.eigenvectors
    coeff = v.T @ psi0
    return v @ (np.exp(-1j * h.eigenvalues * z) * coeff)


def evolve_many(h: Hamiltonian, psi0: np.ndarray, zs) -> np.ndarray:
    """States at every distance in ``zs``; shape ``(len(zs), n)``."""
    zs = np.atleast_1d(np.asarray(zs, dtype=float))
    if np.any(zs < 0):
        raise ValueError("propagation distances must be non-negative")
    psi0 = _check_state(h, psi0)
    v = h.eigenvectors
    coeff = v.T @ psi0
    phases = np.exp(-1j * np.outer(zs, h.eigenvalues))
    return (phases * coeff) @ v.T


def evolve_rk4(h: Hamiltonian, psi0: np.ndarray, z: float, max_step: float | None = None) -> np.ndarray:
    """Fixed-step RK4 integration of ``i dpsi/dz = H psi``.

    Independent of the eigendecomposition; used as a cross-check.  The default
    step is ``0.01 / J_max``.
    """
    psi0 = _check_state(h, psi0)
    if z == 0:
        return psi0.copy()
    src, dst, weight = h.edge_list()
    if max_step is None:
        j_max = np.abs(weight).max() if weight.size else 1.0
        max_step = 0.01 / j_max
    nsteps = int(np.ceil(z / max_step))
    return _kernels.rk4_integrate(src, dst, weight, psi0, z / nsteps, nsteps)


def basis_state(n: int, site: int) -> np.ndarray:
    psi = np.zeros(n, dtype=np.complex128)
    psi[site - 1] = 1.0
    return psi


def right_moving_sign(h_sign: int) -> int:
    """``momentum_sign`` for which :func:`gaussian_packet` moves to larger sites.

    A phase exp(-i m s pi/2) is a plane wave with k = -m pi/2, whose group
    velocity under ``H = sign * J * G`` is ``2 J sign m``.
    """
    return 1 if h_sign > 0 else -1


def gaussian_packet(
    L_rw: int,
    mu: float,
    sigma: float,
    momentum_sign: int = 1,
    graph: CouplingGraph | None = None,
) -> np.ndarray:
    """Discrete Gaussian exp(-(s-mu)^2 / 4 sigma^2) exp(-i m s pi/2) on runway sites.

    ``s`` is the 1-based runway-local index.  With ``graph`` the packet is
    embedded on ``graph``'s runway region (zero elsewhere); otherwise the
    result has length ``L_rw``.  Normalised by the discrete sum.
    """
    if not 0 < mu < L_rw:
        raise ValueError(f"packet centre must satisfy 0 < mu < L_rw={L_rw}, got {mu}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if momentum_sign not in (1, -1):
        raise ValueError("momentum_sign must be +1 or -1")
    s = np.arange(1, L_rw + 1)
    amp = np.exp(-((s - mu) ** 2) / (4.0 * sigma**2)) * np.exp(-1j * momentum_sign * s * np.pi / 2)
    amp /= np.linalg.norm(amp)
    if graph is None:
        return amp
    runway = graph.region("runway")
    if len(runway) != L_rw:
        raise ValueError(f"graph runway has {len(runway)} sites, expected {L_rw}")
    psi = np.zeros(graph.n_sites, dtype=np.complex128)
    psi[np.asarray(runway) - 1] = amp
    return psi


def energy_moments(h: Hamiltonian, psi: np.ndarray) -> tuple[float, float]:
    """Mean energy and energy variance of ``psi``."""
    psi = _check_state(h, psi)
    hpsi = h.matrix @ psi
    mean = float(np.vdot(psi, hpsi).real)
    second = float(np.vdot(hpsi, hpsi).real)
    return mean, second - mean**2


def site_probabilities(psi: np.ndarray) -> np.ndarray:
    p = np.abs(np.asarray(psi)) ** 2
    total = p.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalised (norm^2 = {total!r})")
    return p


def snapshot_csv(g: CouplingGraph, psi: np.ndarray) -> str:
    """CSV rows (site_index, region, re, im, prob) for one state."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["site_index", "region", "re", "im", "prob"])
    for site, amp in zip(g.sites, psi):
        w.writerow([site, g.region_of(site), repr(float(amp.real)), repr(float(amp.imag)), repr(float(abs(amp) ** 2))])
    return buf.getvalue()
