"""Closed-form theory of the parabolic-coupling quantum slide."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import basis_state, evolve, hamiltonian_from_graph
from .graph import parabolic_chain


class TransferError(RuntimeError):
    """Perfect state transfer fell short of the requested fidelity."""


@dataclass(frozen=True)
class KravchukMatrix:
    order: int
    entries: np.ndarray  # object dtype, exact Python ints

    def squared(self) -> np.ndarray:
        return self.entries.dot(self.entries)

    def as_float(self) -> np.ndarray:
        return self.entries.astype(float)


@dataclass(frozen=True)
class PacketParams:
    mu: float
    sigma2: float
    velocity: float

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def _comb(n: int, k: int) -> int:
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def kravchuk_matrix(order: int) -> KravchukMatrix:
    """K_ij = sum_l (-1)^l C(order - j, i - l) C(j, l), with i, j = 0..order."""
    if order < 1:
        raise ValueError(f"Kravchuk order must be >= 1, got {order}")
    n = order
    k = np.empty((n + 1, n + 1), dtype=object)
    for i in range(n + 1):
        for j in range(n + 1):
            k[i, j] = sum((-1) ** l * _comb(n - j, i - l) * _comb(j, l) for l in range(min(i, j) + 1))
    return KravchukMatrix(order=order, entries=k)


def kravchuk_hamiltonian(L: int) -> np.ndarray:
    """Rebuild the parabolic-chain Hamiltonian as S^-1 K Lambda K^-1 S.

    Uses K^-1 = 2^-(L-1) K and Lambda = diag(1-L, 3-L, ..., L-1); the result
    equals -sqrt(i(L-i)) hopping (sign -1 convention).
    """
    k = kravchuk_matrix(L - 1).as_float()
    s = np.array([math.sqrt(math.comb(L - 1, i)) for i in range(L)])
    lam = np.arange(1 - L, L, 2, dtype=float)
    inner = (k * lam) @ k / 2.0 ** (L - 1)
    return inner * np.outer(1.0 / s, s)


def slide_amplitude(L: int, r: int, t: float) -> complex:
    """sqrt(C(L-1, r-1)) cos(t)^(L-r) sin(t)^(r-1) exp(i pi r / 2).

    This is ``i <r| exp(-iHt) |1>`` for the unit-scale parabolic chain with
    negative hopping: the same amplitudes up to the global phase ``i``.
    """
    if not 1 <= r <= L:
        raise ValueError(f"site r must lie in 1..{L}, got {r}")
    mag = math.sqrt(math.comb(L - 1, r - 1)) * math.cos(t) ** (L - r) * math.sin(t) ** (r - 1)
    return mag * complex(np.exp(1j * math.pi * r / 2))


def slide_profile(L: int, t: float) -> np.ndarray:
    return np.array([slide_amplitude(L, r, t) for r in range(1, L + 1)])


def packet_params(L_qs: int, J: float = 1.0) -> PacketParams:
    """Centre, variance and velocity of the packet the slide hands to the runway."""
    if L_qs < 2:
        raise ValueError(f"slide needs at least 2 sites, got {L_qs}")
    m = 2 * L_qs - 1
    return PacketParams(mu=m / 2, sigma2=m / 4, velocity=J * m / L_qs)


def binomial_moments(L: int, t: float) -> tuple[float, float]:
    """Mean and variance of (r - 1) under the closed-form slide profile."""
    p = math.sin(t) ** 2
    return (L - 1) * p, (L - 1) * p * (1 - p)


def verify_pst(L: int, tol: float = 1e-9) -> float:
    """Fidelity |<L| exp(-iH pi/2) |1>|^2 on the unit-scale parabolic chain."""
    if L < 2:
        raise ValueError(f"chain needs at least 2 sites, got {L}")
    h = hamiltonian_from_graph(parabolic_chain(L), sign=-1)
    psi = evolve(h, basis_state(L, 1), math.pi / 2)
    fidelity = float(abs(psi[-1]) ** 2)
    if fidelity < 1 - tol:
        raise TransferError(f"L={L}: transfer fidelity {fidelity:.12g} < 1 - {tol:g}")
    return fidelity


def fit_packet(probabilities, sites=None) -> tuple[float, float]:
    """Moment estimates (mean, standard deviation) of a site distribution.

    ``sites`` defaults to 1..n.  The input is renormalised first.
    """
    p = np.asarray(probabilities, dtype=float)
    if np.any(p < 0):
        raise ValueError("probabilities must be non-negative")
    total = p.sum()
    if total <= 0:
        raise ValueError("cannot fit an all-zero distribution")
    p = p / total
    s = np.arange(1, p.size + 1) if sites is None else np.asarray(sites, dtype=float)
    mu = float(np.dot(s, p))
    var = float(np.dot((s - mu) ** 2, p))
    return mu, math.sqrt(max(var, 0.0))
