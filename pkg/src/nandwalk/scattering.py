"""Analytic scattering off a NAND tree planted on an infinite runway.

Unit coupling and negative hopping throughout: a runway plane wave e^{i r theta}
has energy E = -2 cos(theta).  The tree enters only through
y(E) = <root|E> / <attach|E>, obtained from the branch recursion
Y = -1 / (E + sum of child Y).  At E = 0 the recursion is evaluated in
extended arithmetic so the truth table comes out exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import NandTreeSpec


class IndeterminateError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ScatterValue:
    """A finite complex number or a signed infinity."""

    value: complex = 0j
    infinite: bool = False
    sign: int = 1

    @classmethod
    def finite(cls, value: complex) -> "ScatterValue":
        return cls(value=complex(value))

    @classmethod
    def inf(cls, sign: int = 1) -> "ScatterValue":
        return cls(infinite=True, sign=1 if sign >= 0 else -1)

    def __add__(self, other: "ScatterValue") -> "ScatterValue":
        if self.infinite and other.infinite:
            if self.sign != other.sign:
                raise IndeterminateError("inf - inf")
            return self
        if self.infinite:
            return self
        if other.infinite:
            return other
        return ScatterValue.finite(self.value + other.value)

    def neg_reciprocal(self) -> "ScatterValue":
        """-1/x, with -1/0 = -inf (zero taken as +0) and -1/inf = 0."""
        if self.infinite:
            return ScatterValue.finite(0)
        if self.value == 0:
            return ScatterValue.inf(-1)
        return ScatterValue.finite(-1 / self.value)

    def is_zero(self) -> bool:
        return not self.infinite and self.value == 0

    def __repr__(self) -> str:
        if self.infinite:
            return "ScatterValue(-inf)" if self.sign < 0 else "ScatterValue(+inf)"
        return f"ScatterValue({self.value!r})"


@dataclass(frozen=True)
class ScatteringResult:
    energy: float
    theta: float
    y: ScatterValue
    T: complex
    R: complex
    pole: bool = False


def eigen_energy(theta: float) -> float:
    return -2.0 * math.cos(theta)


def energy_to_theta(E: float) -> float:
    if not -2.0 < E < 2.0:
        raise ValueError(f"energy {E} is outside the open band (-2, 2)")
    return math.acos(-E / 2.0)


def nand_eval(inputs) -> int:
    bits = [int(b) for b in inputs]
    n = len(bits)
    if n < 2 or n & (n - 1):
        raise ValueError(f"input length must be a power of two >= 2, got {n}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("inputs must be bits")
    while len(bits) > 1:
        bits = [1 - (bits[i] & bits[i + 1]) for i in range(0, len(bits), 2)]
    return bits[0]


def tree_fraction(spec: NandTreeSpec, E: float) -> ScatterValue:
    """y(E): root amplitude over attach-site amplitude in an energy-E eigenstate."""
    energy = ScatterValue.finite(E)
    childless = energy.neg_reciprocal()
    layer = []
    for bit in spec.inputs:
        if bit:
            # layer-d node carrying one input leaf
            layer.append((energy + childless).neg_reciprocal())
        else:
            layer.append(childless)
    while len(layer) > 1:
        layer = [(energy + layer[i] + layer[i + 1]).neg_reciprocal() for i in range(0, len(layer), 2)]
    return layer[0]


def transmission(spec: NandTreeSpec, theta: float) -> ScatteringResult:
    """T = 2i sin(theta) / (2i sin(theta) + y(E)) and R = T - 1."""
    if not 0 < theta < math.pi:
        raise ValueError(f"theta must lie in (0, pi), got {theta}")
    E = eigen_energy(theta)
    if abs(E) < 1e-15:
        E = 0.0
    y = tree_fraction(spec, E)
    pole = False
    if y.infinite:
        T = 0j
        pole = E != 0.0
    else:
        a = 2j * math.sin(theta)
        T = a / (a + y.value)
    return ScatteringResult(energy=E, theta=theta, y=y, T=T, R=T - 1, pole=pole)


def transmission_at_energy(spec: NandTreeSpec, E: float) -> ScatteringResult:
    if E == 0:
        return transmission(spec, math.pi / 2)
    return transmission(spec, energy_to_theta(E))


@dataclass(frozen=True)
class BoundCheck:
    inputs: tuple[int, ...]
    energy: float
    abs_T: float
    nand: int
    bound: float
    holds: bool


class BoundViolation(AssertionError):
    pass


def check_bounds(spec: NandTreeSpec, E: float, strict: bool = True) -> BoundCheck:
    """Check |T| < 8 sqrt(N)|E| (NAND = 0) or |T| > 1 - 8 sqrt(N)|E| (NAND = 1).

    Valid for |E| < 1 / (16 sqrt(N)).
    """
    n = spec.n_inputs
    if not abs(E) < 1 / (16 * math.sqrt(n)):
        raise ValueError(f"|E| must be below 1/(16 sqrt(N)) = {1 / (16 * math.sqrt(n)):.6g}")
    f = nand_eval(spec.inputs)
    abs_t = abs(transmission_at_energy(spec, E).T)
    d = 8 * math.sqrt(n) * abs(E)
    bound = d if f == 0 else 1 - d
    holds = abs_t < bound if f == 0 else abs_t > bound
    report = BoundCheck(spec.inputs, E, abs_t, f, bound, holds)
    if strict and not holds:
        raise BoundViolation(f"inputs={spec.bits} E={E}: |T|={abs_t:.6g} violates bound {bound:.6g}")
    return report


def extract_transmission(eigenvector, energy: float, runway_sites, attach_site: int) -> complex:
    """Read T off an even-parity eigenvector of a finite, mirror-symmetric runway.

    Left of the attach site the eigenvector is a e^{i r theta} + b e^{-i r theta}.
    Odd modes vanish at the attach site and never see the tree, so an even
    mode carries R + T = b/a, and with 1 + R = T this gives T = (1 + b/a) / 2.
    """
    theta = energy_to_theta(energy)
    runway = np.asarray(runway_sites)
    r = runway - attach_site
    left = r <= 0
    basis = np.stack([np.exp(1j * r[left] * theta), np.exp(-1j * r[left] * theta)], axis=1)
    amps = np.asarray(eigenvector)[runway[left] - 1].astype(complex)
    (a, b), *_ = np.linalg.lstsq(basis, amps, rcond=None)
    return complex((1 + b / a) / 2)
