import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nandwalk.dynamics import hamiltonian_from_graph
from nandwalk.graph import CouplingGraph, NandTreeSpec, build_system
from nandwalk.scattering import (
    BoundViolation,
    IndeterminateError,
    ScatterValue,
    check_bounds,
    eigen_energy,
    extract_transmission,
    nand_eval,
    transmission,
    transmission_at_energy,
    tree_fraction,
)

ALL_INPUTS = [bits for n in (2, 4) for bits in itertools.product((0, 1), repeat=n)]


def spec(bits):
    return NandTreeSpec.from_bits(bits)


def hand_y_depth1(bits, E):
    """Direct branch algebra for a one-layer tree (finite E)."""
    child = [(-1 / (E - 1 / E)) if b else (-1 / E) for b in bits]
    return -1 / (E + child[0] + child[1])


def test_scatter_value_rules():
    zero, one = ScatterValue.finite(0), ScatterValue.finite(2)
    assert zero.neg_reciprocal().infinite
    assert one.neg_reciprocal().value == -0.5
    assert ScatterValue.inf(-1).neg_reciprocal().is_zero()
    assert (ScatterValue.inf(-1) + one).infinite
    with pytest.raises(IndeterminateError):
        ScatterValue.inf(1) + ScatterValue.inf(-1)


def test_eigen_energy():
    assert eigen_energy(math.pi / 2) == pytest.approx(0, abs=1e-15)
    assert eigen_energy(math.pi / 3) == pytest.approx(-1)


def test_eigen_energy_matches_open_chain():
    sites = tuple(range(1, 51))
    g = CouplingGraph(sites, tuple((i, i + 1, 1.0) for i in range(1, 50)), {"runway": frozenset(sites)})
    w = hamiltonian_from_graph(g).eigenvalues
    expected = sorted(eigen_energy(j * math.pi / 51) for j in range(1, 51))
    assert np.abs(w - expected).max() < 1e-12


def test_y_depth1_zero_inputs_transmits():
    assert tree_fraction(spec("00"), 0.0).is_zero()


def test_y_depth1_one_inputs_reflects():
    y = tree_fraction(spec("11"), 0.0)
    assert y.infinite and y.sign < 0


def test_y_small_energy_series():
    y = tree_fraction(spec("00"), 0.01).value
    assert y.real == pytest.approx(hand_y_depth1((0, 0), 0.01), rel=1e-12)
    assert y.real == pytest.approx(0.005, rel=1e-3)


@pytest.mark.parametrize("bits", list(itertools.product((0, 1), repeat=2)))
@pytest.mark.parametrize("E", [0.3, -0.05, 0.01])
def test_y_matches_hand_algebra(bits, E):
    assert tree_fraction(spec(bits), E).value.real == pytest.approx(hand_y_depth1(bits, E), rel=1e-12)


@pytest.mark.parametrize("bits", ALL_INPUTS, ids=lambda b: "".join(map(str, b)))
def test_zero_energy_truth_table(bits):
    y = tree_fraction(spec(bits), 0.0)
    f = nand_eval(bits)
    assert y.is_zero() == (f == 1)
    assert y.infinite == (f == 0)
    assert abs(transmission(spec(bits), math.pi / 2).T) ** 2 == f


def test_transmission_limits():
    r = transmission(spec("00"), math.pi / 2)
    assert r.T == 1 and r.R == 0
    r = transmission(spec("11"), math.pi / 2)
    assert r.T == 0 and r.R == -1 and not r.pole


def test_flux_off_centre():
    r = transmission(spec("00"), math.pi / 2 + 0.01)
    assert abs(abs(r.T) ** 2 + abs(r.R) ** 2 - 1) < 1e-10


@settings(max_examples=200, deadline=None)
@given(theta=st.floats(1e-3, math.pi - 1e-3), idx=st.integers(0, len(ALL_INPUTS) - 1))
def test_flux_conservation(theta, idx):
    r = transmission(spec(ALL_INPUTS[idx]), theta)
    if r.y.infinite:
        return
    assert r.R == r.T - 1
    assert abs(abs(r.T) ** 2 + abs(r.R) ** 2 - 1) < 1e-10


@pytest.mark.parametrize("bits", ALL_INPUTS, ids=lambda b: "".join(map(str, b)))
def test_continuity_towards_zero(bits):
    f = nand_eval(bits)
    for s in (1, -1):
        dev = [abs(abs(transmission_at_energy(spec(bits), s * 10.0**-k).T) - f) for k in range(1, 7)]
        assert dev[-1] < 1e-4
        assert all(b <= a for a, b in zip(dev[2:], dev[3:]))


def test_nand_eval():
    assert nand_eval([0, 0]) == 1
    assert nand_eval([1, 1]) == 0
    assert nand_eval([0, 0, 1, 1]) == 1
    assert nand_eval([1, 1, 1, 1]) == 1
    assert nand_eval([0, 0, 0, 1]) == 0
    with pytest.raises(ValueError):
        nand_eval([1, 0, 1])


def test_bounds_four_bit_examples():
    # 1111 evaluates to 1, 0001 to 0
    hi = check_bounds(spec("1111"), 0.01)
    assert hi.nand == 1 and hi.abs_T > 0.84
    lo = check_bounds(spec("0001"), 0.01)
    assert lo.nand == 0 and lo.abs_T < 0.16


@pytest.mark.parametrize("bits", list(itertools.product((0, 1), repeat=2)))
@pytest.mark.parametrize("E", [0.001, -0.001, 0.01, -0.01])
def test_bounds_two_bit_grid(bits, E):
    assert check_bounds(spec(bits), E).holds


def test_bounds_domain():
    with pytest.raises(ValueError):
        check_bounds(spec("00"), 0.05)


def test_bounds_violation_reported(monkeypatch):
    import nandwalk.scattering as sc

    real = sc.transmission_at_energy
    monkeypatch.setattr(sc, "transmission_at_energy", lambda s, E: real(spec("00"), E))
    report = sc.check_bounds(spec("11"), 0.01, strict=False)
    assert report.nand == 0 and not report.holds
    with pytest.raises(BoundViolation, match="inputs=11"):
        sc.check_bounds(spec("11"), 0.01)


@pytest.mark.parametrize("bits", ALL_INPUTS, ids=lambda b: "".join(map(str, b)))
def test_eigenvector_ansatz(bits):
    """Fit the plane-wave form to an eigenvector of a finite 201-site runway."""
    s = spec(bits)
    g = build_system(0, 201, 1.0, s)
    h = hamiltonian_from_graph(g, sign=-1)
    runway = np.array(g.region("runway"))
    chosen = None
    for k in np.argsort(np.abs(h.eigenvalues)):
        v = h.eigenvectors[:, k]
        amp = v[runway - 1]
        if abs(h.eigenvalues[k]) > 1e-8 and np.abs(amp - amp[::-1]).max() < 1e-8:
            chosen = k
            break
    E = float(h.eigenvalues[chosen])
    v = h.eigenvectors[:, chosen]
    assert v[g.root - 1] / v[g.attach_site - 1] == pytest.approx(tree_fraction(s, E).value.real, rel=1e-8)
    t_fit = extract_transmission(v, E, runway, g.attach_site)
    t_ana = transmission_at_energy(s, E).T
    assert abs(t_fit - t_ana) <= 0.02 * max(abs(t_ana), 1e-3) + 1e-10
