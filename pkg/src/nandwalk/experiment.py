"""End-to-end runs: inject, propagate, read out region sums and verdicts."""
from __future__ import annotations

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .dynamics import (
    Hamiltonian,
    basis_state,
    evolve_many,
    gaussian_packet,
    hamiltonian_from_graph,
    right_moving_sign,
)
from .graph import CouplingGraph, NandTreeSpec, build_system
from .scattering import nand_eval, transmission_at_energy
from .slide import fit_packet

# region labels used by the region-sum kernel
_SLIDE, _LEFT, _ATTACH, _RIGHT, _TREE = range(5)
# below this the outside-slide weight is round-off, not signal
_EMPTY = 1e-12


class BoundaryWarning(UserWarning):
    """The packet reached a runway end inside a fitting window."""


@dataclass(frozen=True)
class PacketOverride:
    """Analytic packet on the runway instead of slide injection.

    Give ``sigma`` directly or ``gamma`` for sigma = gamma * sqrt(N).
    """

    mu: float
    sigma: float | None = None
    gamma: float | None = None

    def width(self, n_inputs: int | None) -> float:
        if self.sigma is not None:
            return self.sigma
        if self.gamma is None or n_inputs is None:
            raise ValueError("packet override needs sigma, or gamma together with a tree")
        return self.gamma * math.sqrt(n_inputs)


@dataclass(frozen=True)
class ExperimentConfig:
    L_qs: int = 20
    L_rw: int = 31
    J: float = 0.48
    slide_variant: str = "odd_chain"
    tree: NandTreeSpec | None = None
    z_max: float = 72.0
    z_step: float = 0.5
    packet: PacketOverride | None = None
    sign: int = -1

    def __post_init__(self) -> None:
        if self.z_step <= 0:
            raise ValueError(f"z_step must be positive, got {self.z_step}")
        if self.z_max < 0:
            raise ValueError(f"z_max must be non-negative, got {self.z_max}")
        if self.packet is None and self.L_qs < 2:
            raise ValueError("slide injection needs L_qs >= 2 (or give a packet override)")

    def z_grid(self) -> np.ndarray:
        n = int(math.floor(self.z_max / self.z_step + 1e-9))
        zs = [i * self.z_step for i in range(n + 1)]
        if zs[-1] < self.z_max - 1e-12:
            zs.append(self.z_max)
        return np.array(zs)

    def with_inputs(self, bits) -> "ExperimentConfig":
        return replace(self, tree=NandTreeSpec.from_bits(bits))


@dataclass
class RunRecord:
    z: float
    probabilities: np.ndarray
    S_L: float
    S_R: float
    S_C: float
    S_LC: float
    L_out: float
    P_plus: float


@dataclass
class ExperimentRun:
    config: ExperimentConfig
    graph: CouplingGraph
    records: list[RunRecord]
    verdict: int | None = None
    extras: dict = field(default_factory=dict)

    def at(self, z: float) -> RunRecord:
        return min(self.records, key=lambda r: abs(r.z - z))


@dataclass(frozen=True)
class System:
    """A built lattice plus its Hamiltonian and initial state."""

    graph: CouplingGraph
    hamiltonian: Hamiltonian
    psi0: np.ndarray
    labels: np.ndarray


def site_labels(g: CouplingGraph) -> np.ndarray:
    labels = np.empty(g.n_sites, dtype=np.int64)
    for s in g.region("slide"):
        labels[s - 1] = _SLIDE
    for s in g.region("tree"):
        labels[s - 1] = _TREE
    for s in g.region("runway"):
        if s < g.attach_site:
            labels[s - 1] = _LEFT
        elif s > g.attach_site:
            labels[s - 1] = _RIGHT
        else:
            labels[s - 1] = _ATTACH
    return labels


def build(cfg: ExperimentConfig) -> System:
    g = build_system(cfg.L_qs, cfg.L_rw, cfg.J, cfg.tree, cfg.slide_variant)
    h = hamiltonian_from_graph(g, sign=cfg.sign)
    if cfg.packet is None:
        psi0 = basis_state(g.n_sites, 1)
    else:
        n_inputs = cfg.tree.n_inputs if cfg.tree is not None else None
        psi0 = gaussian_packet(
            cfg.L_rw,
            cfg.packet.mu,
            cfg.packet.width(n_inputs),
            momentum_sign=right_moving_sign(cfg.sign),
            graph=g,
        )
    return System(g, h, psi0, site_labels(g))


def _records(system: System, zs: np.ndarray) -> list[RunRecord]:
    states = evolve_many(system.hamiltonian, system.psi0, zs)
    probs = np.abs(states) ** 2
    sums = _kernels.region_sums(np.ascontiguousarray(probs), system.labels, 5)
    out = []
    for z, p, row in zip(zs, probs, sums):
        left, right, tree = row[_LEFT], row[_RIGHT], row[_TREE]
        denom = left + right + tree
        if denom > _EMPTY:
            s_l, s_r, s_c = left / denom, right / denom, tree / denom
        else:
            # nothing has left the slide yet: count as not transmitted
            s_l, s_r, s_c = 1.0, 0.0, 0.0
        s_lc = s_l + s_c
        out.append(
            RunRecord(
                z=float(z),
                probabilities=p,
                S_L=float(s_l),
                S_R=float(s_r),
                S_C=float(s_c),
                S_LC=float(s_lc),
                L_out=float(s_r - s_lc),
                P_plus=float(right),
            )
        )
    return out


def run_nand_experiment(cfg: ExperimentConfig) -> ExperimentRun:
    """Evolve over the z grid; the verdict is ``L_out(z_max) > 0``."""
    system = build(cfg)
    records = _records(system, cfg.z_grid())
    verdict = None
    if cfg.tree is not None:
        verdict = int(records[-1].L_out > 0)
    return ExperimentRun(cfg, system.graph, records, verdict)


def p_plus_expectation(cfg: ExperimentConfig, z: float) -> float:
    """Raw probability on runway sites right of the attach site at distance ``z``."""
    system = build(cfg)
    return _records(system, np.array([z]))[0].P_plus


def _runway_fit(g: CouplingGraph, probs: np.ndarray) -> tuple[float, float, float]:
    runway = np.asarray(g.region("runway"))
    p = probs[runway - 1]
    mu, sigma = fit_packet(p, runway)
    return mu, sigma, float(p.sum())


def measure_velocity(
    cfg: ExperimentConfig,
    z_window: tuple[float, float],
    edge_sites: int = 2,
    edge_tol: float = 1e-2,
) -> float:
    """Least-squares slope (sites/mm) of the runway packet centre over ``z_window``.

    Warns with :class:`BoundaryWarning` if the outermost ``edge_sites`` at
    either runway end hold more than ``edge_tol`` of the runway probability.
    """
    if cfg.tree is not None:
        raise ValueError("velocity is measured on the tree-free geometry")
    z0, z1 = z_window
    if not z1 > z0:
        raise ValueError(f"empty window {z_window}")
    n = max(int(round((z1 - z0) / cfg.z_step)) + 1, 2)
    zs = np.linspace(z0, z1, n)
    system = build(cfg)
    states = evolve_many(system.hamiltonian, system.psi0, zs)
    probs = np.abs(states) ** 2
    runway = np.asarray(system.graph.region("runway"))
    mus = []
    for p in probs:
        mu, _, mass = _runway_fit(system.graph, p)
        pr = p[runway - 1]
        edge = (pr[:edge_sites].sum() + pr[-edge_sites:].sum()) / mass
        if edge > edge_tol:
            warnings.warn(
                f"packet touches a runway end in window {z_window} (edge mass {edge:.3g})",
                BoundaryWarning,
                stacklevel=2,
            )
        mus.append(mu)
    slope, _ = np.polyfit(zs, mus, 1)
    return float(slope)


def entry_width(cfg: ExperimentConfig, threshold: float = 0.99) -> tuple[float, float, float]:
    """Fit the packet once the runway first holds ``threshold`` of the probability.

    Returns ``(z, mu_hat, sigma_hat)``; site indices are global.
    """
    system = build(cfg)
    zs = cfg.z_grid()
    states = evolve_many(system.hamiltonian, system.psi0, zs)
    for z, psi in zip(zs, states):
        mu, sigma, mass = _runway_fit(system.graph, np.abs(psi) ** 2)
        if mass >= threshold:
            return float(z), mu, sigma
    raise ValueError(f"runway never holds {threshold:.0%} of the probability up to z={cfg.z_max}")


def mirror_readout(L_rw: int, mu: float, J: float) -> float:
    """Distance at which a packet launched at ``mu`` (velocity 2J) has crossed
    the attach site and sits at the mirror image of its starting point."""
    s_mid = (L_rw + 1) / 2
    return (s_mid - mu) / J


def class_label(inputs) -> str:
    """Canonical form under swapping the two subtrees of any gate."""

    def canon(bits):
        if len(bits) == 1:
            return str(bits[0])
        h = len(bits) // 2
        a, b = sorted((canon(bits[:h]), canon(bits[h:])))
        return f"({a}{b})"

    return canon(tuple(int(b) for b in inputs))


@dataclass
class TruthRow:
    inputs: str
    verdict: int
    nand_oracle: int
    T0_abs2: float
    L_out: float
    class_label: str

    @property
    def agree(self) -> bool:
        return self.verdict == self.nand_oracle and self.verdict == int(self.T0_abs2 == 1.0)


def summarize(run: ExperimentRun) -> TruthRow:
    spec = run.config.tree
    t0 = transmission_at_energy(spec, 0.0).T
    return TruthRow(
        inputs=spec.bits,
        verdict=run.verdict,
        nand_oracle=nand_eval(spec.inputs),
        T0_abs2=float(abs(t0) ** 2),
        L_out=run.records[-1].L_out,
        class_label=class_label(spec.inputs),
    )


def truth_table(cfg: ExperimentConfig, depth: int, workers: int = 1) -> list[TruthRow]:
    """Run every input vector of a depth-``depth`` tree; rows in lexicographic order."""
    configs = [cfg.with_inputs(bits) for bits in itertools.product((0, 1), repeat=2**depth)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = list(pool.map(run_nand_experiment, configs))
    else:
        runs = [run_nand_experiment(c) for c in configs]
    return [summarize(r) for r in runs]


@dataclass
class SweepResult:
    sigmas: np.ndarray
    errors: np.ndarray  # mean over inputs
    per_input: dict[str, np.ndarray]
    readout: np.ndarray

    @property
    def argmin(self) -> float:
        return float(self.sigmas[int(np.argmin(self.errors))])


def error_rate_sweep(
    L_half: int,
    sigma_values,
    inputs=None,
    J: float = 1.0,
    sign: int = -1,
) -> SweepResult:
    """Readout error |<P+> - F(x)| versus packet width.

    The runway has ``L_half`` sites on each side of the attach site, the packet
    starts at the middle of the left half, and ``<P+>`` is read at
    :func:`mirror_readout`.  ``inputs`` defaults to all depth-1 vectors.
    """
    if inputs is None:
        inputs = list(itertools.product((0, 1), repeat=2))
    sigmas = np.asarray(sigma_values, dtype=float)
    L_rw = 2 * L_half + 1
    mu = L_half / 2
    z_read = mirror_readout(L_rw, mu, J)
    per_input: dict[str, np.ndarray] = {}
    for bits in inputs:
        spec = NandTreeSpec.from_bits(bits)
        g = build_system(0, L_rw, J, spec)
        h = hamiltonian_from_graph(g, sign=sign)
        right = np.array([s for s in g.region("runway") if s > g.attach_site]) - 1
        target = nand_eval(spec.inputs)
        errs = []
        for sigma in sigmas:
            psi0 = gaussian_packet(L_rw, mu, sigma, right_moving_sign(sign), graph=g)
            psi = evolve_many(h, psi0, [z_read])[0]
            errs.append(abs(float(np.sum(np.abs(psi[right]) ** 2)) - target))
        per_input[spec.bits] = np.array(errs)
    errors = np.mean(list(per_input.values()), axis=0)
    return SweepResult(sigmas, errors, per_input, np.full(sigmas.shape, z_read))
