"""Continuous-time quantum-walk NAND-tree evaluation with a quantum-slide source."""

__version__ = "0.1.0"

from .dynamics import (
    Hamiltonian,
    energy_moments,
    evolve,
    evolve_many,
    gaussian_packet,
    hamiltonian_from_graph,
    site_probabilities,
)
from .experiment import (
    ExperimentConfig,
    PacketOverride,
    error_rate_sweep,
    measure_velocity,
    p_plus_expectation,
    run_nand_experiment,
)
from .graph import (
    CouplingGraph,
    NandTreeSpec,
    assemble_system,
    build_nand_tree,
    build_runway,
    build_slide,
    build_system,
)
from .scattering import check_bounds, nand_eval, transmission, tree_fraction
from .slide import fit_packet, kravchuk_matrix, packet_params, slide_amplitude, verify_pst
