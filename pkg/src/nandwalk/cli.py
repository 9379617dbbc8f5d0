"""Command-line front end.

Exit codes: 0 success, 1 disagreement or failed check, 2 usage/config error.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, config
from .dynamics import evolve, snapshot_csv
from .experiment import (
    ExperimentConfig,
    PacketOverride,
    build,
    entry_width,
    error_rate_sweep,
    measure_velocity,
    run_nand_experiment,
    summarize,
    truth_table,
)
from .graph import NandTreeSpec, build_system
from .output import atomic_write, csv_text, fmt, json_text
from .scattering import nand_eval, transmission_at_energy
from .slide import TransferError, packet_params, verify_pst

SUBCOMMANDS = ("simulate", "truth-table", "scatter", "slide-check", "sweep", "export-graph")
GEOMETRY = ("l_qs", "l_rw", "j_mm_inv")


def _experiment_config(cfg: dict, tree: NandTreeSpec | None) -> ExperimentConfig:
    packet = None
    if cfg["packet_mu"] is not None:
        packet = PacketOverride(cfg["packet_mu"], cfg["packet_sigma"], cfg["packet_gamma"])
    try:
        return ExperimentConfig(
            L_qs=cfg["l_qs"],
            L_rw=cfg["l_rw"],
            J=cfg["j_mm_inv"],
            slide_variant=cfg["slide_variant"],
            tree=tree,
            z_max=cfg["z_max_mm"],
            z_step=cfg["z_step_mm"],
            packet=packet,
            sign=cfg["sign"],
        )
    except ValueError as exc:
        raise config.ConfigError(str(exc)) from None


def _tree(cfg: dict) -> NandTreeSpec | None:
    if not cfg["inputs"]:
        return None
    try:
        spec = NandTreeSpec.from_bits(cfg["inputs"])
    except ValueError as exc:
        raise config.ConfigError(f"inputs: {exc}") from None
    if spec.depth != cfg["tree_depth"]:
        raise config.ConfigError(
            f"inputs {cfg['inputs']!r} imply depth {spec.depth}, but tree_depth = {cfg['tree_depth']}"
        )
    return spec


RUN_HEADER = ["inputs_bits", "z_mm", "S_L", "S_C", "S_R", "S_LC", "L_out", "P_plus"]


def cmd_simulate(cfg: dict, out: Path, hooks: argparse.Namespace) -> int:
    config.require(cfg, *GEOMETRY)
    tree = _tree(cfg)
    run = run_nand_experiment(_experiment_config(cfg, tree))
    bits = tree.bits if tree else ""
    rows = [[bits, r.z, r.S_L, r.S_C, r.S_R, r.S_LC, r.L_out, r.P_plus] for r in run.records]
    atomic_write(out / "run.csv", csv_text(RUN_HEADER, rows))
    if tree is not None:
        row = summarize(run)
        summary = {
            "inputs": row.inputs,
            "verdict": row.verdict,
            "nand_oracle": row.nand_oracle,
            "T0_abs2": row.T0_abs2,
            "agree": row.agree,
        }
    else:
        summary = {"inputs": "", "verdict": None, "nand_oracle": None, "T0_abs2": None, "agree": None}
    atomic_write(out / "summary.json", json_text(summary))
    return 0


def cmd_truth_table(cfg: dict, out: Path, hooks: argparse.Namespace) -> int:
    config.require(cfg, *GEOMETRY)
    depth = cfg["tree_depth"]
    if depth > 2:
        print(f"warning: depth {depth} runs {2 ** 2 ** depth} lattices", file=sys.stderr)
    rows = truth_table(_experiment_config(cfg, None), depth, workers=cfg["workers"])
    if hooks.invert_oracle:
        for r in rows:
            r.nand_oracle = 1 - r.nand_oracle
    header = ["inputs", "class", "verdict", "nand_oracle", "T0_abs2", "L_out", "agree"]
    table = [[r.inputs, r.class_label, r.verdict, r.nand_oracle, r.T0_abs2, r.L_out, r.agree] for r in rows]
    atomic_write(out / "truth_table.csv", csv_text(header, table))
    bad = [r.inputs for r in rows if not r.agree]
    if bad:
        print(f"disagreement for inputs: {', '.join(bad)}", file=sys.stderr)
        return 1
    return 0


def cmd_scatter(cfg: dict, out: Path, hooks: argparse.Namespace) -> int:
    tree = _tree(cfg)
    specs = [tree] if tree else [
        NandTreeSpec(cfg["tree_depth"], bits)
        for bits in np.ndindex(*(2,) * 2 ** cfg["tree_depth"])
    ]
    rows = []
    for spec in specs:
        for E in cfg["energies"]:
            try:
                res = transmission_at_energy(spec, E)
            except ValueError as exc:
                raise config.ConfigError(f"energies: {exc}") from None
            t2 = abs(res.T) ** 2
            rows.append([spec.bits, E, res.theta, res.T.real, res.T.imag, t2, abs(res.R) ** 2, int(t2 > 0.5)])
    header = ["inputs", "E", "theta", "re_T", "im_T", "abs_T2", "abs_R2", "verdict"]
    atomic_write(out / "scatter.csv", csv_text(header, rows))
    return 0


def cmd_slide_check(cfg: dict, out: Path, hooks: argparse.Namespace) -> int:
    config.require(cfg, *GEOMETRY)
    exp = _experiment_config({**cfg, "packet_mu": None}, None)
    system = build(exp)
    for z in cfg["profile_z_mm"]:
        psi = evolve(system.hamiltonian, system.psi0, z)
        atomic_write(out / f"profile_z{fmt(z)}.csv", snapshot_csv(system.graph, psi))
    status = 0
    try:
        fidelity = verify_pst(cfg["pst_length"])
    except TransferError as exc:
        print(str(exc), file=sys.stderr)
        fidelity, status = None, 1
    theory = packet_params(cfg["l_qs"], cfg["j_mm_inv"])
    window = tuple(cfg["velocity_window_mm"])
    if len(window) != 2:
        raise config.ConfigError("velocity_window_mm needs exactly two numbers")
    velocity = measure_velocity(exp, window)
    z_entry, mu_hat, sigma_hat = entry_width(exp)
    summary = {
        "pst_length": cfg["pst_length"],
        "pst_fidelity": fidelity,
        "theory_mu": theory.mu,
        "theory_sigma": theory.sigma,
        "theory_velocity": theory.velocity,
        "measured_velocity": velocity,
        "entry_z_mm": z_entry,
        "entry_mu_hat": mu_hat,
        "entry_sigma_hat": sigma_hat,
    }
    atomic_write(out / "slide_summary.json", json_text(summary))
    return status


def cmd_sweep(cfg: dict, out: Path, hooks: argparse.Namespace) -> int:
    depth = cfg["tree_depth"]
    inputs = [bits for bits in np.ndindex(*(2,) * 2**depth)]
    res = error_rate_sweep(cfg["l_half"], cfg["sigma_values"], inputs=inputs, J=1.0, sign=cfg["sign"])
    keys = list(res.per_input)
    header = ["sigma", "readout_z", "mean_error"] + [f"error_{k}" for k in keys]
    rows = [
        [s, z, e] + [res.per_input[k][i] for k in keys]
        for i, (s, z, e) in enumerate(zip(res.sigmas, res.readout, res.errors))
    ]
    atomic_write(out / "sweep.csv", csv_text(header, rows))
    atomic_write(
        out / "sweep_summary.json",
        json_text({"l_half": cfg["l_half"], "argmin_sigma": res.argmin, "l_half_over_6": cfg["l_half"] / 6}),
    )
    return 0


def cmd_export_graph(cfg: dict, out: Path, hooks: argparse.Namespace) -> int:
    config.require(cfg, *GEOMETRY)
    try:
        g = build_system(cfg["l_qs"], cfg["l_rw"], cfg["j_mm_inv"], _tree(cfg), cfg["slide_variant"])
    except ValueError as exc:
        raise config.ConfigError(str(exc)) from None
    atomic_write(out / "graph.json", g.to_json())
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "truth-table": cmd_truth_table,
    "scatter": cmd_scatter,
    "slide-check": cmd_slide_check,
    "sweep": cmd_sweep,
    "export-graph": cmd_export_graph,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nandwalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("-c", "--config", help="flat key = value config file")
        p.add_argument("-o", "--out", default=".", help="output directory (default: .)")
        p.add_argument("overrides", nargs="*", metavar="key=value")
        p.add_argument("--invert-oracle", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    out = Path(args.out)
    try:
        cfg = config.load(args.config, args.overrides)
        status = COMMANDS[args.subcommand](cfg, out, args)
    except config.ConfigError as exc:
        print(f"nandwalk {args.subcommand}: {exc}", file=sys.stderr)
        return 2
    manifest = {
        "subcommand": args.subcommand,
        "version": __version__,
        "config": {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(cfg.items())},
        "exit_code": status,
    }
    atomic_write(out / "manifest.json", json_text(manifest))
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
