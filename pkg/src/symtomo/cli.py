"""Command-line front end.

Subcommands mirror the library's main capabilities:

    symtomo basis    -- compute a symmetry operator basis, write it as JSON
    symtomo prepare  -- simulate a (possibly noisy) state, write the matrix
    symtomo sample   -- measure a stored state, write outcome histograms
    symtomo estimate -- reconstruct a state from histograms
    symtomo metrics  -- compare two stored states
    symtomo sweep    -- run a configured sweep study into an output directory
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .estimation import EstimatorConfig, solve_cvqt, solve_git, solve_maxlik
from .harness import export, observable_count_sweep, run_sweep, sweep_config_from_dict
from .measurement import (
    extract_frequencies,
    full_observables,
    full_settings,
    ingest_histograms,
    marginal_observables,
    pi_observables,
    pi_settings,
    sample_state,
    save_histograms,
    select_settings,
)
from .metrics import metric_report
from .operators import load_matrix, matrix_from_json, matrix_to_json, save_matrix
from .statesim import (
    NoiseModel,
    build_ghz_phase,
    build_twisted,
    run_circuit,
    run_werner_pair,
    werner_exact,
)
from .symmetry import SymmetrySpec, compute_commutant_basis

_CHANNEL_ALIASES = {
    "none": "none",
    "ad": "amplitude_damping",
    "amplitude-damping": "amplitude_damping",
    "bf": "bit_flip",
    "bit-flip": "bit_flip",
    "dep": "depolarizing",
    "depolarizing": "depolarizing",
    "dep-pauli": "depolarizing_pauli",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symtomo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_basis = sub.add_parser("basis", help="compute a symmetry operator basis")
    p_basis.add_argument("--symmetry", required=True, choices=["permutation", "collective", "custom"])
    p_basis.add_argument("--qubits", type=int, required=True)
    p_basis.add_argument("--generators", help="JSON file with custom generator matrices")
    p_basis.add_argument(
        "--generator-kind", choices=["unitary", "lie"], default="unitary",
        help="how to interpret --generators (default: unitary)",
    )
    p_basis.add_argument("--out", required=True)

    p_prep = sub.add_parser("prepare", help="simulate a state preparation")
    p_prep.add_argument("--state", required=True, choices=["ghz", "twisted", "werner", "werner-exact"])
    p_prep.add_argument("--qubits", type=int, required=True)
    p_prep.add_argument("--theta", type=float, default=0.0)
    p_prep.add_argument("--theta-a", type=float, default=0.0)
    p_prep.add_argument("--theta-b", type=float, default=np.pi)
    p_prep.add_argument("--p", type=float, default=1.0)
    p_prep.add_argument("--p2", type=float, default=None)
    p_prep.add_argument("--noise", default="none", choices=sorted(_CHANNEL_ALIASES))
    p_prep.add_argument("--level", type=float, default=0.0)
    p_prep.add_argument("--policy", default="post", choices=["post", "pergate"])
    p_prep.add_argument("--out", required=True)

    p_sample = sub.add_parser("sample", help="measure a stored state")
    p_sample.add_argument("--state", required=True, help="density matrix JSON file")
    p_sample.add_argument(
        "--settings", default="pi",
        help="'pi', 'werner', or a JSON file holding a list of setting strings",
    )
    p_sample.add_argument("--count", type=int, default=None,
                          help="number of settings for --settings werner")
    p_sample.add_argument("--shots", type=int, required=True)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--out", required=True)

    p_est = sub.add_parser("estimate", help="reconstruct a state from histograms")
    p_est.add_argument("--data", required=True, help="histogram JSON file")
    p_est.add_argument("--mode", default="git", choices=["git", "cvqt", "maxlik"])
    p_est.add_argument("--symmetry", default="permutation", choices=["permutation", "collective"])
    p_est.add_argument("--alpha", type=float, default=1.0)
    p_est.add_argument("--beta", type=float, default=1.0)
    p_est.add_argument("--gamma", type=float, default=1e-3)
    p_est.add_argument("--seed", type=int, default=0)
    p_est.add_argument("--out", required=True)

    p_met = sub.add_parser("metrics", help="compare two stored states")
    p_met.add_argument("--a", required=True)
    p_met.add_argument("--b", required=True)
    p_met.add_argument("--fidelity-convention", default="squared", choices=["squared", "sqrt"])
    p_met.add_argument("--out", default=None, help="write JSON here instead of stdout")

    p_sweep = sub.add_parser("sweep", help="run a sweep study")
    p_sweep.add_argument("--config", required=True, help="sweep config JSON file")
    p_sweep.add_argument("--out-dir", required=True)
    p_sweep.add_argument("--format", default="csv", choices=["csv", "json", "both"])
    p_sweep.add_argument("--jobs", type=int, default=1)
    return parser


def _cmd_basis(args) -> int:
    if args.symmetry == "custom":
        if not args.generators:
            raise SystemExit("--symmetry custom requires --generators FILE")
        payload = json.loads(Path(args.generators).read_text())
        mats = [matrix_from_json(item) for item in payload]
        spec = (
            SymmetrySpec.custom_unitaries(mats)
            if args.generator_kind == "unitary"
            else SymmetrySpec.custom_lie(mats)
        )
        if spec.n_qubits != args.qubits:
            raise SystemExit("generator dimension does not match --qubits")
    elif args.symmetry == "permutation":
        spec = SymmetrySpec.permutation(args.qubits)
    else:
        spec = SymmetrySpec.collective(args.qubits)
    basis = compute_commutant_basis(spec)
    payload = {
        "symmetry": basis.kind,
        "n_qubits": basis.n_qubits,
        "size": basis.size,
        "elements": [matrix_to_json(el) for el in basis.elements],
    }
    Path(args.out).write_text(json.dumps(payload) + "\n")
    print(f"wrote {basis.size} basis elements to {args.out}")
    return 0


def _cmd_prepare(args) -> int:
    channel = _CHANNEL_ALIASES[args.noise]
    noise = NoiseModel(channel=channel, level=args.level, policy=args.policy)
    if args.state == "ghz":
        rho = run_circuit(build_ghz_phase(args.qubits, args.theta), noise)
    elif args.state == "twisted":
        rho = run_circuit(build_twisted(args.qubits, args.theta), noise)
    elif args.state == "werner":
        if args.qubits != 2:
            raise SystemExit("the werner circuit prepares a 2-qubit state")
        rho = run_werner_pair(args.theta_a, args.theta_b, noise)
    else:
        n_pairs = 2 if args.p2 is not None else 1
        if args.qubits != 2 * n_pairs:
            raise SystemExit("werner-exact needs --qubits 2, or 4 with --p2")
        rho = werner_exact(args.p, n_pairs=n_pairs, p2=args.p2)
        if channel != "none" and args.level > 0.0:
            from .statesim import apply_channel

            for q in range(args.qubits):
                rho = apply_channel(rho, channel, args.level, q)
    save_matrix(args.out, rho)
    print(f"wrote {args.qubits}-qubit state to {args.out}")
    return 0


def _cmd_sample(args) -> int:
    rho = load_matrix(args.state)
    n = rho.shape[0].bit_length() - 1
    if args.settings == "pi":
        settings = pi_settings(n)
    elif args.settings == "werner":
        basis = compute_commutant_basis(SymmetrySpec.collective(n))
        count = args.count or min(len(full_settings(n)), 2 * basis.size)
        settings = select_settings(basis, full_settings(n), count)
    else:
        settings = json.loads(Path(args.settings).read_text())
    hists = sample_state(rho, settings, args.shots, args.seed)
    save_histograms(args.out, hists, n_qubits=n)
    print(f"wrote {len(hists)} histograms ({args.shots} shots each) to {args.out}")
    return 0


def _cmd_estimate(args) -> int:
    hists = ingest_histograms(args.data)
    n = hists[0].n_qubits
    config = EstimatorConfig(alpha=args.alpha, beta=args.beta, gamma=args.gamma, seed=args.seed)
    settings = [h.setting for h in hists]
    if args.mode == "git":
        spec = (
            SymmetrySpec.permutation(n)
            if args.symmetry == "permutation"
            else SymmetrySpec.collective(n)
        )
        basis = compute_commutant_basis(spec)
        if args.symmetry == "permutation":
            records = extract_frequencies(hists, pi_observables(n), pi_mode=True)
        else:
            targets = sorted(set(settings)) + marginal_observables(settings)
            records = extract_frequencies(hists, targets)
        result = solve_git(records, basis, config)
    else:
        covered = set(settings) | set(marginal_observables(settings))
        measured = [o for o in full_observables(n) if o in covered]
        records = extract_frequencies(hists, measured)
        if args.mode == "cvqt":
            from .measurement import unmeasured_records

            records += unmeasured_records([o for o in full_observables(n) if o not in covered])
            result = solve_cvqt(records, 2**n, config)
        else:
            result = solve_maxlik(records, config)
    payload = {
        "mode": result.mode,
        "objective": result.objective,
        "converged": result.converged,
        "iterations": result.iterations,
        "feasibility_residual": result.feasibility_residual,
        "delta": [float(d) for d in result.delta],
        "rho_hat": matrix_to_json(result.rho_hat),
    }
    Path(args.out).write_text(json.dumps(payload) + "\n")
    print(
        f"{result.mode} estimate: objective {result.objective:.6g}, "
        f"converged={result.converged}, wrote {args.out}"
    )
    return 0


def _cmd_metrics(args) -> int:
    rho = load_matrix(args.a)
    sigma = load_matrix(args.b)
    report = metric_report(rho, sigma, fidelity_convention=args.fidelity_convention)
    text = json.dumps(report.to_dict(), indent=1, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def _cmd_sweep(args) -> int:
    payload = json.loads(Path(args.config).read_text())
    config = sweep_config_from_dict(payload)
    if config.observable_counts is not None:
        records = observable_count_sweep(config)
    else:
        records = run_sweep(config, jobs=args.jobs)
    written = export(records, args.out_dir, fmt=args.format, config=config)
    print(f"wrote {len(records)} records; files: {', '.join(p.name for p in written)}")
    return 0


_COMMANDS = {
    "basis": _cmd_basis,
    "prepare": _cmd_prepare,
    "sample": _cmd_sample,
    "estimate": _cmd_estimate,
    "metrics": _cmd_metrics,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
