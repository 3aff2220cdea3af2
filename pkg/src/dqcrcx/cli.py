"""Command-line entry point: `dqcrcx <command> ...`."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .circuit import read_circuit, write_circuit
from .config import EXECUTORS, configure_logging, get_trajectories, get_width_cap
from .density import exact_density_fidelity
from .distributor import distribute
from .harness import (
    depth_csv,
    depth_table,
    load_config,
    records_csv,
    run_experiment,
    suite_table1,
    write_csv,
    write_depth_csv,
)
from .library import FAMILIES, CircuitSpec, build_circuit
from .scheduler import Assignment, assign, cut_weight, interaction_graph, parse_network
from .simulator import FidelityEstimate, NoiseParams, estimate_fidelity, simulate_ideal
from .transpiler import transpile, transpile_with_report

logger = logging.getLogger(__name__)


def _cmd_generate(args) -> None:
    spec = CircuitSpec(
        family=args.family,
        num_qubits=args.qubits,
        seed=args.seed,
        marked=args.marked,
        iterations=args.iterations,
        layers=args.layers,
        two_qubit_gates=args.two_qubit_gates,
        one_qubit_gates=args.one_qubit_gates,
    )
    circuit = build_circuit(spec)
    if args.transpile:
        circuit = transpile(circuit)
    write_circuit(circuit, args.out)


def _cmd_inspect(args) -> None:
    circuit = read_circuit(args.circuit)
    print(f"qubits={circuit.num_qubits}")
    print(f"clbits={circuit.num_clbits}")
    print(f"instructions={len(circuit)}")
    print(f"depth={circuit.depth()}")
    for kind, count in circuit.gate_histogram().items():
        print(f"gate.{kind}={count}")


def _cmd_transpile(args) -> None:
    circuit, report = transpile_with_report(read_circuit(args.circuit), verify=args.report)
    write_circuit(circuit, args.out)
    if args.report:
        print("\n".join(report.to_lines()))


def _cmd_partition(args) -> None:
    circuit = read_circuit(args.circuit)
    net = parse_network(args.network)
    assignment = assign(circuit, net, args.schedule, args.seed)
    sys.stdout.write(assignment.to_csv())
    print(f"# cut_weight={cut_weight(interaction_graph(circuit), assignment)}")


def _assignment(args, circuit, net) -> Assignment:
    if args.assignment:
        return Assignment.from_csv(Path(args.assignment).read_text())
    return assign(circuit, net, args.schedule, args.seed)


def _cmd_build(args) -> None:
    circuit = read_circuit(args.circuit)
    net = parse_network(args.network)
    distributed = distribute(circuit, _assignment(args, circuit, net), net)
    distributed.validate()
    write_circuit(distributed.circuit, args.out)
    for key, value in distributed.summary().items():
        print(f"{key}={value}")


def _cmd_simulate(args) -> None:
    circuit = read_circuit(args.circuit)
    noise = NoiseParams.parse(args.noise)
    ideal = simulate_ideal(circuit)
    target = circuit
    if args.network:
        net = parse_network(args.network)
        target = distribute(circuit, _assignment(args, circuit, net), net)
    if args.oracle:
        value = exact_density_fidelity(target, ideal, noise)
        estimate = FidelityEstimate(value, 0.0, 0)
    else:
        trajectories = get_trajectories() if args.trajectories is None else args.trajectories
        estimate = estimate_fidelity(
            target, ideal, noise, trajectories, args.seed, args.threads, executor=args.executor
        )
    print(estimate.to_csv_line())


def _cmd_run(args) -> None:
    records = []
    for cfg in load_config(args.config):
        records += run_experiment(cfg, args.trajectories, threads=args.threads, executor=args.executor)
    if args.out:
        write_csv(records, args.out)
    else:
        sys.stdout.write(records_csv(records))


def _cmd_suite(args) -> None:
    seeds = range(args.seeds) if args.seeds is not None else None
    width_cap = args.width_cap
    if width_cap is None and args.profile == "full":
        width_cap = get_width_cap()
    summary = suite_table1(
        args.out,
        load_config(args.config),
        seeds=seeds,
        n_traj=args.trajectories,
        width_cap=width_cap,
        profile=args.profile,
        threads=args.threads,
        executor=args.executor,
    )
    print(f"ran={','.join(summary.ran)}")
    print(f"skipped={','.join(summary.skipped)}")
    print(f"results={summary.results_path}")


def _cmd_depth(args) -> None:
    rows = depth_table(load_config(args.config))
    if args.out:
        write_depth_csv(rows, args.out)
    else:
        sys.stdout.write(depth_csv(rows))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dqcrcx",
        description="Distribute quantum circuits over QPUs with remote CX gates and estimate their fidelity.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a library circuit")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--qubits", required=True, type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--marked")
    p.add_argument("--iterations", type=int)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--two-qubit-gates", type=int)
    p.add_argument("--one-qubit-gates", type=int)
    p.add_argument("--transpile", action="store_true", help="emit the basis-gate version")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("inspect", help="print circuit statistics")
    p.add_argument("circuit")
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("transpile", help="rewrite into {X, RZ, H, CX}")
    p.add_argument("circuit")
    p.add_argument("--out", required=True)
    p.add_argument("--report", action="store_true", help="print gate counts and the unitary check")
    p.set_defaults(func=_cmd_transpile)

    def add_schedule(p):
        p.add_argument("--network", required=True, help='e.g. "2x4+2" or "4+2,4+2"')
        p.add_argument("--schedule", choices=("naive", "gp"), default="gp")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("partition", help="assign qubits to QPUs")
    p.add_argument("circuit")
    add_schedule(p)
    p.set_defaults(func=_cmd_partition)

    p = sub.add_parser("build", help="write the distributed circuit")
    p.add_argument("circuit")
    add_schedule(p)
    p.add_argument("--assignment", help="qubit,qpu,slot CSV overriding --schedule")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("simulate", help="estimate fidelity under noise")
    p.add_argument("circuit")
    p.add_argument("--network")
    p.add_argument("--schedule", choices=("naive", "gp"), default="gp")
    p.add_argument("--assignment")
    p.add_argument("--noise", default="0.001,0.005,0.005", help="p1,p2,p_ro")
    p.add_argument("--trajectories", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    p.add_argument("--executor", choices=EXECUTORS, help="worker pool kind, defaults to DQCRCX_EXECUTOR")
    p.add_argument("--oracle", action="store_true", help="exact density matrix (<= 10 qubits)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("run", help="run the experiments of one config file")
    p.add_argument("--config", required=True)
    p.add_argument("--trajectories", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--executor", choices=EXECUTORS, help="worker pool kind, defaults to DQCRCX_EXECUTOR")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("suite", help="run the reference grid")
    p.add_argument("--config", help="defaults to the packaged reference grid")
    p.add_argument("--seeds", type=int, help="use seeds 0..N-1")
    p.add_argument("--trajectories", type=int)
    p.add_argument("--width-cap", type=int)
    p.add_argument("--profile", choices=("full", "ci"), default="full")
    p.add_argument("--threads", type=int)
    p.add_argument("--executor", choices=EXECUTORS, help="worker pool kind, defaults to DQCRCX_EXECUTOR")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_suite)

    p = sub.add_parser("depth", help="depth and remote CX per schedule, no simulation")
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_depth)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        args.func(args)
    except Exception as e:
        logger.error(f"{args.command} failed: {str(e)}", exc_info=args.verbose)
        print(f"Error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
