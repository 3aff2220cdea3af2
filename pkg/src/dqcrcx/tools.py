import logging
from typing import Any

from fastmcp import FastMCP

from .circuit import dumps, loads
from .config import configure_logging, get_trajectories
from .density import exact_density_fidelity
from .distributor import distribute
from .harness import load_config
from .library import CircuitSpec, build_circuit
from .scheduler import (
    Assignment,
    assign,
    cut_weight,
    interaction_graph,
    parse_network,
)
from .simulator import NoiseParams, estimate_fidelity, simulate_ideal
from .transpiler import transpile

# Configure logging
logger = logging.getLogger(__name__)
configure_logging()

mcp = FastMCP("dqc-remote-cx")


def _assignment_for(circuit, net, schedule: str, seed: int, assignment_csv: str | None) -> Assignment:
    if assignment_csv:
        return Assignment.from_csv(assignment_csv)
    return assign(circuit, net, schedule, seed)


@mcp.prompt
def scheduling_study():
    return """
    You are a helpful assistant that compares qubit scheduling strategies for distributed quantum circuits.
    Generate a circuit, partition it with both the naive and the gp schedule on the same network,
    build both distributed circuits and compare remote CX counts, depth and estimated fidelity.
    Use list_table1_configurations to pick realistic networks.
    """


@mcp.tool
def generate_circuit(
    family: str,
    num_qubits: int,
    seed: int = 0,
    marked: str | None = None,
    iterations: int | None = None,
    layers: int = 2,
    transpiled: bool = True,
) -> dict[str, Any]:
    """Generate a benchmark circuit in the text circuit format.

    Builds one of the library circuits and optionally rewrites it into the
    {X, RZ, H, CX} basis, which every other tool expects.

    Args:
        family: One of "ghz", "grover", "vqc", "random"
        num_qubits: Number of logical qubits (>= 2)
        seed: Seed for the "vqc" angles and the "random" gate sequence
        marked: Grover marked bitstring, most significant qubit first (defaults to all ones)
        iterations: Grover iterations (defaults to floor(pi/4 * sqrt(2**n)))
        layers: VQC layers (default 2)
        transpiled: Whether to return the basis-gate version (default True)

    Returns:
        Dictionary with:
        - circuit: the circuit in text format
        - num_qubits, instructions, depth, cx_count
        - histogram: gate kind -> count

    Examples:
        - generate_circuit("ghz", 8) - 8-qubit GHZ preparation
        - generate_circuit("grover", 4, marked="1010", iterations=1) - one Grover round
        - generate_circuit("random", 12, seed=12) - pinned random circuit
    """
    logger.info(
        f"generate_circuit called: family={family}, num_qubits={num_qubits}, seed={seed}, transpiled={transpiled}"
    )

    try:
        spec = CircuitSpec(
            family=family,
            num_qubits=num_qubits,
            seed=seed,
            marked=marked,
            iterations=iterations,
            layers=layers,
        )
        circuit = build_circuit(spec)
        if transpiled:
            circuit = transpile(circuit)
        histogram = circuit.gate_histogram()
        logger.info(f"generate_circuit successful: {len(circuit)} instructions")
        return {
            "circuit": dumps(circuit),
            "num_qubits": circuit.num_qubits,
            "instructions": len(circuit),
            "depth": circuit.depth(),
            "cx_count": histogram.get("CX", 0),
            "histogram": histogram,
        }
    except Exception as e:
        logger.error(f"generate_circuit failed: {str(e)}", exc_info=True)
        raise


@mcp.tool
def partition_qubits(
    circuit: str, network: str, schedule: str = "gp", seed: int = 0
) -> dict[str, Any]:
    """Assign the logical qubits of a circuit to QPUs.

    Args:
        circuit: Transpiled circuit in text format (see generate_circuit)
        network: Network shorthand, e.g. "2x4+2" (two QPUs, 4 computational + 2 communication
                 qubits each) or "4+2,2+1" (QPUs listed one by one)
        schedule: "naive" (fill QPUs in qubit order) or "gp" (graph partitioning, min cut)
        seed: Seed for the gp restarts

    Returns:
        Dictionary with:
        - assignment: CSV text with header qubit,qpu,slot
        - cut_weight: number of CX gates crossing QPUs (= remote CX count)
        - naive_cut_weight: the naive schedule's cut, for comparison

    Examples:
        - partition_qubits(c, "2x4+2") - GP partition onto two QPUs
        - partition_qubits(c, "4x3+1", schedule="naive") - fill-up assignment
    """
    logger.info(f"partition_qubits called: network={network}, schedule={schedule}, seed={seed}")

    try:
        source = loads(circuit)
        net = parse_network(network)
        graph = interaction_graph(source)
        assignment = assign(source, net, schedule, seed)
        naive = assign(source, net, "naive")
        result = {
            "assignment": assignment.to_csv(),
            "cut_weight": cut_weight(graph, assignment),
            "naive_cut_weight": cut_weight(graph, naive),
        }
        logger.info(f"partition_qubits successful: cut weight {result['cut_weight']}")
        return result
    except Exception as e:
        logger.error(f"partition_qubits failed: {str(e)}", exc_info=True)
        raise


@mcp.tool
def build_distributed_circuit(
    circuit: str,
    network: str,
    schedule: str = "gp",
    seed: int = 0,
    assignment: str | None = None,
) -> dict[str, Any]:
    """Build the distributed circuit, replacing every cross-QPU CX by the remote CX protocol.

    Args:
        circuit: Transpiled circuit in text format
        network: Network shorthand such as "2x4+2"
        schedule: "naive" or "gp"; ignored when an explicit assignment is given
        seed: Seed for the gp restarts
        assignment: Optional qubit,qpu,slot CSV (as returned by partition_qubits)

    Returns:
        Dictionary with:
        - circuit: distributed circuit in text format (Bell-pair instructions tagged "bell",
          the rest of each protocol tagged "telegate")
        - summary: total_qubits, remote_cx, depth, clbits and protocol instruction counts
        - assignment: the assignment used, as CSV

    Examples:
        - build_distributed_circuit(c, "8x1+2", schedule="naive") - one QPU per qubit
    """
    logger.info(
        f"build_distributed_circuit called: network={network}, schedule={schedule}, "
        f"seed={seed}, explicit_assignment={assignment is not None}"
    )

    try:
        source = loads(circuit)
        net = parse_network(network)
        chosen = _assignment_for(source, net, schedule, seed, assignment)
        distributed = distribute(source, chosen, net)
        distributed.validate()
        summary = distributed.summary()
        logger.info(
            f"build_distributed_circuit successful: {summary['total_qubits']} qubits, "
            f"{summary['remote_cx']} remote CX"
        )
        return {
            "circuit": dumps(distributed.circuit),
            "summary": summary,
            "assignment": chosen.to_csv(),
        }
    except Exception as e:
        logger.error(f"build_distributed_circuit failed: {str(e)}", exc_info=True)
        raise


@mcp.tool
def estimate_circuit_fidelity(
    circuit: str,
    network: str | None = None,
    schedule: str = "gp",
    seed: int = 0,
    trajectories: int | None = None,
    p1: float = 0.001,
    p2: float = 0.005,
    p_ro: float = 0.005,
    oracle: bool = False,
) -> dict[str, Any]:
    """Estimate the fidelity of a circuit under depolarizing and readout noise.

    Without a network the circuit runs monolithically; with one it is first
    distributed. Fidelity is the squared overlap <ideal|rho|ideal> with the
    noiseless monolithic output.

    Args:
        circuit: Transpiled circuit in text format
        network: Optional network shorthand such as "2x4+2"
        schedule: "naive" or "gp" when a network is given
        seed: Seed for the trajectory streams and gp restarts
        trajectories: Number of Monte Carlo trajectories (defaults to DQCRCX_TRAJECTORIES)
        p1: 1-qubit depolarizing probability
        p2: 2-qubit depolarizing probability
        p_ro: readout flip probability
        oracle: Use the exact density-matrix evolution instead (at most 10 qubits in total)

    Returns:
        Dictionary with mean, std_err, n_trajectories, convention, total_qubits and remote_cx

    Examples:
        - estimate_circuit_fidelity(c) - monolithic fidelity with default noise
        - estimate_circuit_fidelity(c, "2x4+2", schedule="naive", trajectories=2000)
        - estimate_circuit_fidelity(c, "2x2+1", oracle=True) - exact value
    """
    logger.info(
        f"estimate_circuit_fidelity called: network={network}, schedule={schedule}, seed={seed}, "
        f"trajectories={trajectories}, oracle={oracle}"
    )

    try:
        source = loads(circuit)
        noise = NoiseParams(p1, p2, p_ro)
        ideal = simulate_ideal(source)
        target = source
        remote = 0
        if network:
            net = parse_network(network)
            target = distribute(source, assign(source, net, schedule, seed), net)
            remote = target.remote_cx_count
        total = target.circuit.num_qubits if network else source.num_qubits

        if oracle:
            value = exact_density_fidelity(target, ideal, noise)
            result = {
                "mean": value,
                "std_err": 0.0,
                "n_trajectories": 0,
                "convention": "squared-overlap",
            }
        else:
            n_traj = get_trajectories() if trajectories is None else trajectories
            estimate = estimate_fidelity(target, ideal, noise, n_traj, seed)
            result = {
                "mean": estimate.mean,
                "std_err": estimate.std_err,
                "n_trajectories": estimate.n_trajectories,
                "convention": estimate.convention,
            }
        result.update({"total_qubits": total, "remote_cx": remote})
        logger.info(f"estimate_circuit_fidelity successful: {result['mean']:.4f}")
        return result
    except Exception as e:
        logger.error(f"estimate_circuit_fidelity failed: {str(e)}", exc_info=True)
        raise


@mcp.tool
def list_table1_configurations() -> list[dict[str, Any]]:
    """List the packaged reference experiment grid.

    Returns:
        List of configurations, each with id, circuit (family, num_qubits and pinned parameters),
        network (shorthand), qpus, comp_qubits, comm_qubits and total_qubits.

    Examples:
        - list_table1_configurations() - 19 rows, ids "1" to "19"
    """
    logger.info("list_table1_configurations called")

    try:
        rows = []
        for cfg in load_config():
            first = cfg.network.qpus[0]
            rows.append(
                {
                    "id": cfg.id,
                    "circuit": cfg.circuit.to_dict(),
                    "network": cfg.network.label(),
                    "qpus": cfg.network.num_qpus,
                    "comp_qubits": first.comp_qubits,
                    "comm_qubits": first.comm_qubits,
                    "total_qubits": cfg.total_qubits,
                }
            )
        logger.info(f"list_table1_configurations successful: {len(rows)} configurations")
        return rows
    except Exception as e:
        logger.error(f"list_table1_configurations failed: {str(e)}", exc_info=True)
        raise
