"""
Qubit-to-QPU assignment.

Two schedules are provided: the naive fill-up schedule and a graph
partitioning (GP) schedule that minimizes the total weight of interaction
edges cut between QPUs. GP runs recursive bisection seeded by greedy region
growth and refined with Fiduccia-Mattheyses passes; the naive assignment is
always part of the candidate pool, so GP never cuts more than naive.
"""

import logging
import re
from dataclasses import dataclass
from typing import Any, Iterable, Optional

import networkx as nx
import numpy as np

from .circuit import Circuit, GateKind

logger = logging.getLogger(__name__)

GP_RESTARTS = 8


class CapacityError(ValueError):
    """Not enough computational slots, or a QPU holds more qubits than it has slots."""


@dataclass(frozen=True)
class QPUSpec:
    comp_qubits: int
    comm_qubits: int

    def __post_init__(self):
        if self.comp_qubits < 0 or self.comm_qubits < 0:
            raise ValueError(f"qubit counts must be non-negative: {self}")

    @property
    def total(self) -> int:
        return self.comp_qubits + self.comm_qubits


@dataclass(frozen=True)
class NetworkConfig:
    qpus: tuple[QPUSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "qpus", tuple(self.qpus))
        if not self.qpus:
            raise ValueError("a network needs at least one QPU")

    @classmethod
    def uniform(cls, num_qpus: int, comp_qubits: int, comm_qubits: int) -> "NetworkConfig":
        return cls(tuple(QPUSpec(comp_qubits, comm_qubits) for _ in range(num_qpus)))

    @classmethod
    def from_json(cls, data: Any) -> "NetworkConfig":
        """Accepts the {"qpus", "comp_qubits", "comm_qubits"} shorthand or a list of QPU dicts."""
        if isinstance(data, str):
            return parse_network(data)
        if isinstance(data, dict):
            return cls.uniform(int(data["qpus"]), int(data["comp_qubits"]), int(data["comm_qubits"]))
        if isinstance(data, list):
            return cls(
                tuple(QPUSpec(int(q["comp_qubits"]), int(q["comm_qubits"])) for q in data)
            )
        raise ValueError(f"unsupported network description: {data!r}")

    @property
    def num_qpus(self) -> int:
        return len(self.qpus)

    @property
    def total_comp(self) -> int:
        return sum(q.comp_qubits for q in self.qpus)

    @property
    def total_comm(self) -> int:
        return sum(q.comm_qubits for q in self.qpus)

    @property
    def total_qubits(self) -> int:
        return self.total_comp + self.total_comm

    def label(self) -> str:
        first = self.qpus[0]
        if all(q == first for q in self.qpus):
            return f"{self.num_qpus}x{first.comp_qubits}+{first.comm_qubits}"
        return ",".join(f"{q.comp_qubits}+{q.comm_qubits}" for q in self.qpus)


_UNIFORM = re.compile(r"^(\d+)x(\d+)\+(\d+)$")
_SINGLE = re.compile(r"^(\d+)\+(\d+)$")


def parse_network(text: str) -> NetworkConfig:
    """
    Parse a network shorthand.

    "2x4+2" is two QPUs with 4 computational and 2 communication qubits each;
    "4+2,2+1" lists QPUs one by one.
    """
    text = text.replace(" ", "")
    match = _UNIFORM.match(text)
    if match:
        k, comp, comm = (int(g) for g in match.groups())
        return NetworkConfig.uniform(k, comp, comm)
    qpus = []
    for part in text.split(","):
        single = _SINGLE.match(part)
        if not single:
            raise ValueError(f"bad network spec {text!r}; expected e.g. '2x4+2' or '4+2,4+2'")
        qpus.append(QPUSpec(int(single.group(1)), int(single.group(2))))
    return NetworkConfig(tuple(qpus))


@dataclass(frozen=True)
class Assignment:
    """placement[q] = (qpu, local computational slot) of logical qubit q."""

    placement: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "placement", tuple((int(p), int(s)) for p, s in self.placement))
        if len(set(self.placement)) != len(self.placement):
            raise ValueError("assignment maps two logical qubits to the same slot")

    @property
    def num_logical(self) -> int:
        return len(self.placement)

    def qpu_of(self, q: int) -> int:
        return self.placement[q][0]

    def slot_of(self, q: int) -> int:
        return self.placement[q][1]

    def qubits_on(self, qpu: int) -> list[int]:
        return [q for q, (p, _) in enumerate(self.placement) if p == qpu]

    def validate(self, net: NetworkConfig) -> None:
        for q, (qpu, slot) in enumerate(self.placement):
            if not 0 <= qpu < net.num_qpus:
                raise IndexError(f"qubit {q} assigned to QPU {qpu}, network has {net.num_qpus}")
            if not 0 <= slot < net.qpus[qpu].comp_qubits:
                raise CapacityError(
                    f"qubit {q} uses slot {slot} on QPU {qpu}, "
                    f"which has {net.qpus[qpu].comp_qubits} computational qubits"
                )

    def to_csv(self) -> str:
        lines = ["qubit,qpu,slot"]
        lines += [f"{q},{p},{s}" for q, (p, s) in enumerate(self.placement)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "Assignment":
        rows: dict[int, tuple[int, int]] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("qubit"):
                continue
            q, p, s = (int(v) for v in line.split(","))
            if q in rows:
                raise ValueError(f"qubit {q} listed twice")
            rows[q] = (p, s)
        if sorted(rows) != list(range(len(rows))):
            raise ValueError("assignment rows must cover qubits 0..n-1")
        return cls(tuple(rows[q] for q in range(len(rows))))

    @classmethod
    def from_parts(cls, parts: dict[int, Iterable[int]], num_logical: int) -> "Assignment":
        placement: list[Optional[tuple[int, int]]] = [None] * num_logical
        for qpu, members in parts.items():
            for slot, q in enumerate(sorted(members)):
                placement[q] = (qpu, slot)
        if any(p is None for p in placement):
            raise ValueError("partition leaves some qubits unassigned")
        return cls(tuple(placement))


def interaction_graph(circuit: Circuit) -> nx.Graph:
    """Undirected graph on logical qubits; edge weight counts CX gates on the pair."""
    graph = nx.Graph()
    graph.add_nodes_from(range(circuit.num_qubits))
    for inst in circuit.instructions:
        if len(inst.qubits) < 2:
            continue
        if inst.kind is not GateKind.CX:
            raise ValueError(f"interaction graphs need transpiled circuits, found {inst.kind.name}")
        a, b = inst.qubits
        if graph.has_edge(a, b):
            graph[a][b]["weight"] += 1
        else:
            graph.add_edge(a, b, weight=1)
    return graph


def _check_capacity(num_logical: int, net: NetworkConfig) -> None:
    if num_logical > net.total_comp:
        raise CapacityError(
            f"{num_logical} logical qubits do not fit in {net.total_comp} computational slots"
        )


def _fill_sizes(num_logical: int, net: NetworkConfig) -> list[int]:
    sizes, remaining = [], num_logical
    for qpu in net.qpus:
        take = min(qpu.comp_qubits, remaining)
        sizes.append(take)
        remaining -= take
    return sizes


def naive_assignment(num_logical: int, net: NetworkConfig) -> Assignment:
    _check_capacity(num_logical, net)
    placement = []
    for qpu, size in enumerate(_fill_sizes(num_logical, net)):
        placement += [(qpu, slot) for slot in range(size)]
    return Assignment(tuple(placement))


def cut_weight(graph: nx.Graph, assignment: Assignment) -> int:
    """Total weight of edges whose endpoints sit on different QPUs."""
    if graph.number_of_nodes() > assignment.num_logical:
        raise ValueError(
            f"assignment covers {assignment.num_logical} qubits, graph has {graph.number_of_nodes()}"
        )
    return sum(
        w
        for a, b, w in graph.edges(data="weight", default=1)
        if assignment.qpu_of(a) != assignment.qpu_of(b)
    )


def _gain(graph: nx.Graph, node: int, side: dict[int, int]) -> int:
    """Cut reduction when `node` switches side."""
    gain = 0
    for nbr, data in graph[node].items():
        w = data.get("weight", 1)
        gain += w if side[nbr] != side[node] else -w
    return gain


def _grow_region(graph: nx.Graph, nodes: list[int], target: int, rng: np.random.Generator) -> set[int]:
    start = nodes[int(rng.integers(len(nodes)))]
    region = {start}
    pull = {v: 0 for v in nodes if v != start}
    for nbr, data in graph[start].items():
        if nbr in pull:
            pull[nbr] += data.get("weight", 1)
    while len(region) < target:
        best = min(pull, key=lambda v: (-pull[v], v))
        region.add(best)
        del pull[best]
        for nbr, data in graph[best].items():
            if nbr in pull:
                pull[nbr] += data.get("weight", 1)
    return region


def _fm_refine(graph: nx.Graph, nodes: list[int], side: dict[int, int], target: int) -> None:
    """
    Fiduccia-Mattheyses passes on a two-way split, in place.

    Side 0 must hold exactly `target` nodes. Within a pass each node moves at
    most once and balance may drift by one; only prefixes ending at exact
    balance are kept.
    """
    size = [0, 0]
    for v in nodes:
        size[side[v]] += 1

    cut = sum(
        d.get("weight", 1) for a, b, d in graph.edges(data=True) if side[a] != side[b]
    )
    while True:
        locked: set[int] = set()
        moves: list[int] = []
        best_cut, best_prefix = cut, 0
        for _ in range(len(nodes)):
            surplus = size[0] - target
            if surplus > 0:
                allowed = {0}
            elif surplus < 0:
                allowed = {1}
            else:
                allowed = {0, 1}
            candidates = [v for v in nodes if v not in locked and side[v] in allowed]
            if not candidates:
                break
            gains = {v: _gain(graph, v, side) for v in candidates}
            mover = min(candidates, key=lambda v: (-gains[v], v))
            cut -= gains[mover]
            size[side[mover]] -= 1
            side[mover] ^= 1
            size[side[mover]] += 1
            locked.add(mover)
            moves.append(mover)
            if size[0] == target and cut < best_cut:
                best_cut, best_prefix = cut, len(moves)

        for mover in reversed(moves[best_prefix:]):
            size[side[mover]] -= 1
            side[mover] ^= 1
            size[side[mover]] += 1
        cut = best_cut
        if best_prefix == 0:
            return


def _bisect(graph: nx.Graph, nodes: list[int], target: int, rng: np.random.Generator) -> tuple[list[int], list[int]]:
    if target <= 0:
        return [], list(nodes)
    if target >= len(nodes):
        return list(nodes), []
    sub = graph.subgraph(nodes)
    region = _grow_region(sub, nodes, target, rng)
    side = {v: 0 if v in region else 1 for v in nodes}
    _fm_refine(sub, nodes, side, target)
    left = [v for v in nodes if side[v] == 0]
    right = [v for v in nodes if side[v] == 1]
    return left, right


def _recursive_bisection(
    graph: nx.Graph,
    nodes: list[int],
    qpus: list[int],
    sizes: list[int],
    rng: np.random.Generator,
) -> dict[int, list[int]]:
    if len(qpus) == 1:
        return {qpus[0]: nodes}
    half = len(qpus) // 2
    left_qpus, right_qpus = qpus[:half], qpus[half:]
    left, right = _bisect(graph, nodes, sum(sizes[q] for q in left_qpus), rng)
    parts = _recursive_bisection(graph, left, left_qpus, sizes, rng)
    parts.update(_recursive_bisection(graph, right, right_qpus, sizes, rng))
    return parts


def gp_assignment(
    graph: nx.Graph, net: NetworkConfig, seed: int = 0, restarts: int = GP_RESTARTS
) -> Assignment:
    """
    Capacity-exact min-cut assignment.

    Part sizes match the naive fill-up sizes, so every QPU is full except
    possibly the trailing ones. Restart r draws from default_rng([seed, r]);
    the lowest (cut, candidate index) wins, with naive at index 0.
    """
    n = graph.number_of_nodes()
    _check_capacity(n, net)
    logger.debug(f"gp_assignment called: {n} qubits on {net.label()}, seed={seed}")

    candidates = [naive_assignment(n, net)]
    sizes = _fill_sizes(n, net)
    nodes = sorted(graph.nodes)
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        parts = _recursive_bisection(graph, nodes, list(range(net.num_qpus)), sizes, rng)
        candidates.append(Assignment.from_parts(parts, n))

    cuts = [cut_weight(graph, a) for a in candidates]
    best = min(range(len(candidates)), key=lambda i: (cuts[i], i))
    chosen = candidates[best]
    for qpu, size in enumerate(sizes):
        assert len(chosen.qubits_on(qpu)) == size
    logger.debug(f"gp_assignment successful: cut {cuts[best]} (naive {cuts[0]})")
    return chosen


def assign(circuit: Circuit, net: NetworkConfig, schedule: str, seed: int = 0) -> Assignment:
    """Dispatch on schedule name ('naive' or 'gp')."""
    if schedule == "naive":
        return naive_assignment(circuit.num_qubits, net)
    if schedule == "gp":
        return gp_assignment(interaction_graph(circuit), net, seed)
    raise ValueError(f"unknown schedule {schedule!r}, expected 'naive' or 'gp'")
