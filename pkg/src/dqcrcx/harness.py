"""
Experiment grid runner.

A configuration is JSON with three top-level keys:

    defaults     seeds, n_traj, noise {p1, p2, p_ro}, schedules, width_cap
    circuits     optional name -> circuit fields map
    experiments  list of {id, circuit, network, total_qubits, ...}

An experiment's `circuit` is either a name from `circuits` or an inline
object; `network` is the {"qpus", "comp_qubits", "comm_qubits"} shorthand,
a list of per-QPU objects, or a string such as "2x4+2". Any defaults key may
be overridden per experiment. The reference grid ships as package data.
"""

import csv
import io
import json
import logging
import statistics
import time
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Optional

from .distributor import distribute
from .library import CircuitSpec, build_circuit
from .scheduler import NetworkConfig, assign, cut_weight, interaction_graph
from .simulator import NoiseParams, estimate_fidelity, simulate_ideal
from .transpiler import transpile

logger = logging.getLogger(__name__)

SCHEDULES = ("naive", "gp")
MONOLITHIC = "monolithic"
DEFAULT_SEEDS = (0, 1, 2, 3, 4)

CSV_HEADER = [
    "config_id",
    "schedule",
    "seed",
    "fidelity",
    "std_err",
    "remote_cx",
    "depth",
    "total_qubits",
    "wall_time_s",
]

PROFILES: dict[str, dict[str, Any]] = {
    "full": {},
    "ci": {"n_traj": 2000, "width_cap": 16, "wall_time": False},
}


@dataclass(frozen=True)
class ExperimentConfig:
    id: str
    circuit: CircuitSpec
    network: NetworkConfig
    total_qubits: int
    schedules: tuple[str, ...] = SCHEDULES
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    n_traj: int = 20000
    noise: NoiseParams = field(default_factory=NoiseParams)
    width_cap: int = 24

    def __post_init__(self):
        if self.total_qubits != self.network.total_qubits:
            raise ValueError(
                f"experiment {self.id}: declared {self.total_qubits} total qubits, "
                f"network {self.network.label()} has {self.network.total_qubits}"
            )
        unknown = set(self.schedules) - set(SCHEDULES)
        if unknown:
            raise ValueError(f"experiment {self.id}: unknown schedules {sorted(unknown)}")
        if not self.seeds:
            raise ValueError(f"experiment {self.id}: no seeds")


@dataclass(frozen=True)
class ResultRecord:
    config_id: str
    schedule: str
    seed: int
    fidelity: float
    std_err: float
    remote_cx: int
    depth: int
    total_qubits: int
    wall_time_s: float = 0.0

    def to_row(self) -> list[str]:
        return [str(getattr(self, name)) for name in CSV_HEADER]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> "ResultRecord":
        return cls(
            config_id=row["config_id"],
            schedule=row["schedule"],
            seed=int(row["seed"]),
            fidelity=float(row["fidelity"]),
            std_err=float(row["std_err"]),
            remote_cx=int(row["remote_cx"]),
            depth=int(row["depth"]),
            total_qubits=int(row["total_qubits"]),
            wall_time_s=float(row["wall_time_s"]),
        )


@dataclass(frozen=True)
class AggregateRow:
    config_id: str
    schedule: str
    mean: float
    std: float
    n_seeds: int
    remote_cx: float
    depth: float


@dataclass(frozen=True)
class DepthRow:
    config_id: str
    circuit: str
    network: str
    total_qubits: int
    monolithic_depth: int
    naive_depth: int
    gp_depth: int
    naive_remote_cx: int
    gp_remote_cx: int


def _config_key(config_id: str) -> tuple:
    return (0, int(config_id), "") if config_id.isdigit() else (1, 0, config_id)


def _record_key(record: ResultRecord) -> tuple:
    return (_config_key(record.config_id), record.schedule, record.seed)


def _parse_experiment(
    entry: dict[str, Any], defaults: dict[str, Any], circuits: dict[str, Any]
) -> ExperimentConfig:
    merged = {**defaults, **entry}
    circuit = merged["circuit"]
    if isinstance(circuit, str):
        if circuit not in circuits:
            raise ValueError(f"experiment {merged.get('id')}: unknown circuit {circuit!r}")
        circuit = circuits[circuit]
    network = NetworkConfig.from_json(merged["network"])
    noise = merged.get("noise", {})
    return ExperimentConfig(
        id=str(merged["id"]),
        circuit=CircuitSpec.from_dict(circuit),
        network=network,
        total_qubits=int(merged.get("total_qubits", network.total_qubits)),
        schedules=tuple(merged.get("schedules", SCHEDULES)),
        seeds=tuple(int(s) for s in merged.get("seeds", DEFAULT_SEEDS)),
        n_traj=int(merged.get("n_traj", 20000)),
        noise=NoiseParams(**noise) if isinstance(noise, dict) else NoiseParams.parse(noise),
        width_cap=int(merged.get("width_cap", 24)),
    )


def parse_config(data: dict[str, Any]) -> list[ExperimentConfig]:
    defaults = data.get("defaults", {})
    circuits = data.get("circuits", {})
    entries = data["experiments"] if "experiments" in data else [data]
    configs = [_parse_experiment(entry, defaults, circuits) for entry in entries]
    ids = [c.id for c in configs]
    if len(set(ids)) != len(ids):
        raise ValueError("experiment ids must be unique")
    return configs


def load_config(path: Optional[str | Path] = None) -> list[ExperimentConfig]:
    """Read a configuration file, or the packaged reference grid when `path` is None."""
    if path is None:
        text = resources.files(__package__).joinpath("data/table1.json").read_text()
        source = "table1.json (packaged)"
    else:
        text = Path(path).read_text()
        source = str(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"{source} is not valid JSON: {e}") from e
    configs = parse_config(data)
    logger.info(f"Loaded {len(configs)} experiments from {source}")
    return configs


def run_experiment(
    cfg: ExperimentConfig,
    n_traj: Optional[int] = None,
    seeds: Optional[Iterable[int]] = None,
    noise: Optional[NoiseParams] = None,
    threads: Optional[int] = None,
    wall_time: bool = True,
    executor: Optional[str] = None,
) -> list[ResultRecord]:
    """
    Monolithic baseline plus every configured schedule, once per seed.

    The seed drives the GP restarts and the trajectory streams; circuit
    parameters are pinned by the circuit spec.
    """
    n_traj = cfg.n_traj if n_traj is None else n_traj
    seeds = cfg.seeds if seeds is None else tuple(seeds)
    noise = cfg.noise if noise is None else noise
    logger.info(
        f"run_experiment called: {cfg.id} ({cfg.circuit.label} on {cfg.network.label()}), "
        f"T={n_traj}, seeds={list(seeds)}"
    )

    try:
        circuit = transpile(build_circuit(cfg.circuit))
        ideal = simulate_ideal(circuit)
        records = []
        for seed in seeds:
            started = time.perf_counter()
            estimate = estimate_fidelity(
                circuit, ideal, noise, n_traj, seed, threads, executor=executor
            )
            records.append(
                ResultRecord(
                    cfg.id,
                    MONOLITHIC,
                    seed,
                    estimate.mean,
                    estimate.std_err,
                    0,
                    circuit.depth(),
                    circuit.num_qubits,
                    round(time.perf_counter() - started, 3) if wall_time else 0.0,
                )
            )
            for schedule in cfg.schedules:
                started = time.perf_counter()
                assignment = assign(circuit, cfg.network, schedule, seed)
                distributed = distribute(circuit, assignment, cfg.network)
                estimate = estimate_fidelity(
                    distributed, ideal, noise, n_traj, seed, threads, executor=executor
                )
                records.append(
                    ResultRecord(
                        cfg.id,
                        schedule,
                        seed,
                        estimate.mean,
                        estimate.std_err,
                        distributed.remote_cx_count,
                        distributed.circuit.depth(),
                        distributed.layout.total_qubits,
                        round(time.perf_counter() - started, 3) if wall_time else 0.0,
                    )
                )
                logger.info(
                    f"Experiment {cfg.id} {schedule} seed {seed}: "
                    f"F={estimate.mean:.4f} remote_cx={distributed.remote_cx_count}"
                )
    except Exception as e:
        logger.error(f"Experiment {cfg.id} failed: {str(e)}", exc_info=True)
        raise

    return sorted(records, key=_record_key)


def _csv_text(header: list[str], rows: Iterable[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _write(text: str, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _dataclass_csv(cls, rows: Iterable) -> str:
    return _csv_text(
        [f.name for f in fields(cls)],
        ([str(v) for v in asdict(row).values()] for row in rows),
    )


def records_csv(records: Iterable[ResultRecord]) -> str:
    return _csv_text(CSV_HEADER, (r.to_row() for r in sorted(records, key=_record_key)))


def write_csv(records: Iterable[ResultRecord], path: str | Path) -> None:
    _write(records_csv(records), path)


def read_csv(path: str | Path) -> list[ResultRecord]:
    with Path(path).open(newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [ResultRecord.from_row(row) for row in reader]


def aggregate(records: Iterable[ResultRecord]) -> list[AggregateRow]:
    """Mean and sample std of seed-level fidelities per (config, schedule)."""
    groups: dict[tuple[str, str], list[ResultRecord]] = {}
    for record in sorted(records, key=_record_key):
        groups.setdefault((record.config_id, record.schedule), []).append(record)

    rows = []
    for (config_id, schedule), group in groups.items():
        values = [r.fidelity for r in group]
        rows.append(
            AggregateRow(
                config_id,
                schedule,
                statistics.fmean(values),
                statistics.stdev(values) if len(values) > 1 else 0.0,
                len(values),
                statistics.fmean(r.remote_cx for r in group),
                statistics.fmean(r.depth for r in group),
            )
        )
    return rows


def write_aggregate(rows: Iterable[AggregateRow], path: str | Path) -> None:
    _write(_dataclass_csv(AggregateRow, rows), path)


def depth_table(configs: Iterable[ExperimentConfig]) -> list[DepthRow]:
    """Depth and remote CX per schedule, GP evaluated with each config's first seed."""
    rows = []
    for cfg in sorted(configs, key=lambda c: _config_key(c.id)):
        circuit = transpile(build_circuit(cfg.circuit))
        seed = cfg.seeds[0]
        result = {}
        for schedule in SCHEDULES:
            distributed = distribute(circuit, assign(circuit, cfg.network, schedule, seed), cfg.network)
            result[schedule] = distributed
        graph = interaction_graph(circuit)
        assert result["gp"].remote_cx_count == cut_weight(graph, result["gp"].assignment)
        rows.append(
            DepthRow(
                cfg.id,
                cfg.circuit.label,
                cfg.network.label(),
                cfg.network.total_qubits,
                circuit.depth(),
                result["naive"].circuit.depth(),
                result["gp"].circuit.depth(),
                result["naive"].remote_cx_count,
                result["gp"].remote_cx_count,
            )
        )
    return rows


def depth_csv(rows: Iterable[DepthRow]) -> str:
    return _dataclass_csv(DepthRow, rows)


def write_depth_csv(rows: Iterable[DepthRow], path: str | Path) -> None:
    _write(depth_csv(rows), path)


@dataclass
class SuiteSummary:
    ran: list[str]
    skipped: list[str]
    records: int
    results_path: Path
    aggregate_path: Path
    depth_path: Path

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        for key in ("results_path", "aggregate_path", "depth_path"):
            data[key] = str(data[key])
        return data


def suite_table1(
    out_dir: str | Path,
    configs: Optional[list[ExperimentConfig]] = None,
    seeds: Optional[Iterable[int]] = None,
    n_traj: Optional[int] = None,
    width_cap: Optional[int] = None,
    profile: str = "full",
    threads: Optional[int] = None,
    executor: Optional[str] = None,
) -> SuiteSummary:
    """
    Run every configuration that fits the width cap and write results.csv,
    aggregate.csv and depth.csv into `out_dir`.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}, expected one of {sorted(PROFILES)}")
    settings = PROFILES[profile]
    configs = load_config() if configs is None else configs
    n_traj = n_traj if n_traj is not None else settings.get("n_traj")
    width_cap = width_cap if width_cap is not None else settings.get("width_cap")
    wall_time = settings.get("wall_time", True)
    seeds = None if seeds is None else tuple(seeds)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"suite_table1 called: {len(configs)} experiments, profile={profile}, out={out_dir}")

    ran, skipped, records = [], [], []
    for cfg in configs:
        cap = cfg.width_cap if width_cap is None else width_cap
        if cfg.network.total_qubits > cap:
            logger.info(
                f"Skipping experiment {cfg.id}: {cfg.network.total_qubits} qubits exceed width cap {cap}"
            )
            skipped.append(cfg.id)
            continue
        records += run_experiment(cfg, n_traj, seeds, None, threads, wall_time, executor)
        ran.append(cfg.id)

    summary = SuiteSummary(
        ran,
        skipped,
        len(records),
        out_dir / "results.csv",
        out_dir / "aggregate.csv",
        out_dir / "depth.csv",
    )
    write_csv(records, summary.results_path)
    write_aggregate(aggregate(records), summary.aggregate_path)
    ran_configs = [c for c in configs if c.id in set(ran)]
    if seeds is not None:
        ran_configs = [replace(c, seeds=seeds) for c in ran_configs]
    write_depth_csv(depth_table(ran_configs), summary.depth_path)
    logger.info(f"suite_table1 successful: ran {len(ran)}, skipped {len(skipped)}")
    return summary
