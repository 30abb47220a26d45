"""Monte Carlo benchmark runner

One run draws a graph, places the true sources, spreads the infection,
extracts the infection graph and scores every configured algorithm on it.
All randomness of run ``r`` comes from ``derive_stream(seed, r, ...)`` so runs
can execute in any order or in parallel and still produce the same rows.
"""
import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from framework.error_code.errors import DetailedError, ErrorCode, argument_error
from framework.interfaces.core import LogProvider
from infrastructure.logging.structured import StructuredLog
from services.estimation.estimators import geometric_tse, nsse
from services.evaluation.metrics import MetricConfig, error_distance, match_sources, region_covering
from services.graph.generators import GenParams, generate
from services.graph.graph_core import Graph, diameter
from services.partition.msep import MsepConfig, msep, msep_bfs
from services.partition.regions import Partition
from services.scheduler.run_scheduler import RunScheduler
from services.spread.seeding import derive_stream
from services.spread.simulator import PlacementParams, pick_sources, simulate_si

ALGORITHMS = ("msep", "msep-bfs", "nsse", "nsse-guess", "geo-tse")
PARTITIONING = ("msep", "msep-bfs")
CSV_COLUMNS = (
    "run", "family", "k_true", "k_est", "algo",
    "delta_eta0", "delta_etadiam", "min_cover", "diam_gn", "ms_elapsed",
)

# sub-seed slots of one run's stream
GRAPH_SEED, PLACEMENT_SEED, SPREAD_SEED, MSEP_SEED, GUESS_SEED = range(5)


@dataclass(frozen=True)
class ExperimentConfig:
    graph: GenParams
    k_true: int = 2
    stop_n: int = 500
    runs: int = 100
    k_max: int = 3
    tau: int = 2
    delta: float = 1.0
    seed: int = 0
    algorithms: Tuple[str, ...] = ()
    max_iter: int = 20
    eta_converge: int = 0
    max_attempts: int = 1000
    record_timing: bool = False

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise argument_error("runs must be at least 1", runs=self.runs)
        if not 1 <= self.k_true:
            raise argument_error("k_true must be at least 1", k_true=self.k_true)
        if self.stop_n < self.k_true:
            raise argument_error("stop_n must be at least k_true", stop_n=self.stop_n, k_true=self.k_true)
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise argument_error(f"unknown algorithms {unknown}", allowed=list(ALGORITHMS))

    @property
    def family(self) -> str:
        return self.graph.family

    @property
    def selected_algorithms(self) -> Tuple[str, ...]:
        if self.algorithms:
            return self.algorithms
        first = "msep-bfs" if self.family == "small-world" else "msep"
        return (first, "nsse", "nsse-guess")

    @classmethod
    def from_mapping(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise DetailedError(ErrorCode.PARSE_ERROR, "experiment config must be a mapping")
        data = dict(data)
        graph_data = data.pop("graph", {})
        if "family" in data:
            graph_data = dict(graph_data, family=data.pop("family"))
        allowed = {f.name for f in fields(cls)} - {"graph"}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise DetailedError(
                ErrorCode.PARSE_ERROR,
                f"unknown experiment config keys: {', '.join(unknown)}",
                context={'keys': unknown}
            )
        if "algorithms" in data:
            data["algorithms"] = tuple(data["algorithms"])
        try:
            graph = GenParams(**graph_data)
        except TypeError as e:
            raise DetailedError(ErrorCode.PARSE_ERROR, f"bad graph parameters: {e}", cause=e)
        return cls(graph=graph, **data)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["algorithms"] = list(self.selected_algorithms)
        return data


def load_experiment_config(text: str) -> ExperimentConfig:
    """Parse a YAML (or JSON) experiment description"""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise DetailedError(ErrorCode.PARSE_ERROR, f"invalid experiment config: {e}", cause=e)
    return ExperimentConfig.from_mapping(data or {})


@dataclass
class RunRow:
    run: int
    family: str
    k_true: int
    algo: str
    k_est: Optional[int] = None
    delta_eta0: Optional[float] = None
    delta_etadiam: Optional[float] = None
    min_cover: Optional[float] = None
    diam_gn: Optional[int] = None
    ms_elapsed: Optional[float] = None
    error: Optional[Dict[str, Any]] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> Dict[str, Any]:
        record = {column: getattr(self, column) for column in CSV_COLUMNS}
        if self.error is not None:
            record["error"] = self.error
        return record


def _mean(values: Sequence[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def aggregate(rows: Sequence[RunRow]) -> Dict[str, Any]:
    """Per-algorithm summary; always recomputable from the rows"""
    summary: Dict[str, Any] = {}
    for algo in sorted({row.algo for row in rows}):
        mine = [row for row in rows if row.algo == algo]
        ok = [row for row in mine if row.ok]
        histogram: Dict[str, int] = {}
        for row in ok:
            bucket = str(int(math.floor(row.delta_eta0)))
            histogram[bucket] = histogram.get(bucket, 0) + 1
        covers = [row.min_cover for row in ok if row.min_cover is not None]
        summary[algo] = {
            "runs": len(mine),
            "failed": len(mine) - len(ok),
            "k_accuracy": _mean([1.0 if row.k_est == row.k_true else 0.0 for row in ok]),
            "mean_delta_eta0": _mean([row.delta_eta0 for row in ok]),
            "mean_delta_etadiam": _mean([row.delta_etadiam for row in ok]),
            "mean_min_cover": _mean(covers),
            "mean_diam_gn": _mean([row.diam_gn for row in ok]),
            "delta_histogram": dict(sorted(histogram.items(), key=lambda kv: int(kv[0]))),
        }
    return summary


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: List[RunRow] = field(default_factory=list)

    @property
    def aggregate(self) -> Dict[str, Any]:
        return aggregate(self.rows)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow([_csv_cell(getattr(row, column)) for column in CSV_COLUMNS])
        return buffer.getvalue()

    def to_json(self) -> str:
        payload = {
            "records": [row.to_dict() for row in self.rows],
            "aggregate": self.aggregate,
        }
        return json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _local_partition(partition: Partition, to_local: Dict[int, int]) -> Partition:
    return Partition(
        region_of={to_local[v]: r for v, r in partition.region_of.items()},
        centers=tuple(to_local[c] for c in partition.centers),
    )


def _error_record(error: Exception) -> Dict[str, Any]:
    return DetailedError.wrap(error).to_dict()


@dataclass(frozen=True)
class _RunContext:
    """The infection graph of one run plus its ground truth, in local ids"""
    g_n: Graph
    truth: Tuple[int, ...]
    truth_partition: Partition
    diam: int
    seeds: Tuple[int, ...]


def _estimate(cfg: ExperimentConfig, algo: str, ctx: _RunContext, log: LogProvider) -> Tuple[List[int], Optional[Partition]]:
    g_n = ctx.g_n
    if algo in PARTITIONING:
        msep_cfg = MsepConfig(
            k_max=cfg.k_max, tau=cfg.tau, max_iter=cfg.max_iter,
            eta_converge=cfg.eta_converge, seed=ctx.seeds[MSEP_SEED], max_attempts=cfg.max_attempts,
        )
        result = (msep if algo == "msep" else msep_bfs)(g_n, msep_cfg, log)
        return list(result.sources), result.partition
    if algo == "geo-tse":
        return list(geometric_tse(g_n, delta=cfg.delta).nodes), None
    if algo == "nsse":
        return list(nsse(g_n, min(cfg.k_true, g_n.node_count)).nodes), None
    guess = int(np.random.default_rng(ctx.seeds[GUESS_SEED]).integers(1, cfg.k_max + 1))
    return list(nsse(g_n, min(guess, g_n.node_count)).nodes), None


def _score(cfg: ExperimentConfig, index: int, algo: str, ctx: _RunContext, log: LogProvider) -> RunRow:
    row = RunRow(run=index, family=cfg.family, k_true=cfg.k_true, algo=algo, diam_gn=ctx.diam)
    started = time.perf_counter()
    try:
        estimate, partition = _estimate(cfg, algo, ctx, log)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        row.k_est = len(estimate)
        row.delta_eta0 = error_distance(ctx.g_n, estimate, ctx.truth, MetricConfig(0.0))
        row.delta_etadiam = error_distance(ctx.g_n, estimate, ctx.truth, MetricConfig(float(ctx.diam)))
        if partition is not None:
            matching = match_sources(ctx.g_n, estimate, ctx.truth)
            row.min_cover = region_covering(ctx.truth_partition, partition, matching)
    except Exception as e:
        log.error("algorithm_failed", error=e, run=index, algo=algo)
        return replace(row, k_est=None, delta_eta0=None, delta_etadiam=None, min_cover=None,
                       error=_error_record(e))
    if cfg.record_timing:
        row.ms_elapsed = elapsed_ms
    return row


def execute_run(cfg: ExperimentConfig, index: int, log: Optional[LogProvider] = None) -> List[RunRow]:
    """All algorithm rows for run ``index``

    A failure while drawing the graph or spreading fails every row of the run;
    an algorithm that raises fails only its own row.
    """
    log = log or StructuredLog()
    algorithms = cfg.selected_algorithms
    seeds = derive_stream(cfg.seed, index, 5)
    try:
        g = generate(replace(cfg.graph, seed=seeds[GRAPH_SEED]))
        placement = PlacementParams(
            k=cfg.k_true, tau=cfg.tau, max_attempts=cfg.max_attempts, seed=seeds[PLACEMENT_SEED]
        )
        sources = pick_sources(g, placement)
        outcome = simulate_si(g, sources, cfg.stop_n, seeds[SPREAD_SEED])
        infection = outcome.infection_graph(g)
        ctx = _RunContext(
            g_n=infection.graph,
            truth=infection.to_local(outcome.sources),
            truth_partition=_local_partition(outcome.true_partition, infection.global_to_local),
            diam=diameter(infection.graph),
            seeds=tuple(seeds),
        )
    except Exception as e:
        log.error("run_failed", error=e, run=index)
        record = _error_record(e)
        return [
            RunRow(run=index, family=cfg.family, k_true=cfg.k_true, algo=algo, error=record)
            for algo in algorithms
        ]
    return [_score(cfg, index, algo, ctx, log) for algo in algorithms]


def run_experiment(cfg: ExperimentConfig, jobs: int = 1, log: Optional[LogProvider] = None) -> ExperimentReport:
    scheduler = RunScheduler(max_concurrent=jobs)
    results = scheduler.map_runs(execute_run, cfg, range(cfg.runs), log=log)
    report = ExperimentReport(config=cfg)
    for rows in results:
        report.rows.extend(rows)
    return report
