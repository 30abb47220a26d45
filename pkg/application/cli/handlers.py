import json
import sys
from dataclasses import replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from injector import inject

from application.cli.oracles import DEFAULT_TRIALS, run_check
from framework.error_code.errors import DetailedError, ErrorCode, argument_error
from framework.interfaces.core import CoreService
from services.estimation.estimators import geometric_tse, nsse, sse_bfs, sse_tree, tse
from services.evaluation.harness import load_experiment_config, run_experiment
from services.graph.generators import GenParams, generate
from services.graph.graph_core import Graph, Subgraph, dump_edge_list, load_edge_list_remapped
from services.partition.msep import MsepConfig, msep, msep_bfs
from services.spread.seeding import derive_seed
from services.spread.simulator import PlacementParams, pick_sources, simulate_si


def read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as e:
        raise DetailedError(ErrorCode.FILE_SYSTEM_ERROR, f"cannot read {path}: {e.strerror}", cause=e)


def parse_infected(text: str) -> List[int]:
    """One node id per line; blank lines and '#' comments are skipped"""
    ids = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not line.isdigit():
            raise DetailedError(
                ErrorCode.PARSE_ERROR,
                f"malformed node id at line {line_no}: {raw!r}",
                context={'line': line_no}
            )
        ids.append(int(line))
    return ids


def to_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


class LoadedGraph:
    """A graph read from an edge list, with its dense <-> file id tables"""

    def __init__(self, graph: Graph, file_ids: Sequence[int]) -> None:
        self.graph = graph
        self.file_ids = tuple(file_ids)
        self.dense = {x: i for i, x in enumerate(self.file_ids)}

    def to_dense(self, ids: Sequence[int], what: str = "node") -> List[int]:
        missing = [x for x in ids if x not in self.dense]
        if missing:
            raise argument_error(f"{what} ids not in the graph: {missing[:10]}", missing=missing[:10])
        return [self.dense[x] for x in ids]

    def to_file(self, ids: Sequence[int]) -> List[int]:
        return [self.file_ids[v] for v in ids]


class CliHandlers:
    """Subcommand implementations; each returns the process exit code"""

    @inject
    def __init__(self, core_service: CoreService) -> None:
        self.core_service = core_service

    def dispatch(self, args: Any) -> int:
        handler = getattr(self, args.command)
        return handler(args)

    def _emit(self, text: str, out: Optional[str]) -> None:
        if out is None:
            sys.stdout.write(text)
            return
        try:
            with open(out, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
        except OSError as e:
            raise DetailedError(ErrorCode.FILE_SYSTEM_ERROR, f"cannot write {out}: {e.strerror}", cause=e)
        self.core_service.debug("output_written", path=out, size=len(text))

    def _load(self, path: str) -> LoadedGraph:
        graph, file_ids = load_edge_list_remapped(read_text(path))
        return LoadedGraph(graph, file_ids)

    def _setting(self, value: Optional[Any], key: str, default: Any) -> Any:
        if value is not None:
            return value
        configured = self.core_service.get_config(key)
        return default if configured is None else configured

    def gen(self, args: Any) -> int:
        params = GenParams(
            family=args.family, degree=args.degree, depth=args.depth,
            d_min=args.d_min, d_max=args.d_max, max_degree=args.max_degree,
            alpha=args.alpha, b=args.b, c=args.c, n=args.n, k=args.k, p=args.p, seed=args.seed,
        )
        g = generate(params)
        self.core_service.info("graph_generated", family=args.family, nodes=g.node_count, edges=g.edge_count)
        self._emit(dump_edge_list(g), args.out)
        return 0

    def simulate(self, args: Any) -> int:
        loaded = self._load(args.graph)
        g = loaded.graph
        if args.sources:
            sources = tuple(loaded.to_dense(args.sources, "source"))
        else:
            placement = PlacementParams(
                k=args.k,
                tau=self._setting(args.tau, 'DEFAULT_TAU', 2),
                max_attempts=self._setting(None, 'PLACEMENT_MAX_ATTEMPTS', 1000),
                seed=derive_seed(args.seed, 0),
            )
            sources = pick_sources(g, placement)
        outcome = simulate_si(g, sources, args.stop_n, derive_seed(args.seed, 1), stop_time=args.stop_time)
        file_id = loaded.file_ids
        payload = {
            "sources": loaded.to_file(outcome.sources),
            "order": loaded.to_file(outcome.infected_order),
            "parent": {str(file_id[v]): file_id[p] for v, p in sorted(outcome.parent.items())},
            "regions": [loaded.to_file(r) for r in outcome.true_partition.regions()],
            "elapsed": outcome.elapsed,
        }
        self._emit(to_json(payload), args.out)
        return 0

    def _infection_graph(self, loaded: LoadedGraph, infected_path: Optional[str]) -> Tuple[Graph, Subgraph]:
        if infected_path is None:
            nodes = list(loaded.graph.nodes())
        else:
            nodes = loaded.to_dense(parse_infected(read_text(infected_path)), "infected")
        sub = loaded.graph.induced_subgraph(nodes)
        return sub.graph, sub

    def estimate(self, args: Any) -> int:
        loaded = self._load(args.graph)
        g_n, sub = self._infection_graph(loaded, args.infected)

        def to_file(local: Sequence[int]) -> List[int]:
            return loaded.to_file(sub.to_global(local))

        k_max = self._setting(args.k_max, 'DEFAULT_K_MAX', 3)
        algo = args.algo
        if algo in ("msep", "msep-bfs"):
            cfg = MsepConfig(
                k_max=k_max,
                tau=self._setting(args.tau, 'DEFAULT_TAU', 2),
                max_iter=self._setting(None, 'IP_MAX_ITER', 20),
                eta_converge=self._setting(None, 'IP_ETA_CONVERGE', 0),
                seed=args.seed,
                max_attempts=self._setting(None, 'PLACEMENT_MAX_ATTEMPTS', 1000),
            )
            result = (msep if algo == "msep" else msep_bfs)(g_n, cfg, self.core_service)
            payload: Dict[str, Any] = result.to_dict()
            payload["sources"] = to_file(result.sources)
            payload["regions"] = [to_file(r) for r in result.partition.regions()]
            payload["merge_log"] = [dict(entry, pair=to_file(entry["pair"])) for entry in result.merge_log]
        else:
            if algo == "sse":
                estimate = sse_tree(g_n)
            elif algo == "sse-bfs":
                estimate = sse_bfs(g_n)
            elif algo == "tse":
                estimate = tse(g_n)
            elif algo == "geo-tse":
                estimate = geometric_tse(g_n, delta=self._setting(args.delta, 'DEFAULT_DELTA', 1.0))
            else:
                estimate = nsse(g_n, args.k if args.k is not None else k_max)
            payload = estimate.to_dict()
            payload["nodes"] = sorted(to_file(estimate.nodes))
        self.core_service.info("estimate_done", algo=algo, nodes=g_n.node_count)
        self._emit(to_json(payload), args.out)
        return 0

    def benchmark(self, args: Any) -> int:
        cfg = load_experiment_config(read_text(args.config))
        overrides: Dict[str, Any] = {'record_timing': args.timing}
        if args.seed is not None:
            overrides['seed'] = args.seed
        if args.runs is not None:
            overrides['runs'] = args.runs
        cfg = replace(cfg, **overrides)
        jobs = self._setting(args.jobs, 'BENCHMARK_JOBS', 1)
        report = run_experiment(cfg, jobs=jobs, log=self.core_service)
        self._emit(report.to_csv() if args.format == "csv" else report.to_json(), args.out)
        return 0

    def oracle(self, args: Any) -> int:
        trials = args.trials if args.trials is not None else DEFAULT_TRIALS[args.check]
        report = run_check(args.check, trials, args.seed)
        print(report.summary())
        for failure in report.failures[:5]:
            print(f"  {failure}")
        if args.out:
            self._emit(to_json(report.to_dict()), args.out)
        return 0 if report.ok else 2
