import json

import pytest

from framework.error_code.errors import DetailedError, ErrorCode
from services.evaluation.harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    aggregate,
    execute_run,
    load_experiment_config,
    run_experiment,
)
from services.graph.generators import GenParams


def small_config(**overrides) -> ExperimentConfig:
    base = dict(
        graph=GenParams(family="random-tree", n=60),
        k_true=2, stop_n=25, runs=3, k_max=3, tau=2, seed=42,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestExperimentConfig:

    def test_default_algorithms_follow_family(self):
        tree = small_config()
        world = small_config(graph=GenParams(family="small-world", n=50, k=4, p=0.1))

        assert tree.selected_algorithms == ("msep", "nsse", "nsse-guess")
        assert world.selected_algorithms == ("msep-bfs", "nsse", "nsse-guess")

    @pytest.mark.parametrize("overrides", [
        dict(runs=0), dict(k_true=0), dict(stop_n=1), dict(algorithms=("magic",)),
    ])
    def test_invalid(self, overrides):
        with pytest.raises(DetailedError) as exc_info:
            small_config(**overrides)

        assert exc_info.value.code == ErrorCode.VALIDATION_ERROR

    def test_load_yaml(self):
        cfg = load_experiment_config(
            "family: random-tree\n"
            "graph:\n"
            "  n: 80\n"
            "k_true: 1\n"
            "stop_n: 30\n"
            "runs: 4\n"
            "algorithms: [msep, geo-tse]\n"
        )

        assert cfg.family == "random-tree"
        assert cfg.graph.n == 80
        assert cfg.algorithms == ("msep", "geo-tse")
        assert cfg.to_dict()["algorithms"] == ["msep", "geo-tse"]

    def test_load_json(self):
        cfg = load_experiment_config(json.dumps({"graph": {"family": "regular-tree", "degree": 3, "depth": 4}}))

        assert cfg.graph.depth == 4

    @pytest.mark.parametrize("text", [
        "graph: {family: random-tree}\nrnus: 3\n",
        "graph: {family: random-tree, size: 3}\n",
        "- a\n- b\n",
        "graph: [unclosed\n",
    ])
    def test_malformed_configs(self, text):
        with pytest.raises(DetailedError) as exc_info:
            load_experiment_config(text)

        assert exc_info.value.code == ErrorCode.PARSE_ERROR


class TestRuns:

    def test_single_source_smoke(self, mock_core_service):
        cfg = small_config(k_true=1, k_max=1, runs=1, stop_n=10)

        report = run_experiment(cfg, log=mock_core_service)

        assert [row.algo for row in report.rows] == ["msep", "nsse", "nsse-guess"]
        for row in report.rows:
            assert row.ok
            assert row.k_est == 1
            assert row.delta_eta0 >= 0
        assert report.rows[0].min_cover is not None

    def test_rows_are_ordered_and_complete(self, mock_core_service):
        report = run_experiment(small_config(), log=mock_core_service)

        assert [row.run for row in report.rows] == [0, 0, 0, 1, 1, 1, 2, 2, 2]
        assert all(row.ok for row in report.rows)
        assert all(row.diam_gn is not None for row in report.rows)

    def test_reports_are_byte_identical(self, mock_core_service):
        cfg = small_config()

        first = run_experiment(cfg, log=mock_core_service)
        second = run_experiment(cfg, log=mock_core_service)

        assert first.to_csv() == second.to_csv()
        assert first.to_json() == second.to_json()

    def test_seed_changes_the_runs(self, mock_core_service):
        first = run_experiment(small_config(seed=1), log=mock_core_service)
        second = run_experiment(small_config(seed=2), log=mock_core_service)

        assert first.to_csv() != second.to_csv()

    def test_run_does_not_depend_on_its_neighbours(self, mock_core_service):
        cfg = small_config(runs=3)

        alone = execute_run(cfg, 2, mock_core_service)
        report = run_experiment(cfg, log=mock_core_service)

        assert [r.to_dict() for r in alone] == [r.to_dict() for r in report.rows[6:]]

    def test_geometric_two_source_algorithm(self, mock_core_service):
        cfg = small_config(algorithms=("geo-tse",), runs=2)

        report = run_experiment(cfg, log=mock_core_service)

        assert all(row.ok and row.k_est == 2 for row in report.rows)
        assert all(row.min_cover is None for row in report.rows)

    def test_failed_runs_become_error_rows(self, mock_core_service):
        cfg = small_config(graph=GenParams(family="random-tree", n=3), k_true=3, stop_n=3, runs=2, max_attempts=10)

        report = run_experiment(cfg, log=mock_core_service)

        assert len(report.rows) == 6
        assert all(not row.ok for row in report.rows)
        assert report.aggregate["msep"]["failed"] == 2
        assert mock_core_service.error.call_count == 2
        assert mock_core_service.error.call_args[0][0] == "run_failed"

    def test_unexpected_exception_is_recorded(self, mocker, mock_core_service):
        mocker.patch("services.evaluation.harness.simulate_si", side_effect=RuntimeError("clock broke"))

        rows = execute_run(small_config(), 0, mock_core_service)

        assert all(row.error["code"] == ErrorCode.UNKNOWN_ERROR for row in rows)
        assert rows[0].to_dict()["error"]["message"] == "unexpected error: clock broke"
        mock_core_service.error.assert_called_once()

    def test_failing_algorithm_keeps_other_rows(self, mocker, mock_core_service):
        mocker.patch(
            "services.evaluation.harness.geometric_tse",
            side_effect=DetailedError(ErrorCode.STRUCTURE_ERROR, "input is not a tree"),
        )
        cfg = small_config(algorithms=("msep", "geo-tse", "nsse"))

        rows = execute_run(cfg, 0, mock_core_service)

        assert [row.ok for row in rows] == [True, False, True]
        assert rows[1].error == {"error": True, "code": 40200, "message": "input is not a tree", "context": {}}
        assert rows[1].k_est is None
        assert rows[0].k_est is not None and rows[2].k_est == 2
        mock_core_service.error.assert_called_once_with("algorithm_failed", error=mocker.ANY, run=0, algo="geo-tse")

    def test_error_records_reach_json(self, mocker, mock_core_service):
        mocker.patch("services.evaluation.harness.nsse", side_effect=RuntimeError("boom"))
        cfg = small_config(algorithms=("msep", "nsse"), runs=1)

        payload = json.loads(run_experiment(cfg, log=mock_core_service).to_json())

        failed = [r for r in payload["records"] if "error" in r]
        assert [r["algo"] for r in failed] == ["nsse"]
        assert failed[0]["error"]["code"] == 99999
        assert payload["aggregate"]["nsse"]["failed"] == 1
        assert payload["aggregate"]["msep"]["failed"] == 0


class TestReport:

    def test_csv_layout(self, mock_core_service):
        report = run_experiment(small_config(runs=1), log=mock_core_service)

        lines = report.to_csv().splitlines()

        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 4
        # timing stays blank unless requested
        assert all(line.endswith(",") for line in lines[1:])

    def test_timing_is_opt_in(self, mock_core_service):
        report = run_experiment(small_config(runs=1, record_timing=True), log=mock_core_service)

        assert all(row.ms_elapsed is not None and row.ms_elapsed >= 0 for row in report.rows)

    def test_aggregate_matches_rows(self, mock_core_service):
        report = run_experiment(small_config(runs=4), log=mock_core_service)
        payload = json.loads(report.to_json())

        for algo, summary in payload["aggregate"].items():
            rows = [r for r in payload["records"] if r["algo"] == algo]
            assert summary["runs"] == len(rows)
            assert summary["mean_delta_eta0"] == pytest.approx(sum(r["delta_eta0"] for r in rows) / len(rows))
            assert summary["k_accuracy"] == pytest.approx(
                sum(1 for r in rows if r["k_est"] == r["k_true"]) / len(rows)
            )
            assert sum(summary["delta_histogram"].values()) == len(rows)
        assert payload["aggregate"] == aggregate(report.rows)
