import json

import pytest

from application.cli.handlers import CliHandlers
from application.cli.oracles import source_chain_instance
from main import run_cli


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


@pytest.fixture
def p4_file(tmp_path):
    # path 10 - 11 - 12 - 13 with non-dense file ids
    return write(tmp_path, "p4.txt", "10 11\n11 12\n12 13\n")


@pytest.fixture
def cycle_file(tmp_path):
    return write(tmp_path, "cycle.txt", "0 1\n1 2\n2 3\n3 0\n")


class TestUsage:

    def test_missing_required_flag(self, p4_file, capsys):
        code = run_cli(["estimate", "--graph", p4_file])

        assert code == 1
        err = capsys.readouterr().err
        assert "--algo" in err
        assert "usage:" in err

    def test_unknown_flag(self, p4_file, capsys):
        assert run_cli(["estimate", "--graph", p4_file, "--algo", "sse", "--bogus"]) == 1

    def test_unknown_algorithm(self, p4_file):
        assert run_cli(["estimate", "--graph", p4_file, "--algo", "magic"]) == 1

    def test_no_subcommand(self):
        assert run_cli([]) == 1

    @pytest.mark.parametrize("command,flags", [
        ("gen", ["--family", "--seed", "--out"]),
        ("simulate", ["--graph", "--sources", "--stop-n", "--seed"]),
        ("estimate", ["--graph", "--infected", "--algo", "--k-max", "--tau", "--delta", "--format"]),
        ("benchmark", ["--config", "--seed", "--jobs", "--format"]),
        ("oracle", ["--check", "--trials"]),
    ])
    def test_help_lists_flags(self, command, flags, capsys):
        with pytest.raises(SystemExit) as exc_info:
            run_cli([command, "--help"])

        assert exc_info.value.code == 0
        out = capsys.readouterr().out
        for flag in flags:
            assert flag in out


class TestEstimate:

    def test_two_source_estimate_uses_file_ids(self, p4_file, capsys):
        code = run_cli(["estimate", "--graph", p4_file, "--algo", "tse"])

        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["algo"] == "tse"
        assert payload["nodes"] == [10, 12]

    def test_infected_subset(self, tmp_path, p4_file, capsys):
        infected = write(tmp_path, "infected.txt", "# infected\n10\n11\n12\n")

        code = run_cli(["estimate", "--graph", p4_file, "--infected", infected, "--algo", "sse"])

        assert code == 0
        assert json.loads(capsys.readouterr().out)["nodes"] == [11]

    def test_non_tree_rejected(self, cycle_file, capsys):
        code = run_cli(["estimate", "--graph", cycle_file, "--algo", "sse"])

        assert code == 2
        err = capsys.readouterr().err
        assert "input is not a tree" in err
        assert "usage:" not in err

    def test_runtime_failure_logs_error_record(self, cycle_file, mocker, mock_core_service):
        mock_core_service.wrap_error.side_effect = lambda code, error: error.to_dict()
        mocker.patch("main.resolve_handlers", return_value=CliHandlers(mock_core_service))

        code = run_cli(["estimate", "--graph", cycle_file, "--algo", "tse"])

        assert code == 2
        mock_core_service.error.assert_called_once_with(
            "command_failed", code=40200, detail="input is not a tree", context={'nodes': 4, 'edges': 4}
        )

    def test_bfs_variant_accepts_cycle(self, cycle_file, capsys):
        assert run_cli(["estimate", "--graph", cycle_file, "--algo", "sse-bfs"]) == 0
        assert json.loads(capsys.readouterr().out)["nodes"] == [0]

    def test_msep_writes_regions(self, tmp_path, p4_file):
        out = str(tmp_path / "msep.json")

        code = run_cli(["estimate", "--graph", p4_file, "--algo", "msep", "--k-max", "1", "--out", out])

        assert code == 0
        with open(out, encoding="utf-8") as handle:
            payload = json.load(handle)
        assert payload["k_final"] == 1
        assert payload["regions"] == [[10, 11, 12, 13]]
        assert payload["sources"] in ([11], [12])

    def test_nsse_count(self, p4_file, capsys):
        assert run_cli(["estimate", "--graph", p4_file, "--algo", "nsse", "--k", "2"]) == 0
        assert json.loads(capsys.readouterr().out)["nodes"] == [11, 12]

    def test_unknown_infected_node(self, tmp_path, p4_file):
        infected = write(tmp_path, "infected.txt", "10\n99\n")

        assert run_cli(["estimate", "--graph", p4_file, "--infected", infected, "--algo", "sse"]) == 1

    def test_malformed_infected_file(self, tmp_path, p4_file, capsys):
        infected = write(tmp_path, "infected.txt", "10\neleven\n")

        code = run_cli(["estimate", "--graph", p4_file, "--infected", infected, "--algo", "sse"])

        assert code == 2
        assert "line 2" in capsys.readouterr().err

    def test_missing_graph_file(self, tmp_path, capsys):
        code = run_cli(["estimate", "--graph", str(tmp_path / "absent.txt"), "--algo", "sse"])

        assert code == 2
        assert "cannot read" in capsys.readouterr().err


class TestGenerateAndSimulate:

    def test_gen_is_seeded(self, tmp_path):
        first = str(tmp_path / "a.txt")
        second = str(tmp_path / "b.txt")

        assert run_cli(["gen", "--family", "random-tree", "--n", "20", "--seed", "3", "--out", first]) == 0
        assert run_cli(["gen", "--family", "random-tree", "--n", "20", "--seed", "3", "--out", second]) == 0

        with open(first, encoding="utf-8") as a, open(second, encoding="utf-8") as b:
            text = a.read()
            assert text == b.read()
        assert len(text.splitlines()) == 19

    def test_simulate_from_given_sources(self, tmp_path, capsys):
        graph = str(tmp_path / "tree.txt")
        run_cli(["gen", "--family", "random-tree", "--n", "30", "--seed", "1", "--out", graph])

        code = run_cli(["simulate", "--graph", graph, "--sources", "0,5", "--stop-n", "10", "--seed", "4"])

        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["sources"] == [0, 5]
        assert len(payload["order"]) == 10
        assert sorted(v for region in payload["regions"] for v in region) == sorted(payload["order"])

    def test_simulate_random_sources(self, tmp_path, capsys):
        graph = str(tmp_path / "tree.txt")
        run_cli(["gen", "--family", "random-tree", "--n", "40", "--seed", "2", "--out", graph])

        assert run_cli(["simulate", "--graph", graph, "--k", "2", "--stop-n", "12", "--seed", "9"]) == 0
        first = capsys.readouterr().out
        assert run_cli(["simulate", "--graph", graph, "--k", "2", "--stop-n", "12", "--seed", "9"]) == 0
        assert capsys.readouterr().out == first
        assert len(json.loads(first)["sources"]) == 2


class TestBenchmarkAndOracle:

    @pytest.fixture
    def config_file(self, tmp_path):
        return write(tmp_path, "cfg.json", json.dumps({
            "graph": {"family": "random-tree", "n": 50},
            "k_true": 2, "stop_n": 20, "runs": 2,
        }))

    def test_benchmark_is_byte_identical(self, tmp_path, config_file):
        first = str(tmp_path / "first.csv")
        second = str(tmp_path / "second.csv")

        assert run_cli(["benchmark", "--config", config_file, "--seed", "1", "--out", first]) == 0
        assert run_cli(["benchmark", "--config", config_file, "--seed", "1", "--out", second]) == 0

        with open(first, "rb") as a, open(second, "rb") as b:
            data = a.read()
            assert data == b.read()
        assert data.startswith(b"run,family,k_true,k_est,algo,")
        assert len(data.splitlines()) == 1 + 2 * 3

    def test_benchmark_json(self, config_file, capsys):
        assert run_cli(["benchmark", "--config", config_file, "--runs", "1", "--format", "json"]) == 0

        payload = json.loads(capsys.readouterr().out)
        assert len(payload["records"]) == 3
        assert set(payload["aggregate"]) == {"msep", "nsse", "nsse-guess"}

    def test_bad_config(self, tmp_path):
        config = write(tmp_path, "cfg.yaml", "graph: {family: random-tree}\nrunz: 2\n")

        assert run_cli(["benchmark", "--config", config]) == 2

    def test_example_oracle(self, capsys):
        assert run_cli(["oracle", "--check", "figure1"]) == 0
        assert "figure1: 3 passed, 0 failed" in capsys.readouterr().out

    def test_oracle_report_file(self, tmp_path):
        out = str(tmp_path / "lemma1.json")

        assert run_cli(["oracle", "--check", "lemma1", "--trials", "5", "--out", out]) == 0
        with open(out, encoding="utf-8") as handle:
            report = json.load(handle)
        assert report["failed"] == 0
        assert report["passed"] > 0

    def test_coloring_oracle_on_source_chains(self, capsys):
        assert run_cli(["oracle", "--check", "theorem1", "--trials", "8"]) == 0
        assert "theorem1: 8 passed, 0 failed" in capsys.readouterr().out


class TestSourceChainInstances:

    def test_instances_are_paths_with_sources_at_the_ends(self):
        instances = [source_chain_instance(seed) for seed in range(40)]

        for g, sources in instances:
            assert g.is_tree()
            assert max(g.degree(v) for v in g.nodes()) <= 2
            assert sources[0] == 0 and sources[-1] == g.node_count - 1
            assert list(sources) == sorted(set(sources))
        assert {len(sources) for _, sources in instances} == {2, 3}
