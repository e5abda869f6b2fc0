"""Tests for the command-line surface."""

import json

import pytest
from loguru import logger
from typer.testing import CliRunner

from bulk_reach.core.file_formats import read_change_script, read_graph, read_weights
from bulk_reach.core.logging_config import setup_logging
from bulk_reach.main import app

runner = CliRunner()


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    monkeypatch.setattr("bulk_reach.core.settings_manager.SETTINGS_FILE", tmp_path / "settings.json")
    monkeypatch.setattr("bulk_reach.core.logging_config.LOG_DIR", tmp_path / "logs")
    yield
    # The runner's stderr is gone after invoke
    logger.remove()
    setup_logging("WARNING")


def invoke(*args):
    return runner.invoke(app, ["--log-level", "ERROR", *args])


def json_lines(text):
    return [json.loads(line) for line in text.splitlines() if line.startswith("{")]


@pytest.fixture
def instance(tmp_path):
    graph, tree, script = tmp_path / "g.txt", tmp_path / "t.txt", tmp_path / "s.txt"
    result = invoke(
        "generate", "partial-k-tree", "--out", str(graph), "--n", "8", "--seed", "3",
        "--decomposition", str(tree), "--script", str(script), "--steps", "3", "--batch-size", "2",
    )
    assert result.exit_code == 0, result.output
    return graph, tree, script


@pytest.fixture
def small_directed(tmp_path):
    graph, script = tmp_path / "d.txt", tmp_path / "ds.txt"
    graph.write_text("n 3 directed\ne 0 1\n")
    script.write_text("change\n+ 1 2\n+ 2 0\nend\nchange\n- 0 1\n+ 0 2\nend\n")
    return graph, script


class TestGenerate:
    def test_writes_instance_files(self, instance):
        graph, tree, script = instance
        g = read_graph(graph)
        assert g.n == 8
        assert not g.directed
        assert tree.exists()
        assert len(read_change_script(script)) == 3

    def test_path_union(self, tmp_path):
        out = tmp_path / "p.txt"
        result = invoke("generate", "path-union", "--out", str(out), "--q", "2", "--length", "3")
        assert result.exit_code == 0
        assert read_graph(out).edges == {(0, 1), (1, 2), (3, 4), (4, 5)}

    def test_unknown_kind(self, tmp_path):
        result = invoke("generate", "grid", "--out", str(tmp_path / "x.txt"))
        assert result.exit_code == 2

    def test_bad_parameters(self, tmp_path):
        result = invoke("generate", "random-gnp", "--out", str(tmp_path / "x.txt"), "--p", "2.0")
        assert result.exit_code == 2


class TestReplay:
    def test_passes_and_writes_report(self, instance, tmp_path):
        graph, _, script = instance
        report = tmp_path / "r.jsonl"
        result = invoke("replay", str(graph), str(script), "--engine", "undirected", "--report", str(report))
        assert result.exit_code == 0, result.output
        records = json_lines(report.read_text())
        assert len(records) == 4
        assert records[-1]["summary"] is True
        assert records[-1]["passed"] is True

    def test_report_on_stdout(self, tmp_path):
        graph, script = tmp_path / "g.txt", tmp_path / "s.txt"
        invoke(
            "generate", "random-gnp", "--out", str(graph), "--n", "6", "--p", "0.3",
            "--script", str(script), "--steps", "3", "--batch-size", "2",
        )
        result = invoke("replay", str(graph), str(script), "--engine", "algebraic", "--seed", "4")
        assert result.exit_code == 0, result.output
        assert json_lines(result.stdout)[-1]["steps"] == 3

    def test_unknown_engine(self, instance):
        graph, _, script = instance
        result = invoke("replay", str(graph), str(script), "--engine", "bogus")
        assert result.exit_code == 2

    def test_missing_file(self, tmp_path):
        result = invoke("replay", str(tmp_path / "none.txt"), str(tmp_path / "none.txt"))
        assert result.exit_code == 2

    def test_engine_rejects_graph_kind(self, instance):
        graph, _, script = instance
        result = invoke("replay", str(graph), str(script), "--engine", "tc-insert")
        assert result.exit_code == 2

    @pytest.mark.parametrize("mode", ["verified", "faithful"])
    def test_paper_weight_scheme(self, small_directed, tmp_path, mode):
        graph, script = small_directed
        state = tmp_path / "state"
        result = invoke(
            "replay", str(graph), str(script), "--engine", "algebraic",
            "--weight-scheme", "paper", "--mode", mode, "--dump-state", str(state),
        )
        assert result.exit_code == 0, result.output
        assert json_lines(result.stdout)[-1]["passed"] is True
        assert f"mode {mode} scheme derandomized" in (state / "state.txt").read_text()

    def test_undecodable_graph(self, small_directed, tmp_path):
        _, script = small_directed
        graph = tmp_path / "bad.txt"
        graph.write_bytes(b"\xff\xfe n 3")
        assert invoke("replay", str(graph), str(script)).exit_code == 2

    def test_script_endpoint_out_of_range(self, small_directed, tmp_path):
        graph, _ = small_directed
        script = tmp_path / "far.txt"
        script.write_text("change\n+ 0 7\nend\n")
        assert invoke("replay", str(graph), str(script), "--engine", "algebraic").exit_code == 2


class TestWeights:
    def test_circulation_weights(self, instance, tmp_path):
        graph, tree, _ = instance
        out = tmp_path / "w.txt"
        result = invoke("weights", str(graph), str(tree), "--out", str(out))
        assert result.exit_code == 0, result.output
        w = read_weights(out, skew_symmetric=True)
        assert all(u < v for u, v in read_weights(out).weights)
        assert w.weights

    def test_isolating_weights(self, instance, tmp_path):
        graph, tree, _ = instance
        out = tmp_path / "w.txt"
        result = invoke("weights", str(graph), str(tree), "--out", str(out), "--isolating")
        assert result.exit_code == 0, result.output
        w = read_weights(out)
        assert all(value > 0 for value in w.weights.values())

    def test_missing_decomposition(self, instance, tmp_path):
        graph, _, _ = instance
        result = invoke("weights", str(graph), str(tmp_path / "none.txt"))
        assert result.exit_code == 2

    @pytest.mark.parametrize("x,expected", [(5, 0), (2, 1)])
    def test_check_existing_weights(self, tmp_path, x, expected):
        graph, weights = tmp_path / "g.txt", tmp_path / "w.txt"
        graph.write_text("n 3 undirected\ne 0 1\ne 1 2\ne 0 2\n")
        # the triangle 0 -> 1 -> 2 -> 0 weighs 2 - x
        weights.write_text(f"w 0 1 1\nw 1 2 1\nw 0 2 {x}\n")
        result = invoke("weights", str(graph), "--check", str(weights))
        assert result.exit_code == expected

    def test_check_isolating_weights(self, tmp_path):
        graph, weights = tmp_path / "g.txt", tmp_path / "w.txt"
        graph.write_text("n 3 undirected\ne 0 1\ne 1 2\n")
        weights.write_text("w 0 1 1\nw 1 0 1\nw 1 2 1\nw 2 1 1\n")
        result = invoke("weights", str(graph), "--check", str(weights), "--isolating")
        assert result.exit_code == 0

    def test_decomposition_or_check_required(self, instance):
        graph, _, _ = instance
        assert invoke("weights", str(graph)).exit_code == 2


class TestBench:
    def test_prints_one_record_per_cell(self):
        result = invoke("bench", "--engine", "tc-insert", "--n", "4", "--batch", "1", "--batch", "2", "--steps", "1")
        assert result.exit_code == 0, result.output
        records = json_lines(result.stdout)
        assert [(r["engine"], r["n"], r["batch"]) for r in records] == [("tc-insert", 4, 1), ("tc-insert", 4, 2)]

    def test_unknown_engine(self):
        assert invoke("bench", "--engine", "nope").exit_code == 2
