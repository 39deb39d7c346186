"""CLI behavior through the in-process service."""

import pytest
from click.testing import CliRunner

from hagopt import deserialize_hag, serialize_graph, DirectedGraph, value
from hagopt.cli import main

TWIN_EDGES = [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def twin_file(tmp_path) -> str:
    # JSON form keeps the original ids (no first-appearance remapping)
    path = tmp_path / "twin.json"
    path.write_text(serialize_graph(DirectedGraph(5, TWIN_EDGES)))
    return str(path)


class TestOptimizeCommand:
    def test_summary_line(self, runner, twin_file):
        result = runner.invoke(main, ["optimize", twin_file, "--algo", "full", "--k", "1"])
        assert result.exit_code == 0, result.output
        assert result.output.startswith("value=2 k_used=1 elapsed_ms=")

    def test_zero_budget(self, runner, twin_file):
        result = runner.invoke(main, ["optimize", twin_file, "--k", "0"])
        assert result.exit_code == 0
        assert result.output.startswith("value=0 k_used=0")

    def test_writes_graph_and_trace(self, runner, twin_file, tmp_path):
        out = tmp_path / "hag.json"
        report = tmp_path / "trace.csv"
        result = runner.invoke(main, [
            "optimize", twin_file, "--k", "1",
            "--out", str(out), "--report", str(report)])
        assert result.exit_code == 0
        hag = deserialize_hag(out.read_text())
        assert value(hag) == 2
        lines = report.read_text().splitlines()
        assert lines[0] == "step,in_set,receivers,marginal_value,cumulative_value"
        assert lines[1] == "1,0 1,3,2,2"

    def test_snap_edge_list_input(self, runner, tmp_path):
        path = tmp_path / "twin.txt"
        path.write_text("# twins\n" + "\n".join(f"{u} {v}" for u, v in TWIN_EDGES))
        result = runner.invoke(main, ["optimize", str(path), "--k", "1"])
        assert result.exit_code == 0
        assert "value=2" in result.output

    def test_regime_error_exits_nonzero(self, runner, tmp_path):
        path = tmp_path / "hub.txt"
        path.write_text("\n".join(f"{s} 25" for s in range(25)))
        result = runner.invoke(main, [
            "optimize", str(path), "--algo", "partial", "--k", "1", "--multi-layer"])
        assert result.exit_code != 0
        assert "in-degree 25" in result.output

    def test_missing_file_exits_nonzero(self, runner):
        result = runner.invoke(main, ["optimize", "no-such-file", "--k", "1"])
        assert result.exit_code != 0


class TestCompareCommand:
    def test_ratio_output(self, runner, twin_file, tmp_path):
        report = tmp_path / "cmp.csv"
        result = runner.invoke(main, [
            "compare", twin_file, "--k", "1",
            "--algo", "full", "--algo", "degree", "--report", str(report)])
        assert result.exit_code == 0, result.output
        assert "value_ratio degree/full = 1.0000" in result.output
        assert report.read_text().splitlines()[0].startswith("algorithm,")


class TestExperimentCommands:
    def test_er_sweep(self, runner, tmp_path):
        report = tmp_path / "er.csv"
        agg = tmp_path / "agg.csv"
        result = runner.invoke(main, [
            "experiment-er", "--n", "7", "--p", "0.3", "--trials", "2",
            "--k", "2", "--seed", "1",
            "--report", str(report), "--aggregate-report", str(agg)])
        assert result.exit_code == 0, result.output
        assert "mean_one_minus_alpha=" in result.output
        assert len(report.read_text().splitlines()) == 1 + 2 * 2
        assert agg.read_text().startswith("algorithm,")

    def test_er_sweep_reproducible(self, runner, tmp_path):
        args = ["experiment-er", "--n", "6", "--p", "0.4", "--trials", "2",
                "--k", "1", "--seed", "7"]
        a = runner.invoke(main, args)
        b = runner.invoke(main, args)
        assert a.exit_code == b.exit_code == 0
        assert a.output == b.output

    def test_layers(self, runner, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("\n".join(f"{s} {r}" for s in (0, 1) for r in (2, 3, 4)))
        report = tmp_path / "layers.csv"
        result = runner.invoke(main, [
            "experiment-layers", str(path), "--k-max", "2", "--report", str(report)])
        assert result.exit_code == 0, result.output
        assert "mean_single=" in result.output
        assert len(report.read_text().splitlines()) == 3


class TestValidateCommand:
    def test_passes(self, runner):
        result = runner.invoke(main, ["validate", "--seed", "2", "--trials", "5"])
        assert result.exit_code == 0, result.output
        assert result.output.count("PASS") == 6
        assert "all checks passed" in result.output

    def test_injected_fault_fails(self, runner):
        result = runner.invoke(main, [
            "validate", "--seed", "2", "--trials", "5", "--inject-fault"])
        assert result.exit_code == 1
        assert "FAIL equivalence" in result.output


class TestRenderCommand:
    def test_dot_output(self, runner, twin_file, tmp_path):
        out = tmp_path / "hag.json"
        runner.invoke(main, ["optimize", twin_file, "--k", "1", "--out", str(out)])
        result = runner.invoke(main, [
            "render", str(out), "--names", "A,B,r1,r2,r3"])
        assert result.exit_code == 0, result.output
        assert "A⊕B" in result.output
