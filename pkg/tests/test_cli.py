import json

import pytest

from stabtree.cli import (
    EXIT_BUDGET,
    EXIT_CHECK_FAILED,
    EXIT_OK,
    EXIT_PARSE_ERROR,
    InitSpecError,
    bench_corpus,
    build_initial_config,
    corpus_instances,
    main,
)
from stabtree.engine import normal_initial_configuration
from stabtree.graph import format_graph, save_graph
from stabtree.protocol import Status

from conftest import mk_config


@pytest.fixture
def path3_file(tmp_path, path3):
    path = tmp_path / "path3.g"
    save_graph(path3, path)
    return str(path)


@pytest.fixture
def edge_file(tmp_path):
    path = tmp_path / "edge.g"
    path.write_text("g 2 0\ne 0 1 1\n")
    return str(path)


class TestInitSpecs:
    def test_normal(self, path3):
        assert build_initial_config("normal", path3) == normal_initial_configuration(path3)

    def test_file(self, tmp_path, path3):
        cfg = tmp_path / "init.cfg"
        cfg.write_text("p 1 C 0 1\np 2 C 1 2\n")
        config = build_initial_config(f"file:{cfg}", path3)
        assert config == mk_config(path3, n1=(Status.C, 0, 1), n2=(Status.C, 1, 2))

    def test_rand_deterministic(self, path3):
        assert build_initial_config("rand:5:8", path3) == build_initial_config(
            "rand:5:8", path3
        )

    def test_bad_specs(self, path3):
        with pytest.raises(InitSpecError):
            build_initial_config("rand:5", path3)
        with pytest.raises(InitSpecError):
            build_initial_config("warm", path3)


class TestRunCommand:
    def test_clean_run(self, path3_file, capsys):
        code = main(["run", "-g", path3_file, "-d", "sync"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "steps=2 rounds=2 terminated=True" in out
        assert "final_legitimate  PASS" in out

    def test_truncated_run_fails_checks(self, path3_file, capsys):
        code = main(["run", "-g", path3_file, "--max-steps", "1"])
        assert code == EXIT_CHECK_FAILED
        assert "terminated=False" in capsys.readouterr().out

    def test_missing_graph_file(self, tmp_path, capsys):
        code = main(["run", "-g", str(tmp_path / "nope.g")])
        assert code == EXIT_PARSE_ERROR
        assert "error:" in capsys.readouterr().err

    def test_malformed_graph(self, tmp_path, capsys):
        bad = tmp_path / "bad.g"
        bad.write_text("e 0 1 1\n")
        assert main(["run", "-g", str(bad)]) == EXIT_PARSE_ERROR

    def test_bad_daemon_spec(self, path3_file):
        assert main(["run", "-g", path3_file, "-d", "maybe"]) == EXIT_PARSE_ERROR

    def test_trace_and_report_files(self, path3_file, tmp_path, capsys):
        trace_path = tmp_path / "out.trace"
        report_path = tmp_path / "out.report"
        code = main(
            [
                "run",
                "-g",
                path3_file,
                "--init",
                "rand:3:6",
                "-d",
                "central",
                "--seed",
                "4",
                "--trace",
                str(trace_path),
                "--report",
                str(report_path),
            ]
        )
        assert code == EXIT_OK
        header = json.loads(trace_path.read_text().splitlines()[0])
        assert header["type"] == "header"
        assert header["daemon"] == "central"
        verdicts = [json.loads(line) for line in report_path.read_text().splitlines()]
        assert {v["check"] for v in verdicts} >= {"terminated", "final_legitimate"}
        assert all(v["verdict"] == "PASS" for v in verdicts)


class TestExploreCommand:
    def test_certifies_edge(self, edge_file, capsys):
        code = main(["explore", "-g", edge_file, "--dcap", "2"])
        assert code == EXIT_OK
        assert "verdict=PASS" in capsys.readouterr().out

    def test_budget_exhausted(self, path3_file, capsys):
        code = main(["explore", "-g", path3_file, "--dcap", "2", "--max-visited", "10"])
        assert code == EXIT_BUDGET
        assert "INCONCLUSIVE" in capsys.readouterr().err

    def test_report_file(self, edge_file, tmp_path):
        report = tmp_path / "cert.json"
        main(["explore", "-g", edge_file, "--dcap", "2", "--report", str(report)])
        data = json.loads(report.read_text())
        assert data["verdict"] == "PASS"
        assert data["max_steps"] <= data["step_limit"]


class TestBenchCommand:
    def test_small_sweep_clean(self, capsys):
        code = main(["bench", "--count", "5", "--seed", "1", "--max-n", "8"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "violations=0" in out

    def test_bad_daemon_list(self, capsys):
        assert main(["bench", "--count", "1", "--daemons", "sync,what"]) == EXIT_PARSE_ERROR

    def test_report_records(self, tmp_path):
        report = tmp_path / "bench.jsonl"
        main(
            [
                "bench",
                "--count",
                "3",
                "--seed",
                "2",
                "--max-n",
                "6",
                "--daemons",
                "sync,central",
                "--report",
                str(report),
            ]
        )
        records = [json.loads(line) for line in report.read_text().splitlines()]
        assert len(records) == 6
        assert all(r["steps"] <= r["step_limit"] for r in records)


class TestCorpus:
    def test_instances_deterministic(self):
        a = [format_graph(g) for g in corpus_instances(4, 9)]
        b = [format_graph(g) for g in corpus_instances(4, 9)]
        assert a == b

    def test_bench_runs_deterministic(self):
        a = bench_corpus(3, 7, ["sync", "adv:churn"], max_n=8)
        b = bench_corpus(3, 7, ["sync", "adv:churn"], max_n=8)
        assert a == b
        assert all(not r.failures for r in a)
