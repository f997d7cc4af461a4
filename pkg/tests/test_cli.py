import json

import pytest

from contomp.cli import main


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def run_config(tmp_path):
    return write_config(tmp_path, {
        "schema_version": 1,
        "kernel": {"family": "laplace", "lam": 1.0, "p": 1.0, "dimension": 1},
        "support": {"points": [[0.0], [1.0], [2.0]]},
        "coefficients": {"values": [1.0, -2.0, 1.5]},
    })


@pytest.fixture
def trial_config(tmp_path):
    return write_config(tmp_path, {
        "schema_version": 1,
        "kernel": {"family": "laplace", "lam": 1.0, "p": 1.0, "dimension": 1},
        "support": {"random": {"count": 2, "box": [-5, 5], "min_gap": 0.01}},
        "coefficients": {"random": {"magnitude": [0.1, 10.0], "signs": "signed"}},
        "trials": 4,
    }, name="trial.json")


class TestRun:
    def test_exact_recovery_run(self, run_config, capsys):
        assert main(["run", "--config", run_config]) == 0
        out = capsys.readouterr().out
        assert "ExactKStep" in out

    def test_json_trace_document(self, run_config, tmp_path):
        out_path = tmp_path / "trace.json"
        assert main(["run", "--config", run_config, "--format", "json",
                     "--out", str(out_path)]) == 0
        doc = json.loads(out_path.read_text())
        assert doc["verdict"] == "ExactKStep"
        assert len(doc["iterations"]) == 3
        assert doc["reconstruction"]["ok"] is True

    def test_missing_config_is_config_error(self):
        assert main(["run", "--config", "/does/not/exist.json"]) == 2

    def test_bad_schema_version(self, tmp_path):
        cfg = write_config(tmp_path, {"schema_version": 99})
        assert main(["run", "--config", cfg]) == 2

    def test_unknown_family(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema_version": 1,
            "kernel": {"family": "cauchy"},
            "support": {"points": [[0.0]]},
            "coefficients": {"values": [1.0]},
        })
        assert main(["run", "--config", cfg]) == 2


class TestTrial:
    def test_byte_identical_reruns(self, trial_config, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            assert main(["trial", "--config", trial_config, "--seed", "3",
                         "--no-timing", "--out", str(path)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_table_shape(self, trial_config, tmp_path):
        out = tmp_path / "t.csv"
        assert main(["trial", "--config", trial_config, "--seed", "3",
                     "--no-timing", "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "trial_index,seed,k,D,verdict,iterations,residual,erc_max,ms"
        rows = [l for l in lines if not l.startswith("#")]
        assert len(rows) == 1 + 4
        assert any(l.startswith("# trials=4") for l in lines)

    def test_json_format(self, trial_config, tmp_path):
        out = tmp_path / "t.json"
        assert main(["trial", "--config", trial_config, "--seed", "1",
                     "--format", "json", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert len(doc["records"]) == 4
        assert sum(doc["summary"].values()) == 4

    def test_parallel_jobs_match_serial(self, trial_config, tmp_path):
        a, b = tmp_path / "serial.csv", tmp_path / "par.csv"
        assert main(["trial", "--config", trial_config, "--seed", "5",
                     "--no-timing", "--out", str(a)]) == 0
        assert main(["trial", "--config", trial_config, "--seed", "5",
                     "--no-timing", "--jobs", "2", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_zero_trials_rejected(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema_version": 1,
            "kernel": {"family": "laplace"},
            "support": {"points": [[0.0]]},
            "coefficients": {"values": [1.0]},
            "trials": 0,
        })
        assert main(["trial", "--config", cfg]) == 2


class TestCertify:
    def test_report(self, tmp_path, capsys):
        cfg = write_config(tmp_path, {
            "schema_version": 1,
            "kernel": {"family": "laplace", "lam": 1.0, "p": 1.0, "dimension": 2},
            "support": {"points": [[0.0, 0.0], [2.0, 2.0]]},
            "trials": 5,
        })
        assert main(["certify", "--config", cfg]) == 0
        out = capsys.readouterr().out
        assert "restricted_erc: holds" in out
        assert "separation: holds" in out
        assert "axis_falsifier: not-falsified" in out

    def test_explicit_support_required(self, tmp_path):
        cfg = write_config(tmp_path, {
            "schema_version": 1,
            "kernel": {"family": "laplace"},
            "support": {"random": {"count": 2}},
            "coefficients": {"values": [1.0, 1.0]},
        })
        assert main(["certify", "--config", cfg]) == 2


class TestExamples:
    def test_bundle_passes(self, capsys):
        assert main(["examples"]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 3
        assert "FAIL" not in out
