"""CLI contract: schemas, exit codes, determinism, atomic output."""

import json

import numpy as np
import pytest

from qtrep import cli, qtfit


def write_config(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


def run(args):
    return cli.main([str(a) for a in args])


@pytest.fixture
def chain3():
    return [[0.0, 3.0, 5.0], [1.0, 0.0, 6.0], [2.0, 4.0, 0.0]]


class TestConfigHandling:
    def test_missing_file(self, tmp_path, capsys):
        assert run(["qt-fit", "--config", tmp_path / "nope.json"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_json_writes_nothing(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text('{"W": [[0, 1], [2, 0]')
        assert run(["qt-fit", "--config", cfg]) == 2
        assert not (tmp_path / "result.json").exists()
        assert "not valid JSON" in capsys.readouterr().err

    def test_non_object_config_rejected(self, tmp_path):
        cfg = tmp_path / "arr.json"
        cfg.write_text("[1, 2, 3]")
        assert run(["qt-fit", "--config", cfg]) == 2

    def test_unknown_key_rejected(self, tmp_path, capsys, chain3):
        cfg = write_config(
            tmp_path / "c.json",
            {"W": chain3, "out": str(tmp_path / "r"), "typo_key": 1},
        )
        assert run(["qt-fit", "--config", cfg]) == 2
        assert "typo_key" in capsys.readouterr().err
        assert not (tmp_path / "r.json").exists()

    def test_wrong_type_rejected(self, tmp_path, chain3):
        cfg = write_config(
            tmp_path / "c.json",
            {"W": chain3, "out": str(tmp_path / "r"), "seed": "zero"},
        )
        assert run(["qt-fit", "--config", cfg]) == 2


class TestQtFit:
    def test_writes_representation(self, tmp_path, chain3):
        out = tmp_path / "rep"
        cfg = write_config(tmp_path / "c.json", {"W": chain3, "out": str(out)})
        assert run(["qt-fit", "--config", cfg]) == 0
        doc = json.loads((tmp_path / "rep.json").read_text())
        rep = qtfit.QTRepresentation.from_json_dict(doc)
        assert rep.n == 3
        assert rep.residual < 1e-8

    def test_byte_identical_reruns(self, tmp_path, chain3):
        out = tmp_path / "rep"
        cfg = write_config(
            tmp_path / "c.json", {"W": chain3, "out": str(out), "seed": 4}
        )
        assert run(["qt-fit", "--config", cfg]) == 0
        first = (tmp_path / "rep.json").read_bytes()
        assert run(["qt-fit", "--config", cfg]) == 0
        assert (tmp_path / "rep.json").read_bytes() == first

    def test_negative_rate_rejected(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.json",
            {"W": [[0.0, -1.0], [1.0, 0.0]], "out": str(tmp_path / "r")},
        )
        assert run(["qt-fit", "--config", cfg]) == 2


class TestPmeSolve:
    def test_trajectory_and_report(self, tmp_path):
        out = tmp_path / "run"
        cfg = write_config(
            tmp_path / "c.json",
            {
                "W": [[0.0, 1.0], [2.0, 0.0]],
                "p0": [0.9, 0.1],
                "t_end": 2.0,
                "stride": 100,
                "out": str(out),
            },
        )
        assert run(["pme-solve", "--config", cfg]) == 0
        report = json.loads((tmp_path / "run.json").read_text())
        np.testing.assert_allclose(report["stationary"], [1 / 3, 2 / 3], atol=1e-10)
        assert report["zero_mode_index"] == 0
        lines = (tmp_path / "run.csv").read_text().splitlines()
        assert lines[0] == "t,y1,y2,entropy,sum_drift"
        last = lines[-1].split(",")
        assert float(last[0]) == 2.0
        np.testing.assert_allclose(
            [float(last[1]), float(last[2])], report["final_state"], atol=0
        )

    def test_state_dimension_mismatch(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.json",
            {
                "W": [[0.0, 1.0], [2.0, 0.0]],
                "p0": [0.5, 0.3, 0.2],
                "t_end": 1.0,
                "out": str(tmp_path / "r"),
            },
        )
        assert run(["pme-solve", "--config", cfg]) == 2

    def test_bad_probability_rejected(self, tmp_path):
        cfg = write_config(
            tmp_path / "c.json",
            {
                "W": [[0.0, 1.0], [2.0, 0.0]],
                "p0": [0.9, 0.3],
                "t_end": 1.0,
                "out": str(tmp_path / "r"),
            },
        )
        assert run(["pme-solve", "--config", cfg]) == 2


class TestRelaxCommands:
    def test_classify_to_stdout(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.json", {"rates": [1, 2, 3, 4, 5, 6]})
        assert run(["relax-classify", "--config", cfg]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["xi"] == 21
        assert doc["disc"] == 65
        assert doc["monotonic"] is True

    def test_classify_to_file(self, tmp_path):
        out = tmp_path / "cls"
        cfg = write_config(
            tmp_path / "c.json", {"rates": [1, 0, 0, 1, 1, 0], "out": str(out)}
        )
        assert run(["relax-classify", "--config", cfg]) == 0
        doc = json.loads((tmp_path / "cls.json").read_text())
        assert doc["monotonic"] is False
        assert doc["omega"] == 3

    def test_scan_outputs(self, tmp_path):
        out = tmp_path / "scan"
        cfg = write_config(
            tmp_path / "c.json",
            {"samples": 64, "ranges": [0, 1], "seed": 7, "out": str(out)},
        )
        assert run(["relax-scan", "--config", cfg]) == 0
        lines = (tmp_path / "scan.csv").read_text().splitlines()
        assert lines[0] == "a,b,c,d,e,f,xi,disc,omega,u,v,monotonic"
        assert len(lines) == 65
        summary = json.loads((tmp_path / "scan.json").read_text())
        assert summary["samples"] == 64
        assert 0.0 <= summary["oscillatory_fraction"] <= 1.0
        assert len(summary["omega_bins"]) == 10

    def test_scan_determinism(self, tmp_path):
        out = tmp_path / "scan"
        cfg = write_config(
            tmp_path / "c.json", {"samples": 32, "seed": 3, "out": str(out)}
        )
        assert run(["relax-scan", "--config", cfg]) == 0
        first = (tmp_path / "scan.csv").read_bytes()
        assert run(["relax-scan", "--config", cfg]) == 0
        assert (tmp_path / "scan.csv").read_bytes() == first

    def test_qtk_threads_validated(self, tmp_path, monkeypatch):
        cfg = write_config(
            tmp_path / "c.json", {"samples": 8, "out": str(tmp_path / "s")}
        )
        monkeypatch.setenv("QTK_THREADS", "not-a-number")
        assert run(["relax-scan", "--config", cfg]) == 2
        monkeypatch.setenv("QTK_THREADS", "2")
        assert run(["relax-scan", "--config", cfg]) == 0


class TestLindblad:
    def test_gradient_channel_report(self, tmp_path):
        out = tmp_path / "lb"
        cfg = write_config(
            tmp_path / "c.json",
            {
                "channel": {"dissipators": [{"A": [1, 0, 0], "B": [0, 1, 0]}]},
                "P0": [0.2, 0.1, -0.3],
                "t_end": 4.0,
                "stride": 500,
                "out": str(out),
            },
        )
        assert run(["lindblad", "--config", cfg]) == 0
        doc = json.loads((tmp_path / "lb.json").read_text())
        np.testing.assert_allclose(doc["P_st"], [0, 0, 1], atol=1e-12)
        assert doc["P_st_abs"] == pytest.approx(1.0, abs=1e-12)
        assert doc["gradient_identity_residual"] < 1e-12
        assert doc["six_variable_equivalence_residual"] < 1e-10
        np.testing.assert_allclose(doc["P_final"], doc["P_st"], atol=1e-2)

    def test_field_channel_rejected_by_default(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path / "c.json",
            {
                "channel": {
                    "h": [0, 0, 1],
                    "dissipators": [{"A": [1, 0, 0], "B": [0, 1, 0]}],
                },
                "P0": [0.1, 0.0, 0.0],
                "t_end": 1.0,
                "out": str(tmp_path / "r"),
            },
        )
        assert run(["lindblad", "--config", cfg]) == 2
        assert "gradient form unavailable" in capsys.readouterr().err

    def test_field_channel_allowed_without_check(self, tmp_path):
        out = tmp_path / "lb"
        cfg = write_config(
            tmp_path / "c.json",
            {
                "channel": {
                    "h": [0, 0, 1],
                    "dissipators": [{"A": [1, 0, 0], "B": [0, 1, 0]}],
                },
                "P0": [0.1, 0.0, 0.0],
                "t_end": 1.0,
                "gradient_check": False,
                "out": str(out),
            },
        )
        assert run(["lindblad", "--config", cfg]) == 0
        doc = json.loads((tmp_path / "lb.json").read_text())
        assert "P_final" in doc
        assert "P_st" not in doc
        # no entropy monitor without the gradient form
        lines = (tmp_path / "lb.csv").read_text().splitlines()
        assert lines[1].split(",")[4] == "nan"


class TestComposite:
    def test_report_values(self, tmp_path, capsys):
        cfg = write_config(tmp_path / "c.json", {"a": 2.0, "c": 2.0})
        assert run(["composite", "--config", cfg]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["lambda"] == 4
        assert doc["q"] == 2
        assert doc["tsallis_coupling"] == -1
        assert doc["gradient_residual"] < 1e-12
        np.testing.assert_allclose(doc["stationary"], 0.25, atol=1e-9)

    def test_bad_rate_rejected(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {"a": -1.0, "c": 2.0})
        assert run(["composite", "--config", cfg]) == 2


class TestAtomicWrites:
    def test_no_partial_file_on_failure(self, tmp_path):
        # stationary_state fails after the trajectory would be computed;
        # no output may exist afterwards
        out = tmp_path / "part"
        w = [[0.0, 0.0, 0.0, 0.0] for _ in range(4)]
        w[0][1] = w[1][0] = 1.0
        w[2][3] = w[3][2] = 1.0
        cfg = write_config(
            tmp_path / "c.json",
            {"W": w, "p0": [0.25, 0.25, 0.25, 0.25], "t_end": 0.1, "out": str(out)},
        )
        assert run(["pme-solve", "--config", cfg]) == 2
        assert not (tmp_path / "part.json").exists()
        assert not (tmp_path / "part.csv").exists()

    def test_existing_file_is_replaced(self, tmp_path, chain3):
        out = tmp_path / "rep"
        (tmp_path / "rep.json").write_text("stale")
        cfg = write_config(tmp_path / "c.json", {"W": chain3, "out": str(out)})
        assert run(["qt-fit", "--config", cfg]) == 0
        assert "stale" not in (tmp_path / "rep.json").read_text()
