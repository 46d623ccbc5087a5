"""End-to-end CLI checks: exit codes, canonical output, determinism."""
import json
import os

import numpy as np
import pytest

from weakmeas import cli, scenario


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    monkeypatch.delenv(cli.SEED_ENV_VAR, raising=False)


@pytest.fixture
def raw():
    return scenario.to_dict(scenario.preset("qubit-theta30"))


def dump(tmp_path, raw, name="sc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(raw))
    return str(path)


def run_json(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    assert code == 0, out
    return json.loads(out)


class TestRun:
    def test_closed_form_document(self, tmp_path, raw, capsys):
        raw["run"]["mode"] = "closed-form"
        doc = run_json(["run", "--config", dump(tmp_path, raw)], capsys)
        assert doc["weak_value"] == [2.0, 0.0]
        assert doc["re_formula"] == pytest.approx(2.0, abs=1e-12)
        assert doc["im_formula"] == pytest.approx(0.0, abs=1e-12)
        assert doc["postselect_prob"] == pytest.approx(0.25, abs=1e-12)
        assert doc["commutator_norms"]["[A,F]"] == pytest.approx(
            np.sqrt(3) / 2, abs=1e-12
        )

    def test_canonical_json_round_trips(self, tmp_path, raw, capsys):
        raw["run"]["mode"] = "closed-form"
        code = cli.main(["run", "--config", dump(tmp_path, raw)])
        out = capsys.readouterr().out
        assert code == 0
        assert cli.canonical_dumps(json.loads(out)) == out
        assert out.endswith("\n")

    def test_exact_moments_document(self, tmp_path, raw, capsys):
        raw["run"]["mode"] = "exact-moments"
        doc = run_json(["run", "--config", dump(tmp_path, raw)], capsys)
        assert doc["estimate"] == pytest.approx(1.9962593521067948, abs=1e-9)
        assert doc["std_error"] == 0.0
        assert doc["correlation_over_gA"] == pytest.approx(0.5, abs=1e-10)

    def test_preset_pointer_run(self, capsys):
        doc = run_json(["run", "--preset", "qubit-theta30"], capsys)
        assert doc["seed"] == 7
        assert doc["mode"] == "sample-pointer"
        assert doc["n_total"] == 1000000
        assert doc["estimate"] == pytest.approx(2.0503179640319131, abs=1e-12)

    def test_csv_format(self, tmp_path, raw, capsys):
        raw["run"]["samples"] = 2000
        code = cli.main(
            ["run", "--config", dump(tmp_path, raw), "--format", "csv"]
        )
        out = capsys.readouterr().out
        assert code == 0
        lines = out.rstrip("\n").split("\n")
        assert lines[0] == "key,value"
        keys = [line.split(",", 1)[0] for line in lines[1:]]
        assert keys == sorted(keys)
        assert "estimate" in keys and "seed" in keys

    def test_out_file_and_thread_invariance(self, tmp_path, raw):
        raw["run"]["samples"] = 20000
        cfg = dump(tmp_path, raw)
        paths = [str(tmp_path / f"out{k}.json") for k in range(3)]
        assert cli.main(["run", "--config", cfg, "--out", paths[0]]) == 0
        assert cli.main(["run", "--config", cfg, "--out", paths[1]]) == 0
        assert (
            cli.main(
                ["run", "--config", cfg, "--threads", "4", "--out", paths[2]]
            )
            == 0
        )
        blobs = [open(p, "rb").read() for p in paths]
        assert blobs[0] == blobs[1] == blobs[2]
        leftovers = [n for n in os.listdir(tmp_path) if n.startswith(".weakmeas-tmp-")]
        assert leftovers == []

    def test_dump_records_file(self, tmp_path, raw, capsys):
        raw["run"]["samples"] = 50
        rec_path = tmp_path / "records.csv"
        code = cli.main(
            [
                "run",
                "--config",
                dump(tmp_path, raw),
                "--out",
                str(tmp_path / "doc.json"),
                "--dump-records",
                str(rec_path),
            ]
        )
        assert code == 0
        lines = rec_path.read_text().rstrip("\n").split("\n")
        assert lines[0] == "index,value_A,value_F,selected"
        assert len(lines) == 51
        for line in lines[1:]:
            _, _, _, sel = line.split(",")
            assert sel in ("0", "1")


class TestSeedPrecedence:
    def test_file_seed_is_default(self, tmp_path, raw, capsys):
        raw["run"]["samples"] = 2000
        doc = run_json(["run", "--config", dump(tmp_path, raw)], capsys)
        assert doc["seed"] == 7

    def test_env_overrides_file(self, tmp_path, raw, capsys, monkeypatch):
        raw["run"]["samples"] = 2000
        monkeypatch.setenv(cli.SEED_ENV_VAR, "41")
        doc = run_json(["run", "--config", dump(tmp_path, raw)], capsys)
        assert doc["seed"] == 41

    def test_flag_overrides_env(self, tmp_path, raw, capsys, monkeypatch):
        raw["run"]["samples"] = 2000
        monkeypatch.setenv(cli.SEED_ENV_VAR, "41")
        doc = run_json(
            ["run", "--config", dump(tmp_path, raw), "--seed", "9"], capsys
        )
        assert doc["seed"] == 9

    def test_garbage_env_rejected(self, tmp_path, raw, capsys, monkeypatch):
        monkeypatch.setenv(cli.SEED_ENV_VAR, "many")
        code = cli.main(["run", "--config", dump(tmp_path, raw)])
        err = capsys.readouterr().err
        assert code == 2
        assert cli.SEED_ENV_VAR in err


class TestSweep:
    def test_theta_formula_column(self, tmp_path, raw, capsys):
        raw["run"]["mode"] = "closed-form"
        out_path = tmp_path / "sweep.csv"
        code = cli.main(
            [
                "sweep",
                "--config",
                dump(tmp_path, raw),
                "--param",
                "theta",
                "--values",
                "0,30",
                "--out",
                str(out_path),
            ]
        )
        assert code == 0
        lines = out_path.read_text().rstrip("\n").split("\n")
        assert lines[0] == cli.SWEEP_HEADER
        rows = [line.split(",") for line in lines[1:]]
        assert [r[0] for r in rows] == ["theta", "theta"]
        assert [float(r[1]) for r in rows] == [0.0, 30.0]
        assert float(rows[0][4]) == pytest.approx(1.0, abs=1e-12)
        assert float(rows[1][4]) == pytest.approx(2.0, abs=1e-12)

    def test_coupling_sweep_error_grows(self, tmp_path, raw, capsys):
        raw["run"]["mode"] = "exact-moments"
        out_path = tmp_path / "sweep.csv"
        values = "0.01,0.02,0.05,0.1"
        code = cli.main(
            [
                "sweep",
                "--config",
                dump(tmp_path, raw),
                "--param",
                "gA_tA",
                "--values",
                values,
                "--out",
                str(out_path),
            ]
        )
        assert code == 0
        rows = [
            line.split(",")
            for line in out_path.read_text().rstrip("\n").split("\n")[1:]
        ]
        assert [float(r[1]) for r in rows] == [0.01, 0.02, 0.05, 0.1]
        errs = [float(r[6]) for r in rows]
        assert errs == sorted(errs)
        assert all(float(r[4]) == pytest.approx(2.0, abs=1e-12) for r in rows)

    def test_single_point_matches_run(self, tmp_path, raw, capsys):
        raw["run"]["samples"] = 20000
        cfg = dump(tmp_path, raw)
        doc = run_json(["run", "--config", cfg], capsys)
        out_path = tmp_path / "one.csv"
        code = cli.main(
            [
                "sweep",
                "--config",
                cfg,
                "--param",
                "gA_tA",
                "--values",
                "0.05",
                "--out",
                str(out_path),
            ]
        )
        assert code == 0
        row = out_path.read_text().rstrip("\n").split("\n")[1].split(",")
        assert float(row[2]) == doc["estimate"]
        assert float(row[3]) == doc["std_error"]

    def test_bad_value_fails_before_writing(self, tmp_path, raw, capsys):
        raw["run"]["mode"] = "exact-moments"
        out_path = tmp_path / "sweep.csv"
        code = cli.main(
            [
                "sweep",
                "--config",
                dump(tmp_path, raw),
                "--param",
                "gA_tA",
                "--values",
                "0.01,500.0",
                "--out",
                str(out_path),
            ]
        )
        assert code == 2
        assert not out_path.exists()


class TestDiagnostics:
    def test_identity_coupling_stays_product(self, tmp_path, raw, capsys):
        raw["A_matrix"] = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
        raw["run"]["mode"] = "diagnostics"
        doc = run_json(["run", "--config", dump(tmp_path, raw)], capsys)
        for name in ("system", "axis0"):
            assert doc["product_check"][name]["is_product"] is True
        assert abs(doc["correlation_witness"]["correlation_gap"]) < 1e-10

    def test_sigma_z_coupling_entangles(self, tmp_path, raw, capsys):
        raw["run"]["mode"] = "diagnostics"
        doc = run_json(["run", "--config", dump(tmp_path, raw)], capsys)
        assert doc["product_check"]["system"]["is_product"] is False
        assert doc["product_check"]["system"]["singular_values"][1] > 1e-6


class TestExitCodes:
    def test_missing_config(self, tmp_path, capsys):
        code = cli.main(["run", "--config", str(tmp_path / "absent.json")])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_invalid_scenario_names_field(self, tmp_path, raw, capsys):
        raw["A_matrix"] = [[[0.0, 0.0], [1.0, 0.1]], [[1.0, 0.0], [0.0, 0.0]]]
        code = cli.main(["run", "--config", dump(tmp_path, raw)])
        err = capsys.readouterr().err
        assert code == 2
        assert "A_matrix" in err

    def test_unknown_sweep_param(self, tmp_path, raw, capsys):
        code = cli.main(
            [
                "sweep",
                "--config",
                dump(tmp_path, raw),
                "--param",
                "hbar",
                "--values",
                "1",
                "--out",
                str(tmp_path / "x.csv"),
            ]
        )
        assert code == 2

    def test_empty_selection_is_runtime_error(self, tmp_path, raw, capsys):
        raw["run"]["samples"] = 500
        raw["run"]["threshold"] = 10.0
        out_path = tmp_path / "doc.json"
        code = cli.main(
            ["run", "--config", dump(tmp_path, raw), "--out", str(out_path)]
        )
        assert code == 3
        assert not out_path.exists()

    def test_dump_records_needs_sampling_mode(self, tmp_path, raw, capsys):
        raw["run"]["mode"] = "exact-moments"
        code = cli.main(
            [
                "run",
                "--config",
                dump(tmp_path, raw),
                "--dump-records",
                str(tmp_path / "r.csv"),
            ]
        )
        assert code == 2

    def test_help_exits_zero(self, capsys):
        assert cli.main(["--help"]) == 0
        assert "weakmeas" in capsys.readouterr().out

    def test_no_command_is_usage_error(self, capsys):
        assert cli.main([]) == 2


class TestPresetsCommand:
    def test_lists_names(self, capsys):
        assert cli.main(["presets"]) == 0
        out = capsys.readouterr().out.split()
        assert out == ["imaginary-sigma-x", "qubit-theta30"]
