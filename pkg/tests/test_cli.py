"""CLI contract: subcommands, CSV schemas, exit codes, determinism."""
import csv
import io
import json

from helpers import DATA_DIR

from uncertain_conform.cli import main
from uncertain_conform.events import CAP_ENV_VAR


def run_cli(capsys, *args) -> tuple[int, list[dict]]:
    code = main(list(args))
    out = capsys.readouterr().out
    rows = list(csv.DictReader(io.StringIO(out)))
    return code, rows


class TestBounds:
    def test_icu_fixtures(self, capsys):
        code, rows = run_cli(
            capsys, "bounds", "--log", str(DATA_DIR / "icu_log.json"), "--net", str(DATA_DIR / "icu_net.json")
        )
        assert code == 0
        by_case = {r["case_id"]: r for r in rows}
        assert by_case["table6"] == {
            "case_id": "table6", "lower_cost": "0", "upper_cost": "2", "realization_count": "10",
        }
        assert by_case["table7"] == {
            "case_id": "table7", "lower_cost": "0", "upper_cost": "6", "realization_count": "3024",
        }
        assert by_case["total"]["lower_cost"] == "0"
        assert by_case["total"]["upper_cost"] == "8"

    def test_json_reports(self, capsys):
        code = main([
            "bounds", "--log", str(DATA_DIR / "icu_log.json"),
            "--net", str(DATA_DIR / "icu_net.json"), "--json",
        ])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["total_lower"] == 0 and doc["total_upper"] == 8
        by_case = {r["case_id"]: r for r in doc["reports"]}
        witness = by_case["table6"]["upper_witness"]
        assert witness["cost"] == 2
        move = witness["moves"][0]
        assert set(move) == {"log", "model_label", "model_transition"}

    def test_missing_file_exits_1(self, capsys):
        code = main(["bounds", "--log", "/nonexistent.json", "--net", str(DATA_DIR / "icu_net.json")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_invalid_log_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{]")
        code = main(["bounds", "--log", str(bad), "--net", str(DATA_DIR / "icu_net.json")])
        assert code == 1

    def test_cap_marks_rows_and_exits_2(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv(CAP_ENV_VAR, "12,5")
        code, rows = run_cli(
            capsys, "bounds", "--log", str(DATA_DIR / "icu_log.json"), "--net", str(DATA_DIR / "icu_net.json")
        )
        assert code == 2
        by_case = {r["case_id"]: r for r in rows}
        assert by_case["table7"]["realization_count"] == "capped"
        assert by_case["table7"]["upper_cost"] == "capped"

    def test_empty_log(self, tmp_path, capsys):
        empty = tmp_path / "empty.json"
        empty.write_text(json.dumps({"schema_version": "1.0", "traces": []}))
        code, rows = run_cli(
            capsys, "bounds", "--log", str(empty), "--net", str(DATA_DIR / "icu_net.json")
        )
        assert code == 0
        assert rows == [{"case_id": "total", "lower_cost": "0", "upper_cost": "0", "realization_count": ""}]


class TestGen:
    def test_deterministic_outputs(self, tmp_path):
        args = [
            "gen", "--net-size", "6", "--traces", "8", "--deviation", "0.3,0.3,0.3",
            "--uncertainty", "0.2,0.2,0.2", "--seed", "g1",
        ]
        for tag in ("x", "y"):
            assert main(args + ["--out-log", str(tmp_path / f"log{tag}.json"), "--out-net", str(tmp_path / f"net{tag}.json")]) == 0
        assert (tmp_path / "logx.json").read_bytes() == (tmp_path / "logy.json").read_bytes()
        assert (tmp_path / "netx.json").read_bytes() == (tmp_path / "nety.json").read_bytes()

    def test_zero_uncertainty_gives_certain_log(self, tmp_path):
        log_path, net_path = tmp_path / "log.json", tmp_path / "net.json"
        assert main([
            "gen", "--net-size", "5", "--traces", "5", "--uncertainty", "0,0,0",
            "--seed", "g2", "--out-log", str(log_path), "--out-net", str(net_path),
        ]) == 0
        from uncertain_conform import load_log

        log = load_log(log_path)
        assert all(e.is_certain for t in log for e in t.events)

    def test_clean_generation_is_perfectly_fitting(self, tmp_path, capsys):
        log_path, net_path = tmp_path / "log.json", tmp_path / "net.json"
        main([
            "gen", "--net-size", "8", "--traces", "10", "--seed", "g3",
            "--out-log", str(log_path), "--out-net", str(net_path),
        ])
        code, rows = run_cli(capsys, "bounds", "--log", str(log_path), "--net", str(net_path))
        assert code == 0
        for row in rows:
            assert row["lower_cost"] == "0" and row["upper_cost"] == "0"

    def test_invalid_fraction_exits_1(self, tmp_path, capsys):
        code = main([
            "gen", "--deviation", "0.5,0", "--out-log", str(tmp_path / "l.json"),
            "--out-net", str(tmp_path / "n.json"),
        ])
        assert code == 1


class TestExperimentCommands:
    def test_divergence_csv_schema(self, capsys):
        code, rows = run_cli(
            capsys, "exp-divergence", "--traces", "6", "--reps", "1", "--ps", "0,0.2",
            "--net-size", "5", "--seed", "d",
        )
        assert code == 0
        assert list(rows[0]) == ["p", "deviation_config", "uncertainty_config", "mean_lower", "mean_upper"]
        p0 = next(r for r in rows if float(r["p"]) == 0.0)
        assert p0["mean_lower"] == p0["mean_upper"]

    def test_performance_csv_schema(self, capsys):
        code, rows = run_cli(
            capsys, "exp-performance", "--sizes", "4", "--traces", "4", "--reps", "1",
            "--seed", "p",
        )
        assert code == 0
        assert list(rows[0]) == ["n", "method", "mean_seconds"]
        assert {r["method"] for r in rows} == {"behavior_net", "brute_force"}
        assert all(r["mean_seconds"] == "timeout" or float(r["mean_seconds"]) >= 0 for r in rows)

    def test_realizations_csv_schema(self, capsys):
        code, rows = run_cli(
            capsys, "exp-realizations", "--traces", "5", "--reps", "1", "--ps", "0,0.3",
            "--sizes", "5", "--seed", "r",
        )
        assert code == 0
        assert list(rows[0]) == ["x", "mean_realizations"]
        assert float(rows[0]["mean_realizations"]) == 5.0

    def test_out_file(self, tmp_path):
        out = tmp_path / "rows.csv"
        code = main([
            "exp-realizations", "--traces", "4", "--reps", "1", "--ps", "0",
            "--sizes", "4", "--seed", "r", "--out", str(out),
        ])
        assert code == 0
        assert out.read_text().startswith("x,mean_realizations")
