import json

import pytest

from flexqnet.cli import EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_OK, main


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCompareLoss:
    def test_table_and_figure(self, tmp_path, capsys):
        store = tmp_path / "session"
        code, out, _ = run(
            ["compare-loss", "--users", "2..16", "--store", str(store)], capsys
        )
        assert code == EXIT_OK
        table = (store / "artifacts" / "compare-loss.tsv").read_text().splitlines()
        assert len(table) == 16  # header + 15 rows
        last = table[-1].split("\t")
        assert last[0] == "16"
        assert float(last[3]) == pytest.approx(60.6)
        figure = store / "artifacts" / "compare-loss.png"
        assert figure.exists() and figure.stat().st_size > 1000
        assert figure.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


class TestPlan:
    def test_full_flex_drops_cd(self, tmp_path, capsys):
        store = tmp_path / "session"
        code, out, _ = run(
            [
                "plan",
                "--policy", "full-flex",
                "--objective", "equalize",
                "--allow-drop",
                "--store", str(store),
            ],
            capsys,
        )
        assert code == EXIT_OK
        payload = json.loads((store / "artifacts" / "plan.json").read_text())
        assert payload["diagnostics"]["dropped_links"] == ["Charlie-Dave"]
        assert payload["objective_value"] <= 2.0
        assert (store / "artifacts" / "plan-map.png").exists()
        assert (store / "artifacts" / "plan-rates.png").exists()
        assert "Charlie-Dave" in out

    def test_alphabetical_policy(self, tmp_path, capsys):
        store = tmp_path / "session"
        code, out, _ = run(
            ["plan", "--policy", "alphabetical", "--store", str(store)], capsys
        )
        assert code == EXIT_OK
        payload = json.loads((store / "artifacts" / "plan.json").read_text())
        assert payload["allocation"]["1"] == ["Alice", "Bob"]
        assert payload["allocation"]["12"] == ["Charlie", "Dave"]

    def test_infeasible_exit_code(self, tmp_path, capsys):
        # premium floors that cannot be met on a dark-free default network
        scenario = tmp_path / "scenario.json"
        code, _, _ = run(["init", "--out", str(scenario)], capsys)
        doc = json.loads(scenario.read_text())
        doc["objective"] = {
            "variant": "premium",
            "premium_link": ["Alice", "Bob"],
            "floors": [{"link": ["Charlie", "Dave"], "rate": 1e9}],
        }
        scenario.write_text(json.dumps(doc))
        code, _, err = run(
            ["plan", "--scenario", str(scenario), "--policy", "full-flex",
             "--store", str(tmp_path / "s2")],
            capsys,
        )
        assert code == EXIT_INFEASIBLE
        assert "floor" in err

    def test_bad_scenario_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run(
            ["plan", "--scenario", str(bad), "--store", str(tmp_path / "s")], capsys
        )
        assert code == EXIT_CONFIG
        assert "error" in err


class TestPredictAndSimulate:
    def test_predict_empty_allocation(self, tmp_path, capsys):
        store = tmp_path / "session"
        code, out, _ = run(["predict", "--store", str(store)], capsys)
        assert code == EXIT_OK
        payload = json.loads((store / "artifacts" / "predict.json").read_text())
        assert all(l["coincidence"] == 0.0 for l in payload["links"].values())

    def test_predict_from_plan_artifact(self, tmp_path, capsys):
        store = tmp_path / "session"
        run(["plan", "--policy", "alphabetical", "--store", str(store)], capsys)
        code, out, _ = run(
            ["predict", "--plan", str(store / "artifacts" / "plan.json"),
             "--store", str(store)],
            capsys,
        )
        assert code == EXIT_OK
        payload = json.loads((store / "artifacts" / "predict.json").read_text())
        assert payload["links"]["Alice-Bob"]["coincidence"] > 0

    def test_simulate_writes_histograms_and_tags(self, tmp_path, capsys):
        store = tmp_path / "session"
        run(["plan", "--policy", "alphabetical", "--store", str(store)], capsys)
        code, out, _ = run(
            [
                "simulate",
                "--plan", str(store / "artifacts" / "plan.json"),
                "--duration", "0.2",
                "--seed", "5",
                "--export-tags",
                "--store", str(store),
            ],
            capsys,
        )
        assert code == EXIT_OK
        assert (store / "artifacts" / "simulate-histograms.tsv").exists()
        assert (store / "artifacts" / "simulate-histograms.png").exists()
        assert (store / "artifacts" / "simulate-tags.bin").stat().st_size % 9 == 0
        assert (store / "artifacts" / "simulate-tags.txt").exists()
        payload = json.loads((store / "artifacts" / "simulate.json").read_text())
        assert payload["seed"] == 5


class TestTomo:
    def test_small_scan(self, tmp_path, capsys):
        store = tmp_path / "session"
        scenario = tmp_path / "scenario.json"
        run(["init", "--out", str(scenario)], capsys)
        doc = json.loads(scenario.read_text())
        doc["grid"]["channel_count"] = 2
        scenario.write_text(json.dumps(doc))
        code, out, _ = run(
            [
                "tomo",
                "--scenario", str(scenario),
                "--default-mix", "0.97",
                "--channel-mix", "2=0.8",
                "--counts", "2000",
                "--seed", "3",
                "--particles", "400",
                "--mutations", "10",
                "--store", str(store),
            ],
            capsys,
        )
        assert code == EXIT_OK
        rows = (store / "artifacts" / "tomo.tsv").read_text().splitlines()
        assert len(rows) == 3
        payload = json.loads((store / "artifacts" / "tomo.json").read_text())
        assert payload["channels"][0]["mix"] == 0.97
        assert payload["channels"][1]["mix"] == 0.8
        assert (store / "artifacts" / "tomo.png").exists()


class TestInit:
    def test_writes_editable_default(self, tmp_path, capsys):
        out_path = tmp_path / "scenario.json"
        code, out, _ = run(["init", "--out", str(out_path)], capsys)
        assert code == EXIT_OK
        doc = json.loads(out_path.read_text())
        assert doc["name"] == "paper-default"

    def test_unknown_subcommand_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["frobnicate"])
        assert excinfo.value.code == 2
