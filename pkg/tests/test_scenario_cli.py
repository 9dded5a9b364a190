import csv
import io
import json
from fractions import Fraction

import pytest

from semsum.cli import main
from semsum.demo import format_weather_demo, load_weather_fixture, weather_demo
from semsum.scenario import SCHEMA, Scenario, ScenarioError
from semsum.summarizers import known_p_summarize


def write(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestScenario:
    def test_roundtrip(self, tmp_path):
        doc = {"schema": SCHEMA, "v": 2, "j": 1, "n": 2,
               "distribution": {"kind": "explicit", "probs": ["1/10", "1/5", "3/10", "2/5"]},
               "weights": {"kind": "per_event", "weights": [1, "1/2"]}, "seed": 3}
        sc = Scenario.load(write(tmp_path, doc))
        assert sc.report_distribution()[3] == Fraction(2, 5)
        assert Scenario.from_dict(sc.to_dict()) == sc

    def test_float_probs_within_tolerance(self):
        sc = Scenario.from_dict({"schema": SCHEMA, "v": 1,
                                 "distribution": {"kind": "explicit", "probs": [0.3, 0.7000000001]}})
        assert sc.report_distribution().exact is False

    @pytest.mark.parametrize("doc", [
        {"v": 2},
        {"schema": "other/1"},
        {"schema": SCHEMA, "bogus": 1},
        {"schema": SCHEMA, "v": 2, "j": 3},
        {"schema": SCHEMA, "v": 1, "distribution": {"kind": "explicit", "probs": [0.5, 0.6]}},
        {"schema": SCHEMA, "v": 1, "distribution": {"kind": "explicit", "probs": [1]}},
        {"schema": SCHEMA, "weights": {"kind": "explicit", "entries": [{"x": 0, "W": [1], "weight": 1}]}},
        {"schema": SCHEMA, "seed": -1},
        {"schema": SCHEMA, "experiment": "nope"},
        {"schema": SCHEMA, "n": 1.5},
    ])
    def test_rejects(self, doc):
        with pytest.raises(ScenarioError):
            Scenario.from_dict(doc)

    def test_explicit_weights(self):
        sc = Scenario.from_dict({"schema": SCHEMA, "v": 1, "weights": {
            "kind": "explicit", "entries": [{"x": 0, "W": [0, 1], "weight": "2/3"}]}})
        assert sc.semantic_weights().total(0) == Fraction(2, 3)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCli:
    def test_avg_loss_csv(self, capsys):
        code, out, _ = run(capsys, "avg-loss", "--n", "1")
        assert code == 0
        row = next(csv.DictReader(io.StringIO(out)))
        assert (row["exact"], row["mu_sum"], row["implied_lambda"]) == ("1/3", "2/5", "1/15")

    def test_loss_json_with_config(self, capsys, tmp_path):
        cfg = write(tmp_path, {"schema": SCHEMA, "v": 2, "j": 1,
                               "distribution": {"kind": "explicit", "probs": ["1/10", "1/5", "3/10", "2/5"]}})
        code, out, _ = run(capsys, "loss", "--config", cfg, "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["rows"][-1]["score"] == "41/120"

    def test_flags_before_subcommand(self, capsys):
        code, out, _ = run(capsys, "--format", "json", "universal", "--history", "3,3,1")
        assert code == 0 and json.loads(out)["rows"][0]["mu"] == "11/35"

    def test_summarize(self, capsys):
        code, out, _ = run(capsys, "summarize", "--report", "3")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 2

    def test_mc_seeded(self, capsys, tmp_path):
        out_path = tmp_path / "mc.csv"
        assert main(["mc", "--samples", "2000", "--seed", "5", "--out", str(out_path)]) == 0
        first = out_path.read_text()
        assert main(["mc", "--samples", "2000", "--seed", "5", "--out", str(out_path)]) == 0
        assert out_path.read_text() == first
        assert next(csv.DictReader(io.StringIO(first)))["seed"] == "5"

    def test_converge(self, capsys):
        code, out, _ = run(capsys, "converge", "--n-grid", "1,50", "--trials", "20")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and [r["n"] for r in rows] == ["1", "50"]

    def test_bad_config_exit_code(self, capsys, tmp_path):
        cfg = write(tmp_path, {"schema": SCHEMA, "v": 0})
        code, _, err = run(capsys, "loss", "--config", cfg)
        assert code == 2 and "error" in err
        code, _, _ = run(capsys, "loss", "--config", str(tmp_path / "missing.json"))
        assert code == 2

    def test_cap_exit_code(self, capsys, monkeypatch):
        monkeypatch.setenv("SEMSUM_ENUM_CAP", "10")
        code, _, _ = run(capsys, "avg-loss", "--n", "3")
        assert code == 3

    def test_demo(self, capsys):
        code, out, _ = run(capsys, "demo")
        assert code == 0 and "Typhoon" in out

    def test_verify_quick(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, _, err = run(capsys, "verify", "--format", "json", "--out", str(out_path))
        doc = json.loads(out_path.read_text())
        assert code == 0 and doc["passed"] and "PASS" in err
        assert all(r["seed"] is not None for r in doc["rows"] if r["name"].startswith(("uniform_average_vs_mc", "convergence")))
        assert doc["wall_time"] < 60


class TestWeatherDemo:
    def test_lists_exactly_j_events(self):
        result = weather_demo()
        for row in result["rows"]:
            assert len(row["events"]) == row["j"] == len(row["occurred"])
        assert {(r["j"], r["method"]) for r in result["rows"]} == {(j, m) for j in (2, 3) for m in ("known-p", "universal")}

    def test_typhoon_selected(self):
        fx = load_weather_fixture()
        typhoon_bit = 1 << fx.events.index("Typhoon")
        for j in (2, 3):
            y = known_p_summarize(fx.distribution, fx.current, j, fx.weights)
            assert y.events & typhoon_bit and y.values & typhoon_bit
        assert all("Typhoon" in r["events"] for r in weather_demo()["rows"])

    def test_deterministic(self):
        assert format_weather_demo(weather_demo()) == format_weather_demo(weather_demo())

    def test_fixture_is_a_distribution(self):
        fx = load_weather_fixture()
        assert sum(fx.distribution.probs) == 1
        assert "Illustrative" in fx.provenance
