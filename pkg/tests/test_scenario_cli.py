"""Scenario ingestion and the command-line interface."""

import json
from fractions import Fraction

import pytest

from prodex.cli import main
from prodex.errors import ScenarioError
from prodex.scenario import BUILTIN_SCENARIOS, load_scenario, parse_scenario

F = Fraction

MINIMAL = """
{
  "name": "minimal",
  "spaces": {"head": [], "tail": {"symbols": [0, 1]}},
  "measure": {"head": [[0.25, 0.75]],
              "tail": {"kind": "constant", "weights": [0.5, 0.5]}},
  "function": {"family": "cylinder", "depth": 1,
               "table": [{"prefix": [0], "value": 0},
                          {"prefix": [1], "value": 1}]},
  "points": {"one": {"kind": "described", "head": [],
                      "tail": {"kind": "constant_symbol", "symbol": 1}}}
}
"""


class TestScenarioParsing:
    def test_minimal_scenario_decimal_exactness(self):
        sc = parse_scenario(MINIMAL)
        assert sc.measure.coordinate_measure(1).weight_of(1) == F(3, 4)
        assert sc.measure.coordinate_measure(5).weight_of(1) == F(1, 2)
        assert sc.function.table[(1,)] == 1
        assert sc.point("one").coordinate(3) == 1

    def test_builtins_all_load(self):
        for name in BUILTIN_SCENARIOS:
            sc = load_scenario(name)
            assert sc.name == name
            assert sc.digest

    def test_malformed_weights_name_the_coordinate(self):
        bad = MINIMAL.replace("[0.25, 0.75]", "[0.25, 0.65]")
        with pytest.raises(ScenarioError, match="coordinate 1"):
            parse_scenario(bad)

    def test_json_error_carries_line(self):
        with pytest.raises(ScenarioError, match="line"):
            parse_scenario("{\n  broken\n}")

    def test_unknown_point_lists_known_names(self):
        sc = parse_scenario(MINIMAL)
        with pytest.raises(ScenarioError, match="one"):
            sc.point("missing")

    def test_unknown_builtin_or_path(self):
        with pytest.raises(ScenarioError, match="built-in"):
            load_scenario("definitely-not-a-scenario")

    def test_invalid_seed_rejected(self):
        bad = MINIMAL.replace(
            '{"kind": "described", "head": [],\n                      '
            '"tail": {"kind": "constant_symbol", "symbol": 1}}',
            '{"kind": "lazy", "seed": -3}')
        with pytest.raises(ScenarioError, match="64-bit"):
            parse_scenario(bad)

    def test_example_scenario_semantics(self):
        sc = load_scenario("example-3-4")
        assert sc.measure.coordinate_measure(3).weight_of(1) == F(7, 8)
        assert sc.function.family == "product_indicator"
        assert sc.threshold("verify-strong", "min_certified_fraction") == \
            F(98, 100)


class TestCli:
    def test_expect_text_report(self, capsys):
        code = main(["expect", "example-3-4"])
        out = capsys.readouterr().out
        assert code == 0
        assert "0.2887880950" in out
        assert "certified" in out

    def test_expect_machine_report_fields(self, capsys):
        code = main(["expect", "example-3-4", "--report", "machine"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert payload["schema_version"] == 1
        result = payload["result"]
        assert {"lo", "hi", "status", "nodes_expanded"} <= set(result)
        assert result["status"] == "certified"
        assert abs(result["lo"] - 0.2887880950866024) < 1e-12

    def test_strong_approx_found_six(self, capsys):
        code = main(["strong-approx", "example-3-4", "--point", "all-ones",
                     "--epsilon", "0.01"])
        out = capsys.readouterr().out
        assert code == 0
        assert "Found(6)" in out

    def test_gn_trace_two_column_block(self, capsys):
        code = main(["gn-trace", "example-3-4", "--point", "all-ones",
                     "--n-max", "4"])
        out = capsys.readouterr().out.splitlines()
        assert code == 0
        rows = [line.split() for line in out if line and line[0].isdigit()]
        assert [r[0] for r in rows] == ["1", "2", "3", "4"]
        assert float(rows[1][1]) == 0.5

    def test_weak_approx_emits_exact_rational_alpha(self, capsys):
        code = main(["weak-approx", "cylinder-mix", "--depth", "2",
                     "--seed", "7", "--report", "machine"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        result = payload["result"]
        num, den = result["alpha_rational"].split("/")
        assert 0 <= int(num) <= int(den)
        assert result["achieved"] == 0.5

    def test_weak_approx_r_override(self, capsys):
        code = main(["weak-approx", "cylinder-mix", "--depth", "2",
                     "--seed", "7", "--r", "0.3", "--report", "machine"])
        payload = json.loads(capsys.readouterr().out)
        assert code == 0
        assert payload["result"]["achieved"] == 0.3
        assert payload["result"]["achieved_rational"] == "3/10"

    def test_cylinder_table_completeness_checked(self, tmp_path, capsys):
        incomplete = MINIMAL.replace(
            '{"prefix": [0], "value": 0},\n                          ', "")
        bad = tmp_path / "incomplete.json"
        bad.write_text(incomplete)
        code = main(["expect", str(bad)])
        assert code == 2
        assert "misses prefix" in capsys.readouterr().err

    def test_verify_strong_threshold_met(self, capsys):
        code = main(["verify-strong", "discounted-uniform",
                     "--samples", "50", "--seed", "5"])
        out = capsys.readouterr().out
        assert code == 0
        assert "certified_fraction   1.0" in out

    def test_verify_weak_exit_zero(self, capsys):
        code = main(["verify-weak", "cylinder-mix", "--samples", "40",
                     "--seed", "5"])
        assert code == 0

    def test_verify_strong_threshold_miss_exit_one(self, capsys):
        # epsilon far below any reachable gap within three indices: every
        # sample fails and the scenario's 0.98 threshold is missed
        code = main(["verify-strong", "example-3-4", "--epsilon", "0.000001",
                     "--n-max", "3", "--samples", "5", "--seed", "1"])
        out = capsys.readouterr().out
        assert code == 1
        assert "MISSED" in out

    def test_game_value(self, capsys):
        code = main(["game", "purify-demo", "value"])
        out = capsys.readouterr().out
        assert code == 0 and "0.5" in out

    def test_game_purify(self, capsys):
        code = main(["game", "purify-demo", "purify", "--seed", "3"])
        out = capsys.readouterr().out
        assert code == 0
        assert "switch index n = 2" in out

    def test_game_naming_demo(self, capsys):
        code = main(["game", "naming-game", "naming-demo", "--samples", "10"])
        out = capsys.readouterr().out
        assert code == 0
        assert "payoff 1 each: True" in out

    def test_validation_error_exit_two(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(MINIMAL.replace("[0.25, 0.75]", "[0.4, 0.5]"))
        code = main(["expect", str(bad)])
        err = capsys.readouterr().err
        assert code == 2
        assert "coordinate 1" in err

    def test_report_files_written_side_by_side(self, tmp_path, capsys):
        code = main(["expect", "example-3-4", "--report-dir", str(tmp_path)])
        assert code == 0
        txt = tmp_path / "expect-example-3-4.txt"
        js = tmp_path / "expect-example-3-4.json"
        assert txt.exists() and js.exists()
        payload = json.loads(js.read_text())
        assert payload["command"] == "expect"
        assert payload["scenario_digest"]

    def test_machine_reports_byte_identical_across_runs(self, tmp_path):
        outs = []
        for run in ("a", "b"):
            d = tmp_path / run
            main(["verify-strong", "discounted-uniform", "--samples", "30",
                  "--seed", "21", "--report-dir", str(d)])
            outs.append(
                (d / "verify-strong-discounted-uniform.json").read_bytes())
        assert outs[0] == outs[1]

    def test_machine_reports_byte_identical_across_thread_counts(self, tmp_path):
        outs = []
        for run, threads in (("a", "1"), ("b", "4")):
            d = tmp_path / run
            main(["verify-weak", "cylinder-mix", "--samples", "30",
                  "--seed", "21", "--threads", threads,
                  "--report-dir", str(d)])
            outs.append((d / "verify-weak-cylinder-mix.json").read_bytes())
        assert outs[0] == outs[1]
