import csv

import numpy as np
import pytest

from extremeorder import cli
from extremeorder.errors import ScenarioError
from extremeorder.numerics import ShapeVerdict, Status
from extremeorder.orders import OrderStatus, OrderVerdict, Relation
from extremeorder.theorems import ConditionReport, Side, builtin_scenarios

SCENARIO = """\
generator_x: {family: gumbel_exp, theta: 9}
generator_y: {family: gumbel_exp, theta: 10}
baseline1: {family: exponential}
baseline2: {family: kummer}
scales_x: [5, 2]
scales_y: [6, 3]
counts_x: [1, 11]
counts_y: [5, 6]
extreme: max
"""


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.fixture
def scenario_file(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text(SCENARIO)
    return str(p)


class TestScenarioFiles:
    def test_parse(self):
        sf = cli.parse_scenario(SCENARIO)
        assert sf.scenario.model_X.counts == (1, 11)
        assert sf.scenario.model_Y.scales == (6.0, 3.0)
        assert sf.grid is None

    @pytest.mark.parametrize("name", [n for n, _, _ in builtin_scenarios()])
    def test_scaffold_round_trip(self, name, tmp_path):
        out = tmp_path / "s.yaml"
        assert cli.main(["scaffold", "--from", name, "--out", str(out)]) == 0
        parsed = cli.parse_scenario(out.read_text())
        original = dict((n, s) for n, s, _ in builtin_scenarios())[name]
        assert parsed.scenario == original

    def test_grid_round_trip(self):
        sf = cli.ScenarioFile(cli.parse_scenario(SCENARIO).scenario,
                              cli.GridSpec(0.5, 9.0, 77, cli.Spacing.LINEAR))
        assert cli.parse_scenario(cli.dump_scenario(sf)) == sf

    def test_unknown_field_line(self):
        with pytest.raises(ScenarioError) as err:
            cli.parse_scenario(SCENARIO + "colour: red\n")
        assert err.value.line == 10

    def test_bad_family_line(self):
        text = SCENARIO.replace("family: kummer", "family: weibull")
        with pytest.raises(ScenarioError) as err:
            cli.parse_scenario(text)
        assert err.value.line == 4

    def test_fractional_count(self):
        with pytest.raises(ScenarioError) as err:
            cli.parse_scenario(SCENARIO.replace("[1, 11]", "[1.5, 11]"))
        assert err.value.line == 7

    def test_missing_field(self):
        with pytest.raises(ScenarioError):
            cli.parse_scenario(SCENARIO.replace("extreme: max\n", ""))

    def test_malformed_yaml(self):
        with pytest.raises(ScenarioError) as err:
            cli.parse_scenario("generator_x: [1,\n")
        assert err.value.line is not None

    def test_builtin_name(self):
        assert cli.load_scenario("ex_3_2").scenario.extreme.value == "max"


class TestEval:
    def test_cdf_monotone(self, tmp_path):
        out = tmp_path / "cdf.csv"
        assert cli.main(["eval", "ex_3_1", "cdf", "--out", str(out)]) == 0
        header, rows = read_csv(out)
        assert header == ["x", "value"]
        assert np.all(np.diff(rows[:, 1]) >= 0)

    def test_sf_nonincreasing(self, tmp_path):
        out = tmp_path / "sf.csv"
        assert cli.main(["eval", "ex_3_4", "sf", "--side", "y", "--out", str(out)]) == 0
        _, rows = read_csv(out)
        assert np.all(np.diff(rows[:, 1]) <= 0)

    def test_pdf_trapezoid(self, tmp_path):
        out = tmp_path / "pdf.csv"
        assert cli.main(["eval", "ex_3_4", "pdf", "--grid-n", "20000", "--out", str(out)]) == 0
        _, rows = read_csv(out)
        x, f = rows[:, 0], rows[:, 1]
        assert np.sum(np.diff(x) * (f[1:] + f[:-1]) / 2) == pytest.approx(1.0, abs=1e-3)

    def test_file_scenario(self, scenario_file, capsys):
        assert cli.main(["eval", scenario_file, "hazard", "--grid-n", "5"]) == 0
        assert len(capsys.readouterr().out.strip().splitlines()) == 6

    def test_non_finite_exit(self):
        # the X minimum lives on (0, 200]; hazard is undefined beyond
        assert cli.main(["eval", "ex_3_4", "hazard", "--grid-lo", "1", "--grid-hi", "300",
                         "--grid-n", "50"]) == cli.EXIT_EVAL

    def test_parse_error_exit(self, tmp_path, capsys):
        p = tmp_path / "bad.yaml"
        p.write_text(SCENARIO.replace("[5, 2]", "[5]"))
        assert cli.main(["eval", str(p), "cdf"]) == cli.EXIT_PARSE
        assert "line 5" in capsys.readouterr().err

    def test_missing_file(self):
        assert cli.main(["eval", "/nonexistent/x.yaml", "cdf"]) == cli.EXIT_PARSE


class TestCompare:
    @pytest.mark.parametrize("name,rel,code", [
        ("ex_3_1", "st", 0), ("ce_3_1", "st", 1), ("ex_3_2", "rh", 0),
        ("ex_3_4", "st", 0), ("ce_3_2", "st", 1), ("ex_3_5", "hr", 0),
    ])
    def test_examples(self, name, rel, code, capsys):
        assert cli.main(["compare", name, rel]) == code
        out = capsys.readouterr().out
        assert out.strip().splitlines()[-1].startswith("RESULT relation=" + rel)
        if code == 1:
            assert "witness" in out

    def test_direction_flag(self, capsys):
        assert cli.main(["compare", "ex_3_1", "st", "--direction", "xy"]) == 1
        assert "X <=st Y" in capsys.readouterr().out

    def test_inconclusive(self, tmp_path):
        p = tmp_path / "heavy.yaml"
        text = (SCENARIO.replace("family: exponential", "family: pareto, params: [0.8, 1]")
                .replace("family: kummer", "family: pareto, params: [0.7, 1]"))
        p.write_text(text)
        assert cli.main(["compare", str(p), "lorenz"]) == cli.EXIT_INCONCLUSIVE


class TestTheorem:
    @pytest.mark.parametrize("name,tid", [("ex_3_1", "MAX_ST_COMBINED"),
                                          ("ce_3_2", "MIN_ST_COMBINED"),
                                          ("ex_3_5", "min_hr_combined")])
    def test_exit_zero(self, name, tid, capsys):
        assert cli.main(["theorem", name, tid]) == 0
        assert "consistent=True" in capsys.readouterr().out

    def test_ce_3_2_rows(self, capsys):
        cli.main(["theorem", "ce_3_2", "MIN_ST_COMBINED"])
        out = capsys.readouterr().out
        rows = [l for l in out.splitlines() if " FAIL " in l]
        assert len(rows) == 2

    def test_red_flag_exit(self, monkeypatch):
        hyps = (("h", ShapeVerdict(Status.PASS, margin=1.0)),)
        verdict = OrderVerdict(Relation.ST, OrderStatus.FAILS, witness=1.0, margin=-0.5)
        report = ConditionReport("MAX_ST_COMBINED", hyps, (Relation.ST, Side.Y_NSTAR, Side.X_N),
                                 verdict)
        monkeypatch.setattr(cli, "evaluate_theorem", lambda *a, **k: report)
        assert cli.main(["theorem", "ex_3_1", "MAX_ST_COMBINED"]) == cli.EXIT_RED_FLAG

    def test_wrong_extreme(self):
        assert cli.main(["theorem", "ex_3_1", "MIN_ST_COMBINED"]) == cli.EXIT_EVAL


class TestReproduce:
    def test_all(self, tmp_path, capsys):
        assert cli.main(["reproduce", "all", "--out", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert out.count("observed=yes") == 6
        assert len(list(tmp_path.glob("fig*.csv"))) == 6

    def test_ce_3_1_both_signs(self, tmp_path):
        path, observed, _ = cli.reproduce("ce_3_1", tmp_path)
        _, rows = read_csv(path)
        assert observed and rows[:, 1].max() > 1e-6 and rows[:, 1].min() < -1e-6

    def test_ex_3_2_ratio_increasing(self, tmp_path):
        path, _, _ = cli.reproduce("ex_3_2", tmp_path)
        _, rows = read_csv(path)
        assert np.all(np.diff(rows[:, 1]) >= -1e-8)

    def test_ex_3_4_difference(self, tmp_path):
        path, _, _ = cli.reproduce("ex_3_4", tmp_path)
        _, rows = read_csv(path)
        assert rows[:, 1].max() <= 1e-8


class TestAuditCommand:
    def test_small(self, tmp_path, capsys):
        out = tmp_path / "audit.csv"
        assert cli.main(["audit", "--count", "2", "--out", str(out)]) == 0
        assert "red_flags=0" in capsys.readouterr().out
        with open(out) as fh:
            assert fh.readline().startswith("scenario,theorem")
