"""Command-line front end.

Scenario files are YAML documents::

    generator_x: {family: gumbel_exp, theta: 9}
    generator_y: {family: gumbel_exp, theta: 10}
    baseline1: {family: exponential}
    baseline2: {family: power, params: [400, 2]}
    scales_x: [5, 2]
    scales_y: [6, 3]
    counts_x: [1, 11]
    counts_y: [5, 6]
    extreme: max
    grid: {lo: 0.01, hi: 50, count: 2000, spacing: log}   # optional
    note: free text                                        # optional

Wherever a scenario path is expected, the name of a built-in scenario
(``ex_3_1``, ``ce_3_1``, ...) is accepted as well.

Exit codes: 0 ok / relation holds, 1 relation fails, 2 parse error,
3 evaluation error, 4 inconclusive, 5 soundness red flag.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .baselines import BaselineFamily, make_baseline
from .copula import Family, make_generator
from .errors import ExtremeOrderError, InvalidInput, ScenarioError
from .extremes import Extreme, ExtremeDistribution
from .numerics import DEFAULT_GRID_COUNT, Direction, Grid, Spacing, check_monotone, make_grid
from .orders import (
    CHECKS,
    HAZARD_SLACK,
    PROB_SLACK,
    OrderStatus,
    Relation,
    pair_grid,
    probability_grid,
)
from .theorems import (
    ComparisonScenario,
    audit,
    builtin_scenarios,
    evaluate_theorem,
    theorem_ids,
)

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_PARSE = 2
EXIT_EVAL = 3
EXIT_INCONCLUSIVE = 4
EXIT_RED_FLAG = 5

FIGURE_POINTS = 2000
MAX_FIGURE_RANGE = (0.01, 50.0)
MIN_FIGURE_LO = 0.001
FIGURE_TAIL = 1e-6
CSV_DIGITS = 17

_STATUS_EXIT = {OrderStatus.HOLDS: EXIT_OK, OrderStatus.FAILS: EXIT_FAILS,
                OrderStatus.INCONCLUSIVE: EXIT_INCONCLUSIVE}
_QUANTITIES = ("cdf", "sf", "pdf", "hazard", "rev_hazard")
_REQUIRED = ("generator_x", "generator_y", "baseline1", "baseline2", "scales_x", "scales_y",
             "counts_x", "counts_y", "extreme")
_OPTIONAL = ("grid", "note")


# scenario files ---------------------------------------------------------------

class _Section(dict):
    """Mapping that remembers the source line of each key."""

    def __init__(self, items, lines, line):
        super().__init__(items)
        self.lines = lines
        self.line = line


class _LineLoader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    loader.flatten_mapping(node)
    items, lines = {}, {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        items[key] = loader.construct_object(value_node, deep=True)
        lines[key] = key_node.start_mark.line + 1
    return _Section(items, lines, node.start_mark.line + 1)


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    count: int = DEFAULT_GRID_COUNT
    spacing: Spacing = Spacing.LOG

    def grid(self) -> Grid:
        return make_grid(self.lo, self.hi, self.count, self.spacing)


@dataclass(frozen=True)
class ScenarioFile:
    scenario: ComparisonScenario
    grid: GridSpec | None = None


def _line(section, key):
    return getattr(section, "lines", {}).get(key, getattr(section, "line", None))


def _section(doc, key) -> _Section:
    value = doc[key]
    if not isinstance(value, dict):
        raise ScenarioError("expected a mapping", _line(doc, key), key)
    return value


def _number_pair(doc, key, kind):
    value = doc[key]
    if not isinstance(value, list) or len(value) != 2:
        raise ScenarioError("expected a list of two numbers", _line(doc, key), key)
    try:
        out = tuple(kind(v) for v in value)
    except (TypeError, ValueError):
        raise ScenarioError(f"entries must be {kind.__name__} values", _line(doc, key), key)
    if kind is int and any(isinstance(v, float) and not float(v).is_integer() for v in value):
        raise ScenarioError("counts must be integers", _line(doc, key), key)
    return out


def _generator(doc, key):
    sec = _section(doc, key)
    if "family" not in sec:
        raise ScenarioError("missing 'family'", sec.line, key)
    try:
        fam = Family(str(sec["family"]).lower())
        return make_generator(fam, sec.get("theta"))
    except ValueError as exc:
        raise ScenarioError(str(exc), _line(sec, "family"), f"{key}.family") from None


def _baseline(doc, key):
    sec = _section(doc, key)
    if "family" not in sec:
        raise ScenarioError("missing 'family'", sec.line, key)
    params = sec.get("params", [])
    if not isinstance(params, list):
        raise ScenarioError("params must be a list", _line(sec, "params"), f"{key}.params")
    try:
        return make_baseline(BaselineFamily(str(sec["family"]).lower()), params)
    except (ValueError, TypeError) as exc:
        raise ScenarioError(str(exc), _line(sec, "family"), f"{key}.family") from None


def _grid_spec(doc) -> GridSpec | None:
    if "grid" not in doc or doc["grid"] is None:
        return None
    sec = _section(doc, "grid")
    try:
        spec = GridSpec(float(sec["lo"]), float(sec["hi"]),
                        int(sec.get("count", DEFAULT_GRID_COUNT)),
                        Spacing(str(sec.get("spacing", "log")).lower()))
        spec.grid()
    except KeyError as exc:
        raise ScenarioError(f"missing {exc.args[0]!r}", sec.line, "grid") from None
    except (TypeError, ValueError) as exc:
        raise ScenarioError(str(exc), sec.line, "grid") from None
    return spec


def parse_scenario(text: str) -> ScenarioFile:
    """Parse a scenario document; errors carry line and field diagnostics."""
    try:
        doc = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(f"malformed document: {getattr(exc, 'problem', exc)}",
                            None if mark is None else mark.line + 1) from None
    if not isinstance(doc, dict):
        raise ScenarioError("top level must be a mapping", 1)
    for key in doc:
        if key not in _REQUIRED + _OPTIONAL:
            raise ScenarioError("unknown field", _line(doc, key), str(key))
    for key in _REQUIRED:
        if key not in doc:
            raise ScenarioError("missing required field", None, key)
    gx, gy = _generator(doc, "generator_x"), _generator(doc, "generator_y")
    b1, b2 = _baseline(doc, "baseline1"), _baseline(doc, "baseline2")
    lam = _number_pair(doc, "scales_x", float)
    mu = _number_pair(doc, "scales_y", float)
    n = _number_pair(doc, "counts_x", int)
    nstar = _number_pair(doc, "counts_y", int)
    try:
        extreme = Extreme(str(doc["extreme"]).lower())
    except ValueError:
        raise ScenarioError("must be 'max' or 'min'", _line(doc, "extreme"), "extreme") from None
    note = str(doc.get("note") or "")
    try:
        scenario = ComparisonScenario.build(gx, gy, b1, b2, lam, mu, n, nstar, extreme, note)
    except InvalidInput as exc:
        raise ScenarioError(str(exc)) from None
    return ScenarioFile(scenario, _grid_spec(doc))


def _model_doc(scenario: ComparisonScenario) -> dict:
    def gen(g):
        if g.family is Family.CUSTOM:
            raise ScenarioError("custom generators cannot be written to a scenario file")
        out = {"family": g.family.value}
        if g.theta is not None:
            out["theta"] = float(g.theta)
        return out

    def base(b):
        if b.family is BaselineFamily.CUSTOM or b.scale != 1.0:
            raise ScenarioError("only unit-scale named baselines can be written")
        out = {"family": b.family.value}
        if b.params():
            out["params"] = [float(p) for p in b.params()]
        return out

    x, y = scenario.model_X, scenario.model_Y
    doc = {"generator_x": gen(x.generator), "generator_y": gen(y.generator),
           "baseline1": base(x.baseline1), "baseline2": base(x.baseline2),
           "scales_x": [x.scale1, x.scale2], "scales_y": [y.scale1, y.scale2],
           "counts_x": [x.count1, x.count2], "counts_y": [y.count1, y.count2],
           "extreme": x.extreme.value}
    if scenario.note:
        doc["note"] = scenario.note
    return doc


def dump_scenario(sf: ScenarioFile) -> str:
    """Serialise a scenario so that :func:`parse_scenario` restores it exactly."""
    doc = _model_doc(sf.scenario)
    if sf.grid is not None:
        doc["grid"] = {"lo": sf.grid.lo, "hi": sf.grid.hi, "count": sf.grid.count,
                       "spacing": sf.grid.spacing.value}
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def load_scenario(ref: str) -> ScenarioFile:
    """A scenario from a file path, or a built-in scenario by name."""
    path = Path(ref)
    if not path.exists():
        for name, s, _ in builtin_scenarios():
            if name == ref:
                return ScenarioFile(s)
        raise ScenarioError(f"no such file or built-in scenario: {ref}")
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read {ref}: {exc.strerror}") from None
    return parse_scenario(text)


# output helpers ------------------------------------------------------------------

def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_csv(header, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow(f"{float(v):.{CSV_DIGITS}g}" for v in row)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _grid_from_args(args, fallback: GridSpec | None,
                    default: Grid | None = None) -> GridSpec | None:
    """Command-line overrides applied to the scenario grid, else to ``default``."""
    overrides = (args.grid_lo, args.grid_hi, args.grid_n, args.spacing)
    if all(v is None for v in overrides):
        return fallback
    if fallback is None and default is not None:
        fallback = GridSpec(default.lo, default.hi, default.count, default.spacing)
    if fallback is None and (args.grid_lo is None or args.grid_hi is None):
        raise ScenarioError("--grid-lo and --grid-hi are required when the scenario has no grid")
    base = fallback or GridSpec(args.grid_lo, args.grid_hi)
    spec = GridSpec(base.lo if args.grid_lo is None else args.grid_lo,
                    base.hi if args.grid_hi is None else args.grid_hi,
                    base.count if args.grid_n is None else args.grid_n,
                    base.spacing if args.spacing is None else Spacing(args.spacing))
    try:
        spec.grid()
    except InvalidInput as exc:
        raise ScenarioError(str(exc), field="grid") from None
    return spec


# commands ------------------------------------------------------------------------

def cmd_eval(args) -> int:
    sf = load_scenario(args.scenario)
    model = sf.scenario.model_X if args.side == "x" else sf.scenario.model_Y
    d = ExtremeDistribution(model)
    spec = _grid_from_args(args, sf.grid, d.default_grid())
    grid = d.default_grid() if spec is None else spec.grid()
    values = np.asarray(getattr(d, args.what)(grid.points), dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        x0 = grid.points[np.argmax(bad)]
        print(f"error: {args.what} is not finite at {int(bad.sum())} grid points "
              f"(first at x={x0:.10g})", file=sys.stderr)
        return EXIT_EVAL
    _emit(format_csv(["x", "value"], [grid.points, values]), args.out)
    return EXIT_OK


def default_orientation(extreme: Extreme, rel: Relation) -> bool:
    """True when the registered results state ``Y <= X`` for this extreme and relation.

    Results on maxima, and the star and Lorenz results on minima, conclude
    ``Y <= X``; the remaining results on minima conclude ``X <= Y``.
    """
    return extreme is Extreme.MAX or rel in (Relation.STAR, Relation.LORENZ)


def cmd_compare(args) -> int:
    sf = load_scenario(args.scenario)
    rel = Relation(args.relation)
    s = sf.scenario
    a, b = ExtremeDistribution(s.model_X), ExtremeDistribution(s.model_Y)
    y_first = default_orientation(s.extreme, rel) if args.direction == "auto" \
        else args.direction == "yx"
    lower, upper = (b, a) if y_first else (a, b)
    names = ("Y", "X") if y_first else ("X", "Y")
    if rel in (Relation.STAR, Relation.LORENZ):
        grid = probability_grid(args.grid_n or DEFAULT_GRID_COUNT)
    else:
        spec = _grid_from_args(args, sf.grid, pair_grid(lower, upper))
        grid = pair_grid(lower, upper) if spec is None else spec.grid()
    slack = args.slack
    if slack is None:
        slack = HAZARD_SLACK if rel in (Relation.HR, Relation.RH) else PROB_SLACK
    v = CHECKS[rel](lower, upper, grid, slack)
    print(f"{names[0]} <={rel.value} {names[1]}: {v.status.value}")
    if v.witness is not None:
        print(f"  witness: {v.witness:.10g}")
    print(f"  margin: {v.margin:.6g}  (slack {v.slack:g})")
    print(f"  excluded points: {v.excluded_count} of {grid.count}")
    if v.note:
        print(f"  note: {v.note}")
    print(f"RESULT {v.summary()}")
    return _STATUS_EXIT[v.status]


def cmd_theorem(args) -> int:
    sf = load_scenario(args.scenario)
    report = evaluate_theorem(args.theorem_id, sf.scenario)
    print(report.render())
    print(f"RESULT theorem={report.theorem_id} all_pass={report.all_pass} "
          f"conclusion={report.conclusion_verdict.status.value} consistent={report.consistent}")
    return EXIT_RED_FLAG if report.red_flag else EXIT_OK


@dataclass(frozen=True)
class Figure:
    """One reproduced sub-figure: which quantity is tabulated and what to expect."""

    example: str
    label: str
    kind: str            # cdfs, sfs, cdf_diff, sf_diff, cdf_ratio, sf_ratio
    expectation: str


FIGURES = {
    "ex_3_1": Figure("ex_3_1", "fig1a", "cdfs", "F_Y >= F_X everywhere"),
    "ce_3_1": Figure("ce_3_1", "fig1b", "cdf_diff", "F_X - F_Y takes both signs"),
    "ex_3_2": Figure("ex_3_2", "fig2a", "cdf_ratio", "F_X / F_Y increasing"),
    "ex_3_5": Figure("ex_3_5", "fig2b", "sf_ratio", "S_Y / S_X increasing"),
    "ex_3_4": Figure("ex_3_4", "fig3a", "sf_diff", "S_X - S_Y <= 0 everywhere"),
    "ce_3_2": Figure("ce_3_2", "fig3b", "sfs", "S_X and S_Y cross"),
}


def figure_grid(s: ComparisonScenario, count: int = FIGURE_POINTS) -> Grid:
    """Default plotting range for a built-in scenario.

    Maxima use [0.01, 50].  Minima start at 0.001 and stop where the first of
    the two survival functions falls to 1e-6 (or just inside the smaller
    support end), so that ratios of survival functions stay representable.
    The lower end is lifted inside both supports.
    """
    a, b = ExtremeDistribution(s.model_X), ExtremeDistribution(s.model_Y)
    (la, ha), (lb, hb) = a.support(), b.support()
    if s.extreme is Extreme.MAX:
        lo, hi = MAX_FIGURE_RANGE
    else:
        lo = MIN_FIGURE_LO
        hi = min(0.999 * min(ha, hb), float(a.isf(FIGURE_TAIL)), float(b.isf(FIGURE_TAIL)))
    lo = max(lo, la * (1 + 1e-9), lb * (1 + 1e-9))
    return make_grid(lo, hi, count, Spacing.LOG)


def reproduce(example: str, out_dir: str | os.PathLike, slack: float = PROB_SLACK,
              count: int = FIGURE_POINTS) -> tuple[Path, bool, str]:
    """Write the CSV for ``example``; returns (path, observed, description)."""
    if example not in FIGURES:
        raise InvalidInput(f"unknown example {example!r}; choose from {sorted(FIGURES)}")
    fig = FIGURES[example]
    s = dict((n, sc) for n, sc, _ in builtin_scenarios())[example]
    grid = figure_grid(s, count)
    x = grid.points
    a, b = ExtremeDistribution(s.model_X), ExtremeDistribution(s.model_Y)
    with np.errstate(all="ignore"):
        if fig.kind == "cdfs":
            fx, fy = a.cdf(x), b.cdf(x)
            cols, header = [fx, fy], ["cdf_x", "cdf_y"]
            observed = bool(np.min(fy - fx) >= -slack)
        elif fig.kind == "sfs":
            sx, sy = a.sf(x), b.sf(x)
            cols, header = [sx, sy], ["sf_x", "sf_y"]
            diff = sx - sy
            observed = bool(diff.max() > slack and diff.min() < -slack)
        elif fig.kind == "cdf_diff":
            diff = a.cdf(x) - b.cdf(x)
            cols, header = [diff], ["cdf_x_minus_cdf_y"]
            observed = bool(diff.max() > slack and diff.min() < -slack)
        elif fig.kind == "sf_diff":
            diff = a.sf(x) - b.sf(x)
            cols, header = [diff], ["sf_x_minus_sf_y"]
            observed = bool(diff.max() <= slack)
        elif fig.kind == "cdf_ratio":
            ratio = np.exp(a.log_cdf(x) - b.log_cdf(x))
            cols, header = [ratio], ["cdf_x_over_cdf_y"]
            observed = check_monotone(ratio, grid, Direction.INCREASING, slack).passed
        else:
            ratio = np.exp(b.log_sf(x) - a.log_sf(x))
            cols, header = [ratio], ["sf_y_over_sf_x"]
            observed = check_monotone(ratio, grid, Direction.INCREASING, slack).passed
    path = Path(out_dir) / f"{fig.label}_{example}.csv"
    write_atomic(path, format_csv(["x"] + header, [x] + cols))
    return path, observed, fig.expectation


def cmd_reproduce(args) -> int:
    examples = sorted(FIGURES) if args.example == "all" else [args.example]
    out_dir = args.out or "."
    slack = PROB_SLACK if args.slack is None else args.slack
    status = EXIT_OK
    for ex in examples:
        path, observed, expectation = reproduce(ex, out_dir, slack, args.grid_n or FIGURE_POINTS)
        print(f"{ex}: wrote {path}")
        print(f"RESULT example={ex} expected=\"{expectation}\" "
              f"observed={'yes' if observed else 'no'}")
        if not observed:
            status = EXIT_FAILS
    return status


def cmd_audit(args) -> int:
    res = audit(args.count, args.seed)
    print(f"reports: {len(res.reports)}  all-hypotheses-pass claims: {res.claims}  "
          f"red flags: {len(res.red_flags)}")
    for name, r in res.red_flags:
        print(f"RED FLAG {name} {r.theorem_id}: {r.conclusion_verdict.summary()}")
    if args.out:
        rows = io.StringIO()
        w = csv.writer(rows, lineterminator="\n")
        w.writerow(["scenario", "theorem", "all_pass", "failing", "conclusion", "margin",
                    "red_flag"])
        for name, r in res.reports:
            c = r.conclusion_verdict
            w.writerow([name, r.theorem_id, r.all_pass, len(r.failing), c.status.value,
                        f"{c.margin:.6g}", r.red_flag])
        write_atomic(args.out, rows.getvalue())
    print(f"RESULT reports={len(res.reports)} claims={res.claims} red_flags={len(res.red_flags)}")
    return EXIT_RED_FLAG if res.red_flags else EXIT_OK


def cmd_scaffold(args) -> int:
    name = args.from_builtin or "ex_3_1"
    s = dict((n, sc) for n, sc, _ in builtin_scenarios()).get(name)
    if s is None:
        raise ScenarioError(f"unknown built-in scenario {name!r}")
    spec = _grid_from_args(args, None)
    _emit(dump_scenario(ScenarioFile(s, spec)), args.out)
    return EXIT_OK


# parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid-lo", type=float, default=None)
    common.add_argument("--grid-hi", type=float, default=None)
    common.add_argument("--grid-n", type=int, default=None)
    common.add_argument("--spacing", choices=[s.value for s in Spacing], default=None)
    common.add_argument("--slack", type=float, default=None)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--out", default=None, help="output file (directory for reproduce)")

    p = argparse.ArgumentParser(prog="extremeorder",
                                description="Stochastic orders for extremes of dependent "
                                            "multiple-outlier samples.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="tabulate a function of X or Y")
    e.add_argument("scenario")
    e.add_argument("what", choices=_QUANTITIES)
    e.add_argument("--side", choices=["x", "y"], default="x")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("compare", parents=[common], help="check an order between X and Y")
    c.add_argument("scenario")
    c.add_argument("relation", choices=[r.value for r in Relation])
    c.add_argument("--direction", choices=["auto", "xy", "yx"], default="auto",
                   help="xy checks X <= Y, yx checks Y <= X; auto follows the orientation "
                        "of the registered results (Y <= X for maxima and for star/Lorenz)")
    c.set_defaults(func=cmd_compare)

    t = sub.add_parser("theorem", parents=[common], help="evaluate a registered result")
    t.add_argument("scenario")
    t.add_argument("theorem_id", type=str.upper,
                   choices=theorem_ids(include_aliases=True), metavar="THEOREM_ID")
    t.set_defaults(func=cmd_theorem)

    r = sub.add_parser("reproduce", parents=[common], help="write figure CSVs")
    r.add_argument("example", choices=sorted(FIGURES) + ["all"])
    r.set_defaults(func=cmd_reproduce)

    a = sub.add_parser("audit", parents=[common], help="soundness audit of the registry")
    a.add_argument("--count", type=int, default=100)
    a.set_defaults(func=cmd_audit)

    s = sub.add_parser("scaffold", parents=[common], help="write a scenario template")
    s.add_argument("--from", dest="from_builtin", default=None,
                   help="built-in scenario to copy (default ex_3_1)")
    s.set_defaults(func=cmd_scaffold)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ExtremeOrderError as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except (ArithmeticError, ValueError) as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
