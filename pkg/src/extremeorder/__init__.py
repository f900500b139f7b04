"""Extremes of dependent multiple-outlier scale models and their stochastic orders."""

from .baselines import (
    Baseline,
    BaselineFamily,
    CustomBaseline,
    Exponential,
    Kummer,
    LomaxHalf,
    Pareto,
    Power,
    make_baseline,
)
from .copula import CustomGenerator, Family, Generator, GumbelExp, Independence, LogExp, make_generator
from .errors import (
    BracketError,
    CapError,
    EvaluationError,
    ExtremeOrderError,
    InvalidInput,
    QuadratureError,
    ScenarioError,
)
from .extremes import Extreme, ExtremeDistribution, MultipleOutlierModel
from .numerics import Grid, ShapeVerdict, Spacing, Status, make_grid
from .orders import OrderStatus, OrderVerdict, Relation, check_order
from .theorems import (
    ComparisonScenario,
    ConditionReport,
    audit,
    builtin_scenarios,
    evaluate_theorem,
    random_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "Baseline", "BaselineFamily", "CustomBaseline", "Exponential", "Kummer", "LomaxHalf",
    "Pareto", "Power", "make_baseline",
    "CustomGenerator", "Family", "Generator", "GumbelExp", "Independence", "LogExp",
    "make_generator",
    "BracketError", "CapError", "EvaluationError", "ExtremeOrderError", "InvalidInput",
    "QuadratureError", "ScenarioError",
    "Extreme", "ExtremeDistribution", "MultipleOutlierModel",
    "Grid", "ShapeVerdict", "Spacing", "Status", "make_grid",
    "OrderStatus", "OrderVerdict", "Relation", "check_order",
    "ComparisonScenario", "ConditionReport", "audit", "builtin_scenarios", "evaluate_theorem",
    "random_scenario",
]
