"""Numerical geometric and extensor calculus on a coordinate chart."""
__version__ = "0.1.0"

from .multivector import Multivector
from .expr import ParseError, EvaluationError, parse_expr
from .fields import Chart, EvalContext, Field
from .connection import ConnectionField
from .metric import MetricField
from .hodge import HodgeStar

__all__ = [
    "__version__", "Multivector", "ParseError", "EvaluationError", "parse_expr",
    "Chart", "EvalContext", "Field", "ConnectionField", "MetricField", "HodgeStar",
]
