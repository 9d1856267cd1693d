"""Robustness bounds: lambda pipeline, upper/lower bound searches, closed forms."""

from .dispatch import robustness
from .families import GHZ
from .lambda_ import LambdaContext, lambda_context, lambda_fast, lambda_or_inf, lambda_upper
from .lower import lower_bound_charted, lower_bound_witness
from .result import BoundResult, RobustnessBounds
from .upper import upper_bound

__all__ = [
    "GHZ",
    "BoundResult",
    "LambdaContext",
    "RobustnessBounds",
    "lambda_context",
    "lambda_fast",
    "lambda_or_inf",
    "lambda_upper",
    "lower_bound_charted",
    "lower_bound_witness",
    "robustness",
    "upper_bound",
]
