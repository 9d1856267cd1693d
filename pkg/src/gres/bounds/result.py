from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

RESOURCES = ("nonclassicality", "entanglement")
#: relative crossing of lower over upper treated as round-off
ROUNDOFF = 1e-9


def check_resource(resource: str) -> str:
    from ..exceptions import InvalidArgument

    if resource not in RESOURCES:
        raise InvalidArgument(f"resource must be one of {RESOURCES}, got {resource!r}")
    return resource


@dataclass(frozen=True)
class BoundResult:
    """One bound (lower or upper) with provenance."""

    value: float
    method: str
    converged: bool = True
    point: tuple = ()
    evaluations: int = 0

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class RobustnessBounds:
    resource: str
    lower: float
    upper: float
    lower_method: str
    upper_method: str
    converged: bool = True
    metadata: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def log_lower(self) -> float:
        return float(np.log(self.lower))

    @property
    def log_upper(self) -> float:
        return float(np.log(self.upper))

    @property
    def log_gap(self) -> float:
        return self.log_upper - self.log_lower

    @property
    def ordered(self) -> bool:
        return self.lower <= self.upper + 1e-6

    def to_dict(self, metadata: bool = False) -> dict:
        out = {
            "resource": self.resource,
            "lower": self.lower,
            "upper": self.upper,
            "gap": self.gap,
            "lower_method": self.lower_method,
            "upper_method": self.upper_method,
            "converged": self.converged,
        }
        if metadata:
            out["metadata"] = dict(self.metadata)
        return out


def combine(
    resource: str,
    lower: BoundResult,
    upper: BoundResult,
    metadata: Optional[dict] = None,
) -> RobustnessBounds:
    lo = max(float(lower.value), 1.0)
    hi = max(float(upper.value), 1.0)
    metadata = dict(metadata or {})
    if hi < lo <= hi * (1.0 + ROUNDOFF):
        # both bounds hit the same value; the crossing is round-off
        metadata["rounded_crossing"] = lo - hi
        lo = hi
    return RobustnessBounds(
        resource=resource,
        lower=lo,
        upper=hi,
        lower_method=lower.method,
        upper_method=upper.method,
        converged=bool(lower.converged and upper.converged),
        metadata=metadata,
    )
