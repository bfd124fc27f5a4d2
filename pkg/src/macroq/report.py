"""Result record shared by every measure."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class MeasureReport:
    """A measure value with the method that produced it and an error estimate.

    ``error_estimate`` is an absolute bound or a convergence delta, depending
    on the method; ``metadata`` holds conventions and intermediate values.
    """

    value: float
    method: str
    error_estimate: float = 0.0
    metadata: dict[str, Any] = field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)
