"""Piecewise-linear test functions for linear statistics of point processes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class TestFunction:
    """Continuous, non-negative, compactly supported, linear between knots.

    Zero outside ``[knots[0], knots[-1]]``; the end values must be 0.
    """

    __test__ = False  # not a pytest class

    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        knots = tuple(float(k) for k in self.knots)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        if len(knots) < 2 or len(knots) != len(values):
            raise ValidationError("need at least two knots and one value per knot")
        if any(a >= b for a, b in zip(knots, knots[1:])):
            raise ValidationError("knots must be strictly increasing")
        if any(v < 0 for v in values):
            raise ValidationError("test functions are non-negative")
        if values[0] != 0.0 or values[-1] != 0.0:
            raise ValidationError("test functions vanish at the ends of their support")

    @classmethod
    def triangle(cls, center: float, half_width: float, height: float = 1.0) -> "TestFunction":
        return cls((center - half_width, center, center + half_width), (0.0, height, 0.0))

    def __call__(self, x):
        y = np.interp(x, self.knots, self.values, left=0.0, right=0.0)
        return float(y) if np.ndim(y) == 0 else y

    @property
    def support(self) -> tuple[float, float]:
        return self.knots[0], self.knots[-1]

    def to_dict(self) -> dict:
        return {"knots": list(self.knots), "values": list(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> "TestFunction":
        return cls(tuple(d["knots"]), tuple(d["values"]))
