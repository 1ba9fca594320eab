"""Finite point processes on the real line with a special zero location."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Callable, Union

from .errors import ValidationError


class _Infinite:
    """Marker for an infinite multiplicity at zero."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()

ZeroMultiplicity = Union[int, _Infinite]


@dataclass(frozen=True)
class PointProcess:
    """Atoms ``(location, multiplicity)`` sorted by location, zero excluded.

    The multiplicity of the location 0 is carried separately by
    ``zero_multiplicity``, which may be ``INFINITE``.
    """

    atoms: tuple[tuple[float, int], ...]
    zero_multiplicity: ZeroMultiplicity = 0

    def __post_init__(self):
        atoms = tuple((float(x), int(m)) for x, m in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        for i, (x, m) in enumerate(atoms):
            if x == 0.0 or not math.isfinite(x):
                raise ValidationError(f"atom location must be finite and non-zero, got {x}")
            if m < 1:
                raise ValidationError(f"multiplicity must be positive, got {m}")
            if i and atoms[i - 1][0] >= x:
                raise ValidationError("atom locations must be strictly increasing")
        z = self.zero_multiplicity
        if z is not INFINITE and (not isinstance(z, int) or z < 0):
            raise ValidationError(f"zero multiplicity must be a non-negative int or INFINITE, got {z!r}")

    @classmethod
    def from_counts(cls, counts: dict, zero_multiplicity: ZeroMultiplicity = 0) -> "PointProcess":
        return cls(tuple(sorted((x, m) for x, m in counts.items() if m)), zero_multiplicity)

    @property
    def locations(self) -> list[float]:
        return [x for x, _ in self.atoms]

    def total_mass(self) -> ZeroMultiplicity:
        if self.zero_multiplicity is INFINITE:
            return INFINITE
        return self.zero_multiplicity + sum(m for _, m in self.atoms)

    def restrict(self, lo: float, hi: float) -> "PointProcess":
        """Atoms with ``lo <= x <= hi``; zero is kept iff the window contains it."""
        atoms = tuple((x, m) for x, m in self.atoms if lo <= x <= hi)
        zero = self.zero_multiplicity if lo <= 0.0 <= hi else 0
        return PointProcess(atoms, zero)

    def linear_statistic(self, f: Callable[[float], float]) -> float:
        """``sum_gamma m(gamma) f(gamma)``, the zero atom included."""
        total = math.fsum(m * float(f(x)) for x, m in self.atoms)
        f0 = float(f(0.0))
        if f0 != 0.0:
            if self.zero_multiplicity is INFINITE:
                raise ValidationError("infinite limit: f(0) != 0 but zero has infinite multiplicity")
            total += f0 * self.zero_multiplicity
        return total

    # serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        zero = "inf" if self.zero_multiplicity is INFINITE else self.zero_multiplicity
        return {"zero": zero, "atoms": [[x, m] for x, m in self.atoms]}

    @classmethod
    def from_dict(cls, data: dict) -> "PointProcess":
        zero = data["zero"]
        zero = INFINITE if zero == "inf" else int(zero)
        return cls(tuple((float(x), int(m)) for x, m in data["atoms"]), zero)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PointProcess":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """``location,multiplicity`` rows; the zero row (``inf`` allowed) comes
        in sorted position and is omitted when its multiplicity is 0."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["location", "multiplicity"])
        rows = list(self.atoms)
        if self.zero_multiplicity is INFINITE or self.zero_multiplicity:
            zero = "inf" if self.zero_multiplicity is INFINITE else self.zero_multiplicity
            rows.append((0.0, zero))
            rows.sort(key=lambda r: r[0])
        for x, m in rows:
            w.writerow([repr(x), m])
        return buf.getvalue()
