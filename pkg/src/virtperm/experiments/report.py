"""Structured experiment output."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Optional

_SERIES = re.compile(r"^(?P<name>[^\[]+)\[N=(?P<n>\d+)\]$")


@dataclass
class ExperimentReport:
    name: str
    params: dict[str, Any]
    seed: int
    statistics: list[tuple[str, Any]]
    passed: bool
    tolerance: float
    samples: Optional[str] = None  # CSV payload

    def stat(self, label: str):
        for k, v in self.statistics:
            if k == label:
                return v
        raise KeyError(label)

    def series(self) -> dict[str, list[tuple[int, float]]]:
        """Per-N statistics, keyed by series name (labels ``name[N=...]``)."""
        out: dict[str, list[tuple[int, float]]] = {}
        for label, value in self.statistics:
            m = _SERIES.match(label)
            if m:
                out.setdefault(m["name"], []).append((int(m["n"]), float(value)))
        for pts in out.values():
            pts.sort()
        return out

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "params": self.params,
            "seed": self.seed,
            "statistics": [[k, v] for k, v in self.statistics],
            "pass": self.passed,
            "tolerance": self.tolerance,
        }
        if self.samples is not None:
            d["samples"] = self.samples
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(d["name"], d["params"], int(d["seed"]),
                   [(k, v) for k, v in d["statistics"]], bool(d["pass"]),
                   float(d["tolerance"]), d.get("samples"))

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        return cls.from_dict(json.loads(text))

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.name}: {verdict} (seed={self.seed})"
