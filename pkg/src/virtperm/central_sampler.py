"""Samplers for central measures on virtual permutations.

A central measure is described by a law on non-increasing sequences
``lambda`` with ``sum(lambda) <= 1``.  Given ``lambda``, each element id is
sent independently to a point of a space made of circles of perimeters
``lambda_k`` plus a "dust" part of total mass ``1 - sum(lambda)``; the
permutation on any finite set of ids maps a point to the next one met when
turning counterclockwise on its circle.

Randomness comes from :class:`virtperm.rng.Stream`: the point of element
``x`` depends only on the stream key and ``x``, so configurations over nested
sets are restrictions of one another.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import PreconditionError, ValidationError
from .perm_core import Permutation
from .rng import as_stream, keyed_uniforms

SUM_TOL = 1e-12

# counter slots; positions use slot = attempt number (0 unless a collision)
_GEM_SLOT = 1 << 20
_CRP_SLOT = (1 << 20) + 1
_GEM_BLOCK = 32

# exceeds every perimeter; only used to rank counterclockwise gaps
_TURN = 2.0


@dataclass(frozen=True)
class LambdaSequence:
    """Truncated asymptotic cycle lengths plus the leftover mass ``dust``."""

    values: tuple[float, ...]
    dust: float

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dust", float(self.dust))
        if any(not 0.0 < v <= 1.0 for v in values):
            raise ValidationError(f"lambda values must lie in (0, 1]: {values}")
        if any(a < b for a, b in zip(values, values[1:])):
            raise ValidationError("lambda values must be non-increasing")
        if not 0.0 <= self.dust <= 1.0:
            raise ValidationError(f"dust must lie in [0, 1], got {self.dust}")
        if abs(math.fsum(values) + self.dust - 1.0) > SUM_TOL:
            raise ValidationError("lambda values and dust must sum to 1")

    def __len__(self):
        return len(self.values)

    def perimeter(self, k: int) -> float:
        """Perimeter of circle ``k`` (1-based)."""
        if not 1 <= k <= len(self.values):
            raise PreconditionError(f"no circle {k} (have {len(self.values)})")
        return self.values[k - 1]


def make_lambda(values: Iterable[float]) -> LambdaSequence:
    """Validate, sort descending and compute the dust of a finite sequence."""
    vals = [float(v) for v in values]
    for v in vals:
        if not 0.0 < v <= 1.0:
            raise ValidationError(f"lambda values must lie in (0, 1], got {v}")
    total = math.fsum(vals)
    if total > 1.0 + SUM_TOL:
        raise ValidationError(f"lambda values sum to {total} > 1")
    vals.sort(reverse=True)
    return LambdaSequence(tuple(vals), max(0.0, 1.0 - total))


# --- laws on lambda -------------------------------------------------------


@dataclass(frozen=True)
class Fixed:
    """Deterministic lambda."""

    lam: LambdaSequence

    def sample(self, rng) -> LambdaSequence:
        return self.lam

    def to_dict(self) -> dict:
        return {"law": "fixed", "lambda": list(self.lam.values)}


@dataclass(frozen=True)
class PoissonDirichlet:
    """Poisson-Dirichlet(theta), realised by truncated stick-breaking."""

    theta: float
    truncation: int = 256
    tail_epsilon: float = 1e-6

    def __post_init__(self):
        if not self.theta > 0:
            raise ValidationError(f"theta must be positive, got {self.theta}")
        if int(self.truncation) < 1:
            raise ValidationError("truncation must be at least 1")
        if not 0.0 < self.tail_epsilon < 1.0:
            raise ValidationError("tail_epsilon must lie in (0, 1)")

    def sample(self, rng) -> LambdaSequence:
        return sample_gem(self.theta, self.truncation, self.tail_epsilon, rng)

    def to_dict(self) -> dict:
        return {"law": "poisson-dirichlet", "theta": self.theta,
                "truncation": self.truncation, "tail_epsilon": self.tail_epsilon}


LambdaLaw = Union[Fixed, PoissonDirichlet]


def law_from_dict(data: Mapping) -> LambdaLaw:
    if data["law"] == "fixed":
        return Fixed(make_lambda(data["lambda"]))
    if data["law"] == "poisson-dirichlet":
        return PoissonDirichlet(float(data["theta"]), int(data.get("truncation", 256)),
                                float(data.get("tail_epsilon", 1e-6)))
    raise ValidationError(f"unknown lambda law {data['law']!r}")


def _gem_rows(theta: float, truncation: int, tail_epsilon: float, keys: np.ndarray):
    """Stick-breaking for a batch of keys ``(T, 2)``.

    Returns ``(values, counts, dust)``: ``values`` is ``(T, truncation)``,
    each row sorted descending and zero-padded after ``counts[t]`` sticks.
    The remaining mass is carried stick by stick, so a row's result does not
    depend on the batch it was computed in.
    """
    t = len(keys)
    sticks = np.zeros((t, truncation))
    remaining = np.ones(t)
    active = np.arange(t)
    for start in range(0, truncation, _GEM_BLOCK):
        if not len(active):
            break
        cols = np.arange(start, min(start + _GEM_BLOCK, truncation), dtype=np.uint64)
        u = keyed_uniforms(keys[active][:, None, :], cols[None, :], slot=_GEM_SLOT)
        # W ~ Beta(1, theta) by inversion: W = 1 - (1 - U)^(1/theta)
        log_keep = np.log1p(-u) / theta
        w = -np.expm1(log_keep)
        keep = np.exp(log_keep)
        live = np.ones(len(active), dtype=bool)
        for j in range(len(cols)):
            rows = active[live]
            r = remaining[rows]
            sticks[rows, start + j] = w[live, j] * r
            remaining[rows] = r * keep[live, j]
            live &= remaining[active] >= tail_epsilon
        active = active[live]
    values = -np.sort(-sticks, axis=1)
    counts = (values > 0.0).sum(axis=1)
    return values, counts, remaining


def sample_gem(theta: float, truncation: int = 256, tail_epsilon: float = 1e-6, rng=0) -> LambdaSequence:
    """Ranked stick-breaking proportions with Beta(1, theta) fractions.

    Breaking stops after ``truncation`` sticks or once the remaining mass
    drops below ``tail_epsilon``; the remaining mass becomes the dust.
    """
    if not theta > 0:
        raise PreconditionError(f"theta must be positive, got {theta}")
    if int(truncation) < 1 or not 0.0 < tail_epsilon < 1.0:
        raise PreconditionError("need truncation >= 1 and tail_epsilon in (0, 1)")
    stream = as_stream(rng)
    values, counts, dust = _gem_rows(float(theta), int(truncation), float(tail_epsilon),
                                     stream.key_array()[None, :])
    return LambdaSequence(tuple(values[0, : counts[0]]), float(dust[0]))


# --- the circle space -----------------------------------------------------


@dataclass(frozen=True)
class OnCircle:
    circle: int  # 1-based
    coord: float


@dataclass(frozen=True)
class FixedAtom:
    atom: int


Position = Union[OnCircle, FixedAtom]


@dataclass(frozen=True)
class PointConfig:
    """Positions of finitely many element ids in the circle space."""

    lam: LambdaSequence
    points: Mapping[int, Position] = field(default_factory=dict)

    def __post_init__(self):
        points = {int(k): v for k, v in self.points.items()}
        seen = set()
        for x, pos in points.items():
            if isinstance(pos, OnCircle):
                lam_k = self.lam.perimeter(pos.circle)
                if not 0.0 <= pos.coord < lam_k:
                    raise ValidationError(f"coordinate {pos.coord} of {x} outside [0, {lam_k})")
                key = ("c", pos.circle, pos.coord)
            elif isinstance(pos, FixedAtom):
                key = ("a", pos.atom)
            else:
                raise ValidationError(f"not a position: {pos!r}")
            if key in seen:
                raise ValidationError(f"two elements share the position {pos}")
            seen.add(key)
        object.__setattr__(self, "points", points)

    def __getitem__(self, x: int) -> Position:
        try:
            return self.points[x]
        except KeyError:
            raise PreconditionError(f"element {x} is not in the configuration") from None

    def __len__(self):
        return len(self.points)

    def ids(self) -> list[int]:
        return sorted(self.points)

    def restrict(self, ids: Iterable[int]) -> "PointConfig":
        return PointConfig(self.lam, {int(x): self[int(x)] for x in ids})

    def to_dict(self) -> dict:
        pts = {}
        for x in sorted(self.points):
            pos = self.points[x]
            if isinstance(pos, OnCircle):
                pts[str(x)] = {"circle": pos.circle, "coord": pos.coord}
            else:
                pts[str(x)] = {"atom": pos.atom}
        return {"lambda": list(self.lam.values), "dust": self.lam.dust, "points": pts}

    @classmethod
    def from_dict(cls, data: Mapping) -> "PointConfig":
        lam = LambdaSequence(tuple(data["lambda"]), data["dust"])
        pts: dict[int, Position] = {}
        for x, pos in data["points"].items():
            if "atom" in pos:
                pts[int(x)] = FixedAtom(int(pos["atom"]))
            else:
                pts[int(x)] = OnCircle(int(pos["circle"]), float(pos["coord"]))
        return cls(lam, pts)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PointConfig":
        return cls.from_dict(json.loads(text))


def _place(values: np.ndarray, u_circle: np.ndarray, u_coord: np.ndarray):
    """Circle index (0-based, ``len(values)`` meaning dust) and coordinate.

    ``values`` is ``(T, K)`` (zero padded), the uniforms ``(T, n)``.
    """
    cum = np.cumsum(values, axis=1)
    k = (cum[:, None, :] <= u_circle[:, :, None]).sum(axis=2)
    live = (values > 0.0).sum(axis=1)[:, None]
    on_circle = k < live
    kk = np.minimum(k, values.shape[1] - 1)
    lam_k = np.take_along_axis(values, kk, axis=1)
    coord = u_coord * lam_k
    coord = np.where(coord >= lam_k, np.nextafter(lam_k, 0.0), coord)
    return np.where(on_circle, k, -1), np.where(on_circle, coord, 0.0)


def sample_positions(lam: LambdaSequence, ids: Sequence[int], rng) -> PointConfig:
    """Drop each id independently at a uniform point of the circle space.

    Id ``x`` lands on circle ``k`` with probability ``lambda_k`` (uniform
    coordinate in ``[0, lambda_k)``) and becomes the fixed atom ``x`` with
    probability ``dust``.  An exact coordinate tie on a circle is resolved by
    redrawing the larger id from the next counter slot.
    """
    ids = [int(x) for x in ids]
    if len(set(ids)) != len(ids):
        raise PreconditionError("ids must be distinct")
    if any(x < 0 for x in ids):
        raise PreconditionError("ids must be non-negative")
    stream = as_stream(rng)
    values = np.array(lam.values, dtype=np.float64)[None, :]
    if values.shape[1] == 0:
        return PointConfig(lam, {x: FixedAtom(x) for x in ids})
    order = sorted(ids)
    attempt = {x: 0 for x in order}
    positions: dict[int, Position] = {}
    todo = order
    while todo:
        slots = sorted({attempt[x] for x in todo})
        for slot in slots:
            batch = [x for x in todo if attempt[x] == slot]
            u = stream.uniforms(np.array(batch, dtype=np.uint64), slot=slot, words=2)
            circ, coord = _place(values, u[None, :, 0], u[None, :, 1])
            for x, k, c in zip(batch, circ[0].tolist(), coord[0].tolist()):
                positions[x] = OnCircle(k + 1, c) if k >= 0 else FixedAtom(x)
        taken: dict[tuple[int, float], int] = {}
        redo = []
        for x in order:
            pos = positions[x]
            if isinstance(pos, OnCircle):
                key = (pos.circle, pos.coord)
                if key in taken:
                    redo.append(x)
                    attempt[x] += 1
                else:
                    taken[key] = x
        todo = redo
    return PointConfig(lam, positions)


def induced_permutation(config: PointConfig, ids: Iterable[int]) -> Permutation:
    """Permutation of ``ids``: each point goes to its counterclockwise successor
    among the points of ``ids`` on the same circle; dust points are fixed."""
    ids = [int(x) for x in ids]
    if len(set(ids)) != len(ids):
        raise PreconditionError("ids must be distinct")
    mapping: dict[int, int] = {}
    buckets: dict[int, list[tuple[float, int]]] = {}
    for x in ids:
        pos = config[x]
        if isinstance(pos, OnCircle):
            buckets.setdefault(pos.circle, []).append((pos.coord, x))
        else:
            mapping[x] = x
    for pts in buckets.values():
        pts.sort()
        n = len(pts)
        for j, (_, x) in enumerate(pts):
            mapping[x] = pts[(j + 1) % n][1]
    return Permutation._from_trusted_mapping(mapping)


def _induced_rows(circ: np.ndarray, coord: np.ndarray) -> np.ndarray:
    """Vectorised successor map for a batch of small configurations.

    ``circ``/``coord`` are ``(T, n)`` (circle -1 for dust); returns ``(T, n)``
    column indices of the images.  Same rule as :func:`induced_permutation`.
    """
    same = (circ[:, :, None] == circ[:, None, :]) & (circ[:, :, None] >= 0)
    gap = coord[:, None, :] - coord[:, :, None]  # [t, i, j] = c_j - c_i
    n = circ.shape[1]
    eye = np.eye(n, dtype=bool)[None]
    # rank by counterclockwise gap: points behind get one extra turn, the
    # point itself comes last
    gap = np.where(gap > 0.0, gap, gap + _TURN)
    gap = np.where(eye, 2 * _TURN, gap)
    gap = np.where(same, gap, np.inf)
    img = gap.argmin(axis=2)
    alone = ~(same & ~eye).any(axis=2)
    return np.where(alone, np.arange(n)[None, :], img)


def sample_ewens_crp(n: int, theta: float, rng) -> Permutation:
    """Ewens(theta) permutation of ``{0..n-1}`` by sequential insertion.

    Element ``m`` opens a new cycle with probability ``theta/(theta+m)`` and
    otherwise is inserted right after a uniformly chosen earlier element.
    """
    if int(n) < 1:
        raise PreconditionError("n must be at least 1")
    if not theta >= 0:
        raise PreconditionError(f"theta must be non-negative, got {theta}")
    stream = as_stream(rng)
    img = _crp_rows(int(n), float(theta), stream.key_array()[None, :])[0]
    return Permutation(tuple(range(n)), tuple(int(v) for v in img))


def _crp_rows(n: int, theta: float, keys: np.ndarray) -> np.ndarray:
    """Sequential insertion for a batch of keys; returns images ``(T, n)``."""
    t = len(keys)
    u = keyed_uniforms(keys[:, None, :], np.arange(n, dtype=np.uint64)[None, :], slot=_CRP_SLOT)
    img = np.zeros((t, n), dtype=np.int64)
    rows = np.arange(t)
    for m in range(1, n):
        x = u[:, m] * (theta + m)
        new = x < theta
        j = np.minimum(np.floor(x - theta).astype(np.int64), m - 1)
        j = np.where(new, m, np.maximum(j, 0))
        # insert m after j: m -> img[j], j -> m ; a new cycle is the fixed point m
        img[:, m] = np.where(new, m, img[rows, j])
        img[rows[~new], j[~new]] = m
    return img
