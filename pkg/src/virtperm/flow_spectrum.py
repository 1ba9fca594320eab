"""Geometry of the completed space and the spectrum of the flow generator.

Points are :class:`~virtperm.central_sampler.Position` values: a coordinate
on circle ``k`` (perimeter ``lambda_k``) or a fixed atom.  The flow rotates
every circle by ``alpha`` and leaves atoms in place; its generator ``U`` has
``iU``-eigenvalues ``0`` and the non-zero multiples of ``2 pi / lambda_k``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .central_sampler import FixedAtom, LambdaSequence, OnCircle, PointConfig, Position
from .errors import NotEquivalentError, PreconditionError, ValidationError
from .perm_core import _window
from .point_process import INFINITE, PointProcess

MERGE_RTOL = 1e-9
ADMISSIBLE_TOL = 1e-9


def _mod(x: float, lam: float) -> float:
    """Canonical representative of ``x`` in ``[0, lam)``."""
    r = x % lam
    return 0.0 if r >= lam else r


@dataclass(frozen=True)
class ArcClass:
    """An element of R / lambda_k Z, stored as its representative in [0, lambda_k)."""

    circle: int
    value: float


def _perimeter(config: PointConfig, pos: Position) -> float:
    if isinstance(pos, OnCircle):
        return config.lam.perimeter(pos.circle)
    return 0.0


def asymptotic_length(config: PointConfig, x: int) -> float:
    """lambda(x): the perimeter of the circle carrying ``x``, 0 for atoms."""
    return _perimeter(config, config[x])


def distance(config: PointConfig, p: Position, q: Position) -> float:
    """Arc distance on a common circle, 0 between equal atoms, 1 otherwise."""
    if isinstance(p, OnCircle) and isinstance(q, OnCircle) and p.circle == q.circle:
        lam = config.lam.perimeter(p.circle)
        a = _mod(q.coord - p.coord, lam)
        return min(a, lam - a)
    if p == q:
        return 0.0
    return 1.0


def delta_arc(config: PointConfig, p: Position, q: Position) -> ArcClass:
    """Counterclockwise displacement from ``p`` to ``q`` modulo the perimeter."""
    if not (isinstance(p, OnCircle) and isinstance(q, OnCircle)) or p.circle != q.circle:
        raise NotEquivalentError(f"{p} and {q} are not on a common circle")
    lam = config.lam.perimeter(p.circle)
    return ArcClass(p.circle, _mod(q.coord - p.coord, lam))


def flow_apply(config: PointConfig, p: Position, alpha: float) -> Position:
    """Rotate ``p`` by ``alpha`` along its circle; atoms are fixed."""
    if isinstance(p, FixedAtom):
        return p
    lam = config.lam.perimeter(p.circle)
    return OnCircle(p.circle, _mod(p.coord + alpha, lam))


def spectrum_U(lam: LambdaSequence, window) -> PointProcess:
    """Eigenvalues of ``iU`` inside ``window`` with their multiplicities.

    Locations ``2 pi m / lambda_k`` (``m != 0``) from different circles that
    agree to a relative ``1e-9`` are merged.  Zero carries the number of
    circles, or ``INFINITE`` when the dust is positive.
    """
    lo, hi = _window(window)
    locs = []
    for lam_k in lam.values:
        step = 2 * math.pi / lam_k
        m_lo = math.ceil(lo / step)
        m_hi = math.floor(hi / step)
        for m in range(m_lo, m_hi + 1):
            x = step * m
            if m != 0 and lo <= x <= hi:
                locs.append(x)
    locs.sort()
    atoms: list[list] = []
    for x in locs:
        if atoms and abs(x - atoms[-1][0]) <= MERGE_RTOL * (1 + abs(atoms[-1][0])):
            atoms[-1][1] += 1
        else:
            atoms.append([x, 1])
    if lo <= 0.0 <= hi:
        zero = INFINITE if lam.dust > 0 else len(lam.values)
    else:
        zero = 0
    return PointProcess(tuple((x, m) for x, m in atoms), zero)


def is_admissible(lam_k: float, a: float) -> bool:
    ratio = a * lam_k / (2 * math.pi)
    return abs(ratio - round(ratio)) <= ADMISSIBLE_TOL


def eval_eigenfunction(config: PointConfig, base: Position, target: Position, a: float) -> complex:
    """The ``ia``-eigenfunction of U attached to the circle of ``base``.

    Equal to ``exp(i a delta(base, target))`` on that circle and 0 elsewhere.
    """
    if not isinstance(base, OnCircle):
        raise PreconditionError("base point must lie on a circle")
    lam_k = config.lam.perimeter(base.circle)
    if not is_admissible(lam_k, a):
        raise ValidationError(f"a={a} is not a multiple of 2 pi / {lam_k}")
    if not isinstance(target, OnCircle) or target.circle != base.circle:
        return 0j
    return cmath.exp(1j * a * delta_arc(config, base, target).value)
