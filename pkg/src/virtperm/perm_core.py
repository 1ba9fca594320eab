"""Finite permutations of sets of non-negative integer ids.

Only the operations needed to study virtual permutations are provided:
cycles, the deletion projection, powers, conjugation, Ewens weights, shift
counts inside a cycle and the rescaled eigenangles of the permutation matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import NotEquivalentError, PreconditionError, ValidationError
from .point_process import PointProcess


@dataclass(frozen=True)
class CycleDecomposition:
    """Canonical cycles: each starts at its minimum, sorted by that minimum."""

    cycles: tuple[tuple[int, ...], ...]

    def __iter__(self):
        return iter(self.cycles)

    def __len__(self):
        return len(self.cycles)

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles), reverse=True))


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``elements`` onto itself.

    ``images[i]`` is the image of ``elements[i]``; ``elements`` is sorted.
    Use the ``from_*`` constructors rather than building the tuples by hand.
    """

    elements: tuple[int, ...]
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.elements) != len(self.images):
            raise ValidationError("elements and images differ in length")
        if any(a >= b for a, b in zip(self.elements, self.elements[1:])):
            raise ValidationError("elements must be strictly increasing")
        if self.elements and self.elements[0] < 0:
            raise ValidationError("element ids must be non-negative")
        if tuple(sorted(self.images)) != self.elements:
            raise ValidationError("images are not a bijection of the element set")

    # construction ------------------------------------------------------

    @classmethod
    def _trusted(cls, elements: tuple, images: tuple) -> "Permutation":
        """Skip validation; for results that are bijections by construction."""
        p = object.__new__(cls)
        object.__setattr__(p, "elements", elements)
        object.__setattr__(p, "images", images)
        return p

    @classmethod
    def _from_trusted_mapping(cls, mapping: Mapping[int, int]) -> "Permutation":
        elements = tuple(sorted(mapping))
        return cls._trusted(elements, tuple(mapping[x] for x in elements))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, int]) -> "Permutation":
        elements = tuple(sorted(int(x) for x in mapping))
        return cls(elements, tuple(int(mapping[x]) for x in elements))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], elements: Iterable[int] | None = None) -> "Permutation":
        """Build from cycles; ids listed in ``elements`` but in no cycle are fixed."""
        mapping: dict[int, int] = {}
        for cyc in cycles:
            cyc = [int(x) for x in cyc]
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                if a in mapping:
                    raise ValidationError(f"element {a} appears in two cycles")
                mapping[a] = b
        if elements is not None:
            for x in elements:
                mapping.setdefault(int(x), int(x))
        return cls.from_mapping(mapping)

    @classmethod
    def identity(cls, elements: Iterable[int]) -> "Permutation":
        elements = tuple(sorted(int(x) for x in elements))
        return cls(elements, elements)

    @classmethod
    def from_text(cls, text: str) -> "Permutation":
        """Parse one cycle per line, ids separated by whitespace."""
        return cls.from_cycles([line.split() for line in text.splitlines() if line.strip()])

    def to_text(self) -> str:
        return "".join(" ".join(map(str, c)) + "\n" for c in self.cycles)

    # access ------------------------------------------------------------

    def __len__(self):
        return len(self.elements)

    def __call__(self, x: int) -> int:
        try:
            return self.mapping[x]
        except KeyError:
            raise PreconditionError(f"{x} is not an element of the permutation") from None

    # derived views are cached in the instance dict (the dataclass is frozen)

    @property
    def mapping(self) -> dict[int, int]:
        m = self.__dict__.get("_mapping")
        if m is None:
            m = self.__dict__["_mapping"] = dict(zip(self.elements, self.images))
        return m

    @property
    def cycles(self) -> tuple[tuple[int, ...], ...]:
        c = self.__dict__.get("_cycles")
        if c is None:
            c = self.__dict__["_cycles"] = self._compute_cycles()
        return c

    def _compute_cycles(self) -> tuple[tuple[int, ...], ...]:
        m = self.mapping
        seen = set()
        out = []
        for x in self.elements:  # sorted, so each cycle starts at its minimum
            if x in seen:
                continue
            cyc = [x]
            seen.add(x)
            y = m[x]
            while y != x:
                cyc.append(y)
                seen.add(y)
                y = m[y]
            out.append(tuple(cyc))
        return tuple(out)

    @property
    def _locator(self) -> dict[int, tuple[int, int]]:
        """element -> (cycle index, position in cycle)"""
        loc = self.__dict__.get("_loc")
        if loc is None:
            loc = self.__dict__["_loc"] = {x: (ci, j) for ci, cyc in enumerate(self.cycles) for j, x in enumerate(cyc)}
        return loc

    def __repr__(self):
        body = "".join("(" + " ".join(map(str, c)) + ")" for c in self.cycles)
        return f"Permutation{body or '()'}"


def _require(p: Permutation, *xs: int):
    for x in xs:
        if x not in p.mapping:
            raise PreconditionError(f"{x} is not an element of the permutation")


def cycle_decomposition(p: Permutation) -> CycleDecomposition:
    return CycleDecomposition(p.cycles)


def project(p: Permutation, subset: Iterable[int]) -> Permutation:
    """Delete every id outside ``subset`` from the cycles of ``p``."""
    keep = set(int(x) for x in subset)
    if not keep <= p.mapping.keys():
        missing = sorted(keep - p.mapping.keys())[:5]
        raise PreconditionError(f"subset is not contained in the element set (e.g. {missing})")
    if len(keep) == len(p.elements):
        return p
    mapping: dict[int, int] = {}
    for cyc in p.cycles:
        kept = [x for x in cyc if x in keep]
        for a, b in zip(kept, kept[1:] + kept[:1]):
            mapping[a] = b
    return Permutation._from_trusted_mapping(mapping)


def power(p: Permutation, k: int) -> Permutation:
    """``p`` composed with itself ``k`` times (``k`` may be negative).

    Each cycle is shifted by ``k mod len(cycle)``, so the cost is O(N)
    whatever the size of ``k``.
    """
    k = int(k)
    mapping: dict[int, int] = {}
    for cyc in p.cycles:
        n = len(cyc)
        s = k % n
        for j, x in enumerate(cyc):
            mapping[x] = cyc[(j + s) % n]
    return Permutation._from_trusted_mapping(mapping)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``p o q`` (apply ``q`` first)."""
    if p.elements != q.elements:
        raise PreconditionError("permutations act on different sets")
    pm = p.mapping
    return Permutation._trusted(q.elements, tuple(pm[y] for y in q.images))


def inverse(p: Permutation) -> Permutation:
    return Permutation._from_trusted_mapping(dict(zip(p.images, p.elements)))


def conjugate(p: Permutation, g: Permutation) -> Permutation:
    """``g o p o g^-1``; its cycles are the ``g``-images of the cycles of ``p``."""
    if p.elements != g.elements:
        raise PreconditionError("p and g must act on the same element set")
    gm = g.mapping
    return Permutation._from_trusted_mapping({gm[x]: gm[y] for x, y in zip(p.elements, p.images)})


def same_cycle(p: Permutation, x: int, y: int) -> bool:
    _require(p, x, y)
    loc = p._locator
    return loc[x][0] == loc[y][0]


def shift_count(p: Permutation, x: int, y: int) -> int:
    """The unique ``k`` in ``[0, len(cycle))`` with ``p^k(x) == y``.

    Raises NotEquivalentError when ``x`` and ``y`` are in different cycles.
    """
    _require(p, x, y)
    cx, jx = p._locator[x]
    cy, jy = p._locator[y]
    if cx != cy:
        raise NotEquivalentError(f"{x} and {y} lie in different cycles")
    return (jy - jx) % len(p.cycles[cx])


def ewens_log_pmf(p: Permutation, theta: float) -> float:
    """Log of theta^(n-1) / ((theta+1)...(theta+N-1)), n = number of cycles.

    At ``theta == 0`` the limiting law is used: probability one spread over
    the single N-cycles, i.e. ``log(1/(N-1)!)`` for an N-cycle and ``-inf``
    otherwise.
    """
    theta = float(theta)
    if not theta >= 0.0:
        raise PreconditionError(f"theta must be non-negative, got {theta}")
    n = len(p.cycles)
    size = len(p.elements)
    if size == 0:
        return 0.0
    if theta == 0.0:
        return -math.lgamma(size) if n == 1 else -math.inf
    return (n - 1) * math.log(theta) - (math.lgamma(theta + size) - math.lgamma(theta + 1.0))


def rescaled_eigenangles(p: Permutation, window: float | tuple[float, float]) -> PointProcess:
    """Eigenangles of the permutation matrix times N, restricted to a window.

    A cycle of length l has eigenangles 2 pi m / l for -l/2 < m <= l/2 (the
    branch (-pi, pi]).  ``window`` is either ``A`` for ``[-A, A]`` or a pair
    ``(lo, hi)``; the zero location always carries the number of cycles when
    the window contains it.
    """
    lo, hi = _window(window)
    size = len(p.elements)
    lengths: dict[int, int] = {}
    for cyc in p.cycles:
        lengths[len(cyc)] = lengths.get(len(cyc), 0) + 1
    counts: dict[Fraction, int] = {}
    bound = max(abs(lo), abs(hi))
    for ell, mult in lengths.items():
        # |2 pi m N / l| <= bound  <=>  |m| <= bound * l / (2 pi N)
        mmax = min(ell // 2, int(math.floor(bound * ell / (2 * math.pi * size))) + 1)
        for m in range(-mmax, mmax + 1):
            if m == 0 or not -ell < 2 * m <= ell:
                continue
            r = Fraction(m * size, ell)  # rescaled angle / 2 pi, reduced
            counts[r] = counts.get(r, 0) + mult
    atoms = {}
    for r, mult in counts.items():
        x = 2 * math.pi * float(r)
        if lo <= x <= hi:
            atoms[x] = atoms.get(x, 0) + mult
    zero = len(p.cycles) if lo <= 0.0 <= hi else 0
    return PointProcess.from_counts(atoms, zero)


def _window(window) -> tuple[float, float]:
    if isinstance(window, (int, float)):
        a = float(window)
        if not a > 0:
            raise PreconditionError(f"window half-width must be positive, got {a}")
        return -a, a
    lo, hi = (float(w) for w in window)
    if not lo < hi:
        raise PreconditionError(f"empty window [{lo}, {hi}]")
    return lo, hi
