"""Bounded domains and their inner approximations by dyadic cubes.

A :class:`Domain` wraps a shape descriptor. Built-in shapes classify an
axis-aligned box against themselves with interval arithmetic on their
defining inequalities, so a box is reported ``INSIDE`` only when its open
interior lies in the (open) shape. User predicates fall back to sampling.

:func:`decompose` refines a dyadic grid over the root cube, keeping the cells
that are inside, splitting the ones that straddle the boundary, and
discarding whatever still straddles at ``max_level``. Cells are stored in
canonical order: by level, then lexicographically by integer index.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ShapeError, UnboundedDomainError
from .kernels import neumaier_sum

OUTSIDE = 0
INSIDE = 1
STRADDLING = 2

_LABELS = {OUTSIDE: "outside", INSIDE: "inside", STRADDLING: "straddling"}


def _as_rows(lo, hi):
    lo = np.atleast_2d(np.asarray(lo, dtype=np.float64))
    hi = np.atleast_2d(np.asarray(hi, dtype=np.float64))
    return lo, hi


def _interval_sq_range(lo, hi, c):
    """Range of (x - c)^2 over x in [lo, hi], elementwise."""
    a = (lo - c) ** 2
    b = (hi - c) ** 2
    upper = np.maximum(a, b)
    lower = np.where((lo <= c) & (c <= hi), 0.0, np.minimum(a, b))
    return lower, upper


# --------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class AxisBox:
    """Axis-aligned box ``(lo, hi)``. Also usable as a domain shape."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ShapeError("box corners must have the same positive length")
        if not all(math.isfinite(v) for v in lo + hi):
            raise UnboundedDomainError("box")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ShapeError(f"degenerate box: lo={lo}, hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    kind = "box"
    convex = True

    @property
    def dim(self):
        return len(self.lo)

    @property
    def volume(self):
        return math.prod(b - a for a, b in zip(self.lo, self.hi))

    @property
    def widths(self):
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    def bounds(self):
        return self

    def contains(self, points):
        x = np.asarray(points, dtype=np.float64)
        return np.all((x > np.asarray(self.lo)) & (x < np.asarray(self.hi)), axis=-1)

    def classify(self, lo, hi):
        lo, hi = _as_rows(lo, hi)
        a = np.asarray(self.lo)
        b = np.asarray(self.hi)
        inside = np.all((lo >= a) & (hi <= b), axis=1)
        outside = np.any((hi <= a) | (lo >= b), axis=1)
        return np.where(inside, INSIDE, np.where(outside, OUTSIDE, STRADDLING))

    def support(self):
        return [(np.array(c), 0.0) for c in itertools.product(*zip(self.lo, self.hi))]

    def exact_measure(self):
        return self.volume

    def describe(self):
        return {"kind": "box", "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    kind = "ball"
    convex = True

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        r = float(self.radius)
        if not math.isfinite(r) or not all(math.isfinite(v) for v in c):
            raise UnboundedDomainError("ball")
        if r <= 0:
            raise ShapeError("ball radius must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def dim(self):
        return len(self.center)

    def bounds(self):
        c = np.asarray(self.center)
        return AxisBox(tuple(c - self.radius), tuple(c + self.radius))

    def contains(self, points):
        x = np.asarray(points, dtype=np.float64)
        return np.sum((x - np.asarray(self.center)) ** 2, axis=-1) < self.radius**2

    def _sq_range(self, lo, hi):
        lo, hi = _as_rows(lo, hi)
        lower, upper = _interval_sq_range(lo, hi, np.asarray(self.center))
        return lower.sum(axis=1), upper.sum(axis=1)

    def classify(self, lo, hi):
        dmin, dmax = self._sq_range(lo, hi)
        r2 = self.radius**2
        return np.where(dmax <= r2, INSIDE, np.where(dmin >= r2, OUTSIDE, STRADDLING))

    def support(self):
        return [(np.asarray(self.center), self.radius)]

    def exact_measure(self):
        n = self.dim
        return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * self.radius**n

    def describe(self):
        return {"kind": "ball", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class LShape:
    """``outer`` minus the closed box ``notch``; the notch shares a corner with ``outer``."""

    outer: AxisBox
    notch: AxisBox

    kind = "l_shape"
    convex = False

    def __post_init__(self):
        if self.outer.dim != self.notch.dim:
            raise ShapeError("L-shape boxes differ in dimension")
        if self.outer.classify(self.notch.lo, self.notch.hi)[0] != INSIDE:
            raise ShapeError("L-shape notch must lie in the outer box")

    @property
    def dim(self):
        return self.outer.dim

    def bounds(self):
        return self.outer

    def contains(self, points):
        x = np.asarray(points, dtype=np.float64)
        a = np.asarray(self.notch.lo)
        b = np.asarray(self.notch.hi)
        in_notch = np.all((x >= a) & (x <= b), axis=-1)
        return self.outer.contains(x) & ~in_notch

    def classify(self, lo, hi):
        lo, hi = _as_rows(lo, hi)
        outer = self.outer.classify(lo, hi)
        a = np.asarray(self.notch.lo)
        b = np.asarray(self.notch.hi)
        clear = np.any((hi <= a) | (lo >= b), axis=1)
        covered = np.all((lo >= a) & (hi <= b), axis=1)
        return np.where(
            (outer == OUTSIDE) | covered,
            OUTSIDE,
            np.where((outer == INSIDE) & clear, INSIDE, STRADDLING),
        )

    def support(self):
        pts = [p for p, _ in self.outer.support()]
        pts += [p for p, _ in self.notch.support()]
        # a corner is in the closure iff some diagonal nudge of it lands in the shape
        nudge = 1e-9 * max(self.outer.widths)
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=self.dim)))
        keep = [p for p in pts if self.contains(p + nudge * signs).any()]
        return [(p, 0.0) for p in keep]

    def exact_measure(self):
        return self.outer.volume - self.notch.volume

    def describe(self):
        return {"kind": "l_shape", "outer": self.outer.describe(), "notch": self.notch.describe()}


@dataclass(frozen=True)
class Annulus:
    """Open ball of radius ``r_out`` minus the closed ball of radius ``r_in``."""

    center: tuple
    r_in: float
    r_out: float

    kind = "annulus"
    convex = False

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        if not (math.isfinite(self.r_out) and all(math.isfinite(v) for v in c)):
            raise UnboundedDomainError("annulus")
        if not 0 <= self.r_in < self.r_out:
            raise ShapeError("annulus needs 0 <= r_in < r_out")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "r_in", float(self.r_in))
        object.__setattr__(self, "r_out", float(self.r_out))

    @property
    def dim(self):
        return len(self.center)

    def bounds(self):
        c = np.asarray(self.center)
        return AxisBox(tuple(c - self.r_out), tuple(c + self.r_out))

    def contains(self, points):
        x = np.asarray(points, dtype=np.float64)
        d2 = np.sum((x - np.asarray(self.center)) ** 2, axis=-1)
        return (d2 < self.r_out**2) & (d2 > self.r_in**2)

    def classify(self, lo, hi):
        lo, hi = _as_rows(lo, hi)
        lower, upper = _interval_sq_range(lo, hi, np.asarray(self.center))
        dmin, dmax = lower.sum(axis=1), upper.sum(axis=1)
        inside = (dmax <= self.r_out**2) & (dmin >= self.r_in**2)
        outside = (dmin >= self.r_out**2) | (dmax <= self.r_in**2)
        return np.where(inside, INSIDE, np.where(outside, OUTSIDE, STRADDLING))

    def support(self):
        return [(np.asarray(self.center), self.r_out)]

    def exact_measure(self):
        n = self.dim
        unit = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
        return unit * (self.r_out**n - self.r_in**n)

    def describe(self):
        return {"kind": "annulus", "center": list(self.center), "r_in": self.r_in, "r_out": self.r_out}


@dataclass(frozen=True)
class Union:
    """Finite union of shapes. Classification is conservative at seams."""

    parts: tuple

    kind = "union"

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ShapeError("empty union")
        if len({p.dim for p in parts}) != 1:
            raise ShapeError("union parts differ in dimension")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        return self.parts[0].dim

    @property
    def convex(self):
        return len(self.parts) == 1 and self.parts[0].convex

    def bounds(self):
        boxes = [p.bounds() for p in self.parts]
        lo = np.min([b.lo for b in boxes], axis=0)
        hi = np.max([b.hi for b in boxes], axis=0)
        return AxisBox(tuple(lo), tuple(hi))

    def contains(self, points):
        return np.any([p.contains(points) for p in self.parts], axis=0)

    def classify(self, lo, hi):
        labels = np.array([p.classify(lo, hi) for p in self.parts])
        inside = np.any(labels == INSIDE, axis=0)
        outside = np.all(labels == OUTSIDE, axis=0)
        return np.where(inside, INSIDE, np.where(outside, OUTSIDE, STRADDLING))

    def support(self):
        return [s for p in self.parts for s in p.support()]

    def exact_measure(self):
        # only when the parts are pairwise disjoint boxes/balls we can certify
        if any(p.exact_measure() is None for p in self.parts):
            return None
        boxes = [p.bounds() for p in self.parts]
        for a, b in itertools.combinations(boxes, 2):
            if a.classify(b.lo, b.hi)[0] != OUTSIDE:
                return None
        return math.fsum(p.exact_measure() for p in self.parts)

    def describe(self):
        return {"kind": "union", "parts": [p.describe() for p in self.parts]}


@dataclass(frozen=True)
class Predicate:
    """User membership test, classified by sampling ``samples_per_axis`` points per axis."""

    func: Callable
    box: AxisBox
    samples_per_axis: int = 4
    name: str = "predicate"

    kind = "predicate"
    convex = False

    def __post_init__(self):
        if self.samples_per_axis < 1:
            raise ShapeError("samples_per_axis must be >= 1")

    @property
    def dim(self):
        return self.box.dim

    def bounds(self):
        return self.box

    def contains(self, points):
        x = np.asarray(points, dtype=np.float64)
        flat = x.reshape(-1, self.dim)
        return np.asarray(self.func(flat), dtype=bool).reshape(x.shape[:-1])

    def classify(self, lo, hi):
        lo, hi = _as_rows(lo, hi)
        s = self.samples_per_axis
        t = (np.arange(s) + 0.5) / s
        grid = np.array(list(itertools.product(t, repeat=self.dim)))
        pts = lo[:, None, :] + (hi - lo)[:, None, :] * grid[None, :, :]
        member = self.contains(pts)
        inside = member.all(axis=1)
        outside = ~member.any(axis=1)
        return np.where(inside, INSIDE, np.where(outside, OUTSIDE, STRADDLING))

    def support(self):
        return self.box.support()

    def exact_measure(self):
        return None

    def describe(self):
        return {"kind": "predicate", "name": self.name, "box": self.box.describe(),
                "samples_per_axis": self.samples_per_axis}


@dataclass(frozen=True)
class HalfSpace:
    """``{x : normal . x < offset}``. Representable, but never a valid Domain."""

    normal: tuple
    offset: float = 0.0

    kind = "halfspace"
    bounded = False

    @property
    def dim(self):
        return len(self.normal)


def interval_list(pairs: Sequence[tuple]) -> Union:
    """Finite union of open intervals on the line."""
    return Union(tuple(AxisBox((a,), (b,)) for a, b in pairs))


def unit_square(n=2):
    return AxisBox((0.0,) * n, (1.0,) * n)


def unit_ball(n=2, radius=1.0):
    return Ball((0.0,) * n, radius)


def l_shape():
    """``[0,1]^2`` minus the closed quadrant ``[1/2,1]^2``."""
    return LShape(AxisBox((0, 0), (1, 1)), AxisBox((0.5, 0.5), (1, 1)))


def classical_l_shape():
    """``(-1,1)^2`` minus ``[0,1] x [-1,0]``; first Dirichlet eigenvalue ~9.6397."""
    return LShape(AxisBox((-1, -1), (1, 1)), AxisBox((0, -1), (1, 0)))


# --------------------------------------------------------------------------
# domain and cubes


@dataclass(frozen=True)
class Domain:
    shape: object
    bounding_box: AxisBox = None
    bounded: bool = True

    def __post_init__(self):
        if not self.bounded or not getattr(self.shape, "bounded", True):
            raise UnboundedDomainError()
        bbox = self.bounding_box or self.shape.bounds()
        if bbox.dim != self.shape.dim:
            raise ShapeError("bounding box and shape differ in dimension")
        inner = self.shape.bounds()
        if bbox.classify(inner.lo, inner.hi)[0] != INSIDE:
            raise ShapeError("shape is not contained in its bounding box")
        object.__setattr__(self, "bounding_box", bbox)

    @property
    def dim(self):
        return self.shape.dim

    @property
    def classification_mode(self):
        return "sampled" if isinstance(self.shape, Predicate) else "exact"

    @property
    def root_lo(self):
        return np.asarray(self.bounding_box.lo)

    @property
    def root_side(self):
        return max(self.bounding_box.widths)

    @property
    def convex(self):
        return bool(getattr(self.shape, "convex", False))

    def exact_measure(self):
        return self.shape.exact_measure()

    def describe(self):
        return {"shape": self.shape.describe(), "bounding_box": self.bounding_box.describe(),
                "dimension": self.dim}


@dataclass(frozen=True)
class DyadicCube:
    """Cube ``root_lo + root_side * 2^-level * (index + [0,1]^n)``."""

    level: int
    index: tuple
    root_lo: tuple
    root_side: float

    @property
    def side(self):
        return self.root_side * 2.0 ** (-self.level)

    @property
    def box(self):
        scale = 2.0 ** (-self.level)
        lo = tuple(a + self.root_side * (k * scale) for a, k in zip(self.root_lo, self.index))
        hi = tuple(a + self.root_side * ((k + 1) * scale) for a, k in zip(self.root_lo, self.index))
        return AxisBox(lo, hi)

    @property
    def volume(self):
        return self.side ** len(self.index)

    def contains_cube(self, other):
        if other.level < self.level:
            return False
        shift = other.level - self.level
        return all((k >> shift) == j for k, j in zip(other.index, self.index))


def classify_cube(domain: Domain, box: AxisBox) -> str:
    """Return ``"inside"``, ``"outside"`` or ``"straddling"`` for ``box``."""
    return _LABELS[int(domain.shape.classify(box.lo, box.hi)[0])]


def _lexsorted(indices):
    if len(indices) == 0:
        return indices
    order = np.lexsort(indices.T[::-1])
    return indices[order]


@dataclass
class Decomposition:
    domain: Domain
    levels: np.ndarray
    indices: np.ndarray
    max_level: int
    min_level: int = 0
    classification_mode: str = "exact"
    samples_per_axis: int | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self):
        return len(self.levels)

    @property
    def dim(self):
        return self.domain.dim

    @property
    def sides(self):
        return self.domain.root_side * np.ldexp(1.0, -self.levels.astype(np.int64))

    def _corner(self, offset):
        scale = np.ldexp(1.0, -self.levels.astype(np.int64))[:, None]
        return self.domain.root_lo + self.domain.root_side * ((self.indices + offset) * scale)

    @property
    def lo(self):
        return self._corner(0)

    @property
    def hi(self):
        return self._corner(1)

    @property
    def volumes(self):
        return self.sides ** self.dim

    @property
    def cubes(self):
        root_lo = tuple(self.domain.root_lo)
        side = self.domain.root_side
        return [DyadicCube(int(j), tuple(int(v) for v in k), root_lo, side)
                for j, k in zip(self.levels, self.indices)]

    def overlapping_pairs(self):
        """Pairs ``(a, b)`` of positions whose open interiors intersect.

        Distinct dyadic cubes overlap only when one is an ancestor of the
        other, which is checked exactly on integer indices.
        """
        where = {(int(j), tuple(k.tolist())): i for i, (j, k) in enumerate(zip(self.levels, self.indices))}
        pairs = []
        for i, (j, k) in enumerate(zip(self.levels, self.indices)):
            j = int(j)
            key = tuple(k.tolist())
            if where[(j, key)] != i:
                pairs.append((where[(j, key)], i))
            for up in range(1, j + 1):
                anc = (j - up, tuple(v >> up for v in key))
                if anc in where:
                    pairs.append((where[anc], i))
        return pairs


def decompose(domain: Domain, max_level: int, min_level: int = 0) -> Decomposition:
    """Inner dyadic decomposition of ``domain`` down to ``max_level``.

    Cells coarser than ``min_level`` are split even when inside, which gives
    the uniform partitions used for refinement comparisons.
    """
    if not isinstance(domain, Domain):
        raise ShapeError("decompose expects a Domain")
    if max_level < 0 or min_level < 0 or min_level > max_level:
        raise ValueError("need 0 <= min_level <= max_level")
    n = domain.dim
    offsets = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)
    root_lo = domain.root_lo
    active = np.zeros((1, n), dtype=np.int64)
    levels, indices = [], []
    for j in range(max_level + 1):
        if len(active) == 0:
            break
        scale = 2.0 ** (-j)
        lo = root_lo + domain.root_side * (active * scale)
        hi = root_lo + domain.root_side * ((active + 1) * scale)
        labels = domain.shape.classify(lo, hi)
        if j >= min_level:
            accept = labels == INSIDE
            split = labels == STRADDLING
        else:
            accept = np.zeros(len(active), dtype=bool)
            split = labels != OUTSIDE
        got = _lexsorted(active[accept])
        levels.append(np.full(len(got), j, dtype=np.int64))
        indices.append(got)
        if j < max_level:
            parents = active[split]
            active = (2 * parents[:, None, :] + offsets[None, :, :]).reshape(-1, n)
    return Decomposition(
        domain=domain,
        levels=np.concatenate(levels) if levels else np.zeros(0, dtype=np.int64),
        indices=np.concatenate(indices) if indices else np.zeros((0, n), dtype=np.int64),
        max_level=max_level,
        min_level=min_level,
        classification_mode=domain.classification_mode,
        samples_per_axis=getattr(domain.shape, "samples_per_axis", None),
    )


def refine(dec: Decomposition) -> Decomposition:
    """Split every cube into its 2^n children (same covered set)."""
    n = dec.dim
    offsets = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)
    levels, indices = [], []
    children = (2 * dec.indices[:, None, :] + offsets[None, :, :]).reshape(-1, n)
    child_levels = np.repeat(dec.levels + 1, len(offsets))
    for j in np.unique(child_levels):
        got = _lexsorted(children[child_levels == j])
        levels.append(np.full(len(got), j, dtype=np.int64))
        indices.append(got)
    return Decomposition(
        domain=dec.domain,
        levels=np.concatenate(levels) if levels else dec.levels.copy(),
        indices=np.concatenate(indices) if indices else dec.indices.copy(),
        max_level=dec.max_level + 1,
        min_level=dec.min_level + 1,
        classification_mode=dec.classification_mode,
        samples_per_axis=dec.samples_per_axis,
    )


def total_measure(dec: Decomposition) -> float:
    return neumaier_sum(dec.volumes)


def diameter(domain: Domain) -> float:
    """Diameter from support points: max of |p - q| + r_p + r_q over pairs."""
    shape = domain.shape if isinstance(domain, Domain) else domain
    support = shape.support()
    best = 0.0
    for (p, rp), (q, rq) in itertools.combinations_with_replacement(support, 2):
        best = max(best, float(np.linalg.norm(p - q)) + rp + rq)
    return best


def write_csv(dec: Decomposition, fh) -> None:
    n = dec.dim
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["level"] + [f"index_{i}" for i in range(n)] + [f"lo_{i}" for i in range(n)]
               + [f"hi_{i}" for i in range(n)] + ["volume"])
    for j, k, lo, hi, vol in zip(dec.levels, dec.indices, dec.lo, dec.hi, dec.volumes):
        w.writerow([int(j)] + [int(v) for v in k] + [repr(float(v)) for v in lo]
                   + [repr(float(v)) for v in hi] + [repr(float(vol))])
