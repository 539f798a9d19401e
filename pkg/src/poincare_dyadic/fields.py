"""Test functions with analytic gradients and, where known, closed-form norms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GradientCheckError, ShapeError
from .geometry import AxisBox, Domain

FD_STEP = 1e-5
GRADIENT_RTOL = 1e-6


@dataclass(frozen=True)
class ScalarField:
    """A test function ``u``.

    ``eval`` maps points of shape ``(..., n)`` to ``(...)`` and ``grad`` to
    ``(..., n)``. ``region`` is where the field lives naturally; it is used
    for gradient-check sampling and to key the analytic norm table.
    ``antiderivative(exponent, a, b, mode)`` is an exact 1-D integral of
    ``|u|^e`` (or ``|u'|^e``) over ``(a, b)``, when the field has one.
    """

    id: str
    dim: int
    eval: Callable
    grad: Callable
    region: AxisBox
    singularities: tuple = ()
    guard: float = 1e-3
    smooth: bool = True
    antiderivative: Callable | None = None
    _norms: Callable | None = field(default=None, repr=False)

    def __call__(self, points):
        return self.eval(points)

    def touches_singularity(self, lo, hi):
        """Per-row flag: does the closed box ``[lo, hi]`` contain a singular point?"""
        lo = np.atleast_2d(lo)
        hi = np.atleast_2d(hi)
        hit = np.zeros(len(lo), dtype=bool)
        for s in self.singularities:
            s = np.asarray(s, dtype=np.float64)
            hit |= np.all((lo <= s) & (s <= hi), axis=1)
        return hit


def _sin_integral_power(p):
    """int_0^1 sin(pi t)^p dt."""
    return math.exp(math.lgamma((p + 1) / 2) - math.lgamma(p / 2 + 1)) / math.sqrt(math.pi)


def eigenfunction(box: AxisBox | None = None, dim: int = 2) -> ScalarField:
    """Product of sines vanishing on the boundary of ``box``."""
    box = box or AxisBox((0.0,) * dim, (1.0,) * dim)
    lo = np.asarray(box.lo)
    w = np.asarray(box.widths)
    k = np.pi / w

    def ev(x):
        return np.prod(np.sin(k * (np.asarray(x) - lo)), axis=-1)

    def gr(x):
        t = k * (np.asarray(x) - lo)
        s = np.sin(t)
        c = np.cos(t)
        out = np.empty_like(t)
        for i in range(t.shape[-1]):
            others = np.prod(np.delete(s, i, axis=-1), axis=-1)
            out[..., i] = k[i] * c[..., i] * others
        return out

    def norms(p, region, mode):
        if region != box:
            return None
        if mode == "value":
            return (box.volume * _sin_integral_power(p) ** box.dim) ** (1.0 / p)
        if mode == "gradient" and p == 2:
            # each squared partial integrates to k_i^2 * vol / 2^n
            return math.sqrt(box.volume / 2**box.dim * float(np.sum(k**2)))
        return None

    return ScalarField("eigenfunction", box.dim, ev, gr, box, _norms=norms)


def bump(dim: int = 2) -> ScalarField:
    """exp(-1/(1-|x|^2)) on the unit ball, zero outside."""

    def ev(x):
        r2 = np.sum(np.asarray(x, dtype=np.float64) ** 2, axis=-1)
        inside = r2 < 1.0
        d = np.where(inside, 1.0 - r2, 1.0)
        return np.where(inside, np.exp(-1.0 / d), 0.0)

    def gr(x):
        x = np.asarray(x, dtype=np.float64)
        r2 = np.sum(x**2, axis=-1)
        inside = r2 < 1.0
        d = np.where(inside, 1.0 - r2, 1.0)
        coef = np.where(inside, -2.0 * np.exp(-1.0 / d) / d**2, 0.0)
        return coef[..., None] * x

    box = AxisBox((-1.0,) * dim, (1.0,) * dim)
    return ScalarField("bump", dim, ev, gr, box, guard=0.1)


def reciprocal() -> ScalarField:
    """f(x) = 1/x on (0, 1), singular at 0, with exact power antiderivatives."""

    def ev(x):
        return 1.0 / np.asarray(x, dtype=np.float64)[..., 0]

    def gr(x):
        x = np.asarray(x, dtype=np.float64)
        return -1.0 / x**2

    def anti(exponent, a, b, mode="value"):
        # |f|^e = x^-e, |f'|^e = x^-2e
        e = exponent if mode == "value" else 2.0 * exponent
        if b <= a:
            return 0.0
        if a <= 0.0:
            return math.inf
        if e == 1.0:
            return math.log(b) - math.log(a)
        return (a ** (1.0 - e) - b ** (1.0 - e)) / (e - 1.0)

    def norms(p, region, mode):
        if region.dim != 1 or region.lo[0] < 0:
            return None
        val = anti(p, region.lo[0], region.hi[0], mode)
        return val ** (1.0 / p)

    # central differences lose h^2/x^2 relative accuracy; 2e-2 keeps that under 1e-6
    return ScalarField("reciprocal", 1, ev, gr, AxisBox((0.0,), (1.0,)), singularities=((0.0,),),
                       guard=2e-2, smooth=False, antiderivative=anti, _norms=norms)


def poly(dim: int = 2) -> ScalarField:
    """Tensor product of x(1-x)."""

    def ev(x):
        x = np.asarray(x, dtype=np.float64)
        return np.prod(x * (1.0 - x), axis=-1)

    def gr(x):
        x = np.asarray(x, dtype=np.float64)
        f = x * (1.0 - x)
        out = np.empty_like(x)
        for i in range(x.shape[-1]):
            out[..., i] = (1.0 - 2.0 * x[..., i]) * np.prod(np.delete(f, i, axis=-1), axis=-1)
        return out

    box = AxisBox((0.0,) * dim, (1.0,) * dim)

    def norms(p, region, mode):
        if region != box or mode != "value":
            return None
        # int_0^1 (x(1-x))^p dx = B(p+1, p+1)
        beta = math.exp(2 * math.lgamma(p + 1) - math.lgamma(2 * p + 2))
        return beta ** (dim / p)

    return ScalarField("poly", dim, ev, gr, box, _norms=norms)


def constant(value: float = 1.0, dim: int = 2) -> ScalarField:
    def ev(x):
        return np.full(np.shape(x)[:-1], float(value))

    def gr(x):
        return np.zeros(np.shape(x))

    def norms(p, region, mode):
        if mode == "gradient":
            return 0.0
        return abs(value) * region.volume ** (1.0 / p)

    name = "zero" if value == 0 else ("one" if value == 1 else f"constant({value!r})")
    box = AxisBox((0.0,) * dim, (1.0,) * dim)
    return ScalarField(name, dim, ev, gr, box, _norms=norms)


def zero(dim: int = 2) -> ScalarField:
    return constant(0.0, dim)


def scaled(f: ScalarField, c: float) -> ScalarField:
    """The field ``c * f``."""

    def norms(p, region, mode):
        base = analytic_norm(f, p, region, mode)
        return None if base is None else abs(c) * base

    anti = None
    if f.antiderivative is not None:
        def anti(exponent, a, b, mode="value"):
            return abs(c) ** exponent * f.antiderivative(exponent, a, b, mode)

    return ScalarField(f"{c!r}*{f.id}", f.dim, lambda x: c * f.eval(x), lambda x: c * f.grad(x),
                       f.region, f.singularities, f.guard, f.smooth, anti, norms)


FIELD_IDS = ("eigenfunction", "bump", "reciprocal", "poly", "zero", "one")


def get_field(name: str, dim: int = 2, box: AxisBox | None = None) -> ScalarField:
    """Look up a field by id. ``box`` sets the eigenfunction's support."""
    if name == "eigenfunction":
        return eigenfunction(box, dim)
    if name == "bump":
        return bump(dim)
    if name == "reciprocal":
        if dim != 1:
            raise ShapeError("the reciprocal field is one-dimensional")
        return reciprocal()
    if name == "poly":
        return poly(dim)
    if name == "zero":
        return zero(dim)
    if name == "one":
        return constant(1.0, dim)
    raise KeyError(f"unknown field {name!r}; choose from {', '.join(FIELD_IDS)}")


def catalog(dim: int = 2, box: AxisBox | None = None) -> list[ScalarField]:
    """The non-trivial catalog fields that make sense in ``dim`` dimensions."""
    fields = [eigenfunction(box, dim), bump(dim)]
    if dim == 1:
        fields.append(reciprocal())
    fields.append(poly(dim))
    return fields


def analytic_norm(field: ScalarField, p: float, region, mode: str = "value"):
    """Closed-form ``||u||_{L^p(region)}`` (or of ``|grad u|``), else ``None``."""
    if isinstance(region, Domain):
        shape = region.shape
        if not isinstance(shape, AxisBox):
            return None
        region = shape
    if field._norms is None:
        return None
    return field._norms(float(p), region, mode)


@dataclass
class GradientCheckReport:
    field: str
    trials: int
    seed: int
    checked: int
    skipped: int
    max_rel_error: float
    tolerance: float = GRADIENT_RTOL

    @property
    def passed(self):
        return self.max_rel_error <= self.tolerance

    def to_dict(self):
        return {"field": self.field, "trials": self.trials, "seed": self.seed,
                "checked": self.checked, "skipped": self.skipped,
                "max_rel_error": self.max_rel_error, "tolerance": self.tolerance,
                "passed": self.passed}


def gradient_check(field: ScalarField, trials: int = 100, seed: int = 0, points=None,
                   raise_on_fail: bool = False) -> GradientCheckReport:
    """Compare ``grad`` with central differences at random interior points.

    The error at a point is ``|g - g_fd|_inf / max(|g|_inf, 1)``. Points
    within ``field.guard`` of a singularity or of the sampling region's
    boundary are skipped.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    lo = np.asarray(field.region.lo)
    hi = np.asarray(field.region.hi)
    if points is None:
        rng = np.random.default_rng(seed)
        points = lo + (hi - lo) * rng.random((trials, field.dim))
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))

    keep = np.all((pts - lo >= field.guard) & (hi - pts >= field.guard), axis=1)
    if field.id == "bump":
        keep &= np.sum(pts**2, axis=1) <= (1.0 - field.guard) ** 2
    for s in field.singularities:
        keep &= np.linalg.norm(pts - np.asarray(s), axis=1) >= field.guard
    pts = pts[keep]

    worst = 0.0
    if len(pts):
        g = field.grad(pts)
        fd = np.empty_like(g)
        for i in range(field.dim):
            e = np.zeros(field.dim)
            e[i] = FD_STEP
            fd[:, i] = (field.eval(pts + e) - field.eval(pts - e)) / (2 * FD_STEP)
        scale = np.maximum(np.max(np.abs(g), axis=1), 1.0)
        worst = float(np.max(np.max(np.abs(g - fd), axis=1) / scale))
    report = GradientCheckReport(field.id, trials, seed, int(len(pts)), int((~keep).sum()), worst)
    if raise_on_fail and not report.passed:
        raise GradientCheckError(
            f"gradient of {field.id!r} disagrees with central differences: {worst:.3e}")
    return report
