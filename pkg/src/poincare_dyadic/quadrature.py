"""Per-cube power integrals and their aggregation into global norms.

Every cube contributes ``int |u|^p``, ``int |u|^q`` and ``int |grad u|^p``
computed with a tensor Gauss-Legendre rule (nodes are strictly inside the
cube, so cube boundaries never enter). Totals are compensated sums taken in
the decomposition's canonical order; the global norms are their roots.
"""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SingularCellError
from .geometry import AxisBox, Decomposition, DyadicCube
from .kernels import neumaier_sum, weighted_power_rows

DEFAULT_ORDER = 8
Q_CAP = 1e6
CHUNK = 1024


@dataclass(frozen=True)
class NormSpec:
    p: float
    q: float
    gauss_order: int = DEFAULT_ORDER

    def __post_init__(self):
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))
        if math.isinf(self.q):
            raise ValueError("q = inf is not supported: sup-norms are not quadrature-representable")
        if not (1.0 <= self.p < self.q <= Q_CAP):
            raise ValueError(f"need 1 <= p < q <= {Q_CAP:g}, got p={self.p}, q={self.q}")
        if int(self.gauss_order) != self.gauss_order or self.gauss_order < 1:
            raise ValueError("gauss_order must be a positive integer")
        object.__setattr__(self, "gauss_order", int(self.gauss_order))

    def to_dict(self):
        return {"p": self.p, "q": self.q, "gauss_order": self.gauss_order}


def stable_sum(terms) -> float:
    """Neumaier-compensated sum in the given order."""
    return float(neumaier_sum(np.asarray(terms, dtype=np.float64).ravel()))


@lru_cache(maxsize=64)
def unit_rule(order: int, dim: int):
    """Tensor Gauss-Legendre nodes on ``[0,1]^dim`` with weights summing to 1."""
    t, w = np.polynomial.legendre.leggauss(order)
    t = (t + 1.0) / 2.0
    w = w / 2.0
    nodes = np.array(list(itertools.product(t, repeat=dim)))
    weights = np.array([math.prod(c) for c in itertools.product(w, repeat=dim)])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _box_rows(cubes):
    if isinstance(cubes, Decomposition):
        return cubes.lo, cubes.hi
    if isinstance(cubes, DyadicCube):
        cubes = cubes.box
    if isinstance(cubes, AxisBox):
        return np.array([cubes.lo]), np.array([cubes.hi])
    lo, hi = cubes
    return np.atleast_2d(lo), np.atleast_2d(hi)


def _exact_rows(field, lo, hi, exponent, mode):
    out = np.array([field.antiderivative(exponent, a, b, mode) for a, b in zip(lo[:, 0], hi[:, 0])])
    if not np.all(np.isfinite(out)):
        raise SingularCellError(f"singular cell: {field.id} is not integrable to power {exponent} "
                                "on a cell touching its singularity")
    return out


def power_integrals(field, lo, hi, exponents, order: int = DEFAULT_ORDER):
    """Integrals over each box row for several ``(exponent, mode)`` pairs.

    Returns a list of arrays, one per requested pair.
    """
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if field.antiderivative is not None and field.dim == 1:
        return [_exact_rows(field, lo, hi, e, mode) for e, mode in exponents]
    bad = field.touches_singularity(lo, hi)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise SingularCellError(f"singular cell: [{lo[i].tolist()}, {hi[i].tolist()}] contains a "
                                f"singularity of {field.id} and no exact antiderivative is available")
    nodes, weights = unit_rule(order, lo.shape[1])
    width = hi - lo
    vol = np.prod(width, axis=1)
    pts = lo[:, None, :] + width[:, None, :] * nodes[None, :, :]
    need_value = any(mode == "value" for _, mode in exponents)
    need_grad = any(mode == "gradient" for _, mode in exponents)
    vals = field.eval(pts) if need_value else None
    gmag = np.sqrt(np.sum(field.grad(pts) ** 2, axis=-1)) if need_grad else None
    out = []
    for e, mode in exponents:
        data = vals if mode == "value" else gmag
        out.append(weighted_power_rows(np.ascontiguousarray(data), weights, float(e)) * vol)
    return out


def cell_power_integral(field, cube, exponent: float, mode: str = "value",
                        order: int = DEFAULT_ORDER) -> float:
    """``int_cube |u|^exponent`` (mode ``"value"``) or ``int_cube |grad u|^exponent``."""
    if mode not in ("value", "gradient"):
        raise ValueError("mode must be 'value' or 'gradient'")
    if order < 1:
        raise ValueError("order must be >= 1")
    lo, hi = _box_rows(cube)
    return float(power_integrals(field, lo, hi, [(exponent, mode)], order)[0][0])


@dataclass
class NormReport:
    spec: NormSpec
    field_id: str
    levels: np.ndarray
    indices: np.ndarray
    measure: np.ndarray
    up_pow: np.ndarray
    uq_pow: np.ndarray
    gradp_pow: np.ndarray

    def __post_init__(self):
        self.totals = {
            "measure": stable_sum(self.measure),
            "up_pow": stable_sum(self.up_pow),
            "uq_pow": stable_sum(self.uq_pow),
            "gradp_pow": stable_sum(self.gradp_pow),
        }
        p, q = self.spec.p, self.spec.q
        self.global_norms = {
            "u_p": self.totals["up_pow"] ** (1.0 / p),
            "u_q": self.totals["uq_pow"] ** (1.0 / q),
            "grad_p": self.totals["gradp_pow"] ** (1.0 / p),
        }

    def __len__(self):
        return len(self.measure)

    @property
    def per_cube(self):
        return [
            {"id": i, "level": int(j), "index": [int(v) for v in k], "measure": float(m),
             "up_pow": float(a), "uq_pow": float(b), "gradp_pow": float(g)}
            for i, (j, k, m, a, b, g) in enumerate(zip(self.levels, self.indices, self.measure,
                                                       self.up_pow, self.uq_pow, self.gradp_pow))
        ]

    def to_dict(self, per_cube: bool = True):
        d = {"spec": self.spec.to_dict(), "field": self.field_id, "cubes": len(self),
             "totals": dict(self.totals), "global_norms": dict(self.global_norms)}
        if per_cube:
            d["per_cube"] = self.per_cube
        return d

    def write_csv(self, fh):
        n = self.indices.shape[1] if self.indices.ndim == 2 else 0
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "level"] + [f"index_{i}" for i in range(n)]
                   + ["measure", "up_pow", "uq_pow", "gradp_pow"])
        for row in self.per_cube:
            w.writerow([row["id"], row["level"], *row["index"]]
                       + [repr(row[k]) for k in ("measure", "up_pow", "uq_pow", "gradp_pow")])


def global_norms(field, dec: Decomposition, spec: NormSpec, workers: int = 1) -> NormReport:
    """Per-cube integrals for ``field`` over ``dec`` and their additive totals.

    Cubes are processed in fixed-size chunks; ``workers`` threads only change
    who computes a chunk, never the arithmetic, so the report is bitwise
    independent of it.
    """
    if field.dim != dec.dim:
        raise ValueError(f"field {field.id!r} is {field.dim}-D but the decomposition is {dec.dim}-D")
    lo, hi = dec.lo, dec.hi
    wanted = [(spec.p, "value"), (spec.q, "value"), (spec.p, "gradient")]
    starts = range(0, len(dec), CHUNK)

    def run(s):
        return power_integrals(field, lo[s:s + CHUNK], hi[s:s + CHUNK], wanted, spec.gauss_order)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    if parts:
        up, uq, gp = (np.concatenate([pt[i] for pt in parts]) for i in range(3))
    else:
        up = uq = gp = np.zeros(0)
    return NormReport(spec, field.id, dec.levels.copy(), dec.indices.copy(), dec.volumes,
                      up, uq, gp)
