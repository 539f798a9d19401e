"""Reference constants: the convex p=1 constant, the pi_p formula and the
first Dirichlet eigenvalue of the finite-difference Laplacian."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, SolverError
from .geometry import AxisBox, Ball, Domain, LShape, Union, diameter
from .kernels import laplacian_1d, laplacian_2d

EIG_RTOL = 1e-10
RESIDUAL_TOL = 1e-8
MAX_ITER = 10_000


@dataclass
class OracleReport:
    kind: str
    inputs: dict
    value: float
    lambda1: float | None = None
    alt_value: float | None = None
    iterations: int = 0
    residual: float = 0.0
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"kind": self.kind, "inputs": dict(self.inputs), "lambda1": self.lambda1,
                "value": self.value, "alt_value": self.alt_value,
                "iterations": self.iterations, "residual": self.residual,
                "notes": list(self.notes)}


def _convex_shape(domain):
    shape = domain.shape
    if isinstance(shape, Union) and len(shape.parts) == 1:
        shape = shape.parts[0]
    return isinstance(shape, (AxisBox, Ball))


def convex_p1_constant(domain: Domain) -> float:
    """``diam / 2``, the sharp p = 1 constant on convex domains."""
    if not _convex_shape(domain):
        raise ShapeError("oracle requires convex domain (box or ball)")
    return diameter(domain) / 2.0


def pi_p(p: float) -> float:
    """``2 pi (p-1)^(1/p) / (p sin(pi/p))``."""
    if not p > 1:
        raise ValueError("pi_p needs p > 1")
    return 2.0 * math.pi * (p - 1.0) ** (1.0 / p) / (p * math.sin(math.pi / p))


def convex_pp_constant(p: float, d: float) -> float:
    """``(pi_p / d)^p`` taken literally; :func:`convex_pp_report` adds ``d / pi_p``."""
    if p < 2:
        raise ValueError("the pi_p constant is stated for p >= 2")
    if not d > 0:
        raise ValueError("diameter must be positive")
    return (pi_p(p) / d) ** p


def convex_pp_report(p: float, d: float) -> OracleReport:
    val = convex_pp_constant(p, d)
    dual = d / pi_p(p)
    return OracleReport(
        "convex_pp", {"p": p, "diameter": d}, val, alt_value=dual,
        notes=["value is (pi_p/d)^p as stated; alt_value is d/pi_p, the form that matches "
               "lambda_1^(-1/2) for p = 2"])


def _grid(domain, grid_n):
    shape = domain.shape
    if not isinstance(shape, (AxisBox, LShape)) or shape.dim not in (1, 2):
        raise ShapeError("eigensolver supports intervals, boxes and L-shapes only")
    if grid_n < 8:
        raise ValueError("grid_n must be >= 8")
    box = domain.bounding_box
    h = np.asarray(box.widths) / grid_n
    axes = [box.lo[i] + h[i] * np.arange(1, grid_n) for i in range(box.dim)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    mask = shape.contains(mesh)
    return mask, 1.0 / h**2


def _operator(mask, coef):
    m8 = mask.astype(np.uint8)
    if mask.ndim == 1:
        return lambda x: laplacian_1d(x, m8, coef[0])
    return lambda x: laplacian_2d(x, m8, coef[0], coef[1])


def conjugate_gradient(apply, b, x0, rtol=1e-13, maxiter=None):
    """Plain CG for an SPD operator on masked grid arrays; returns ``(x, iterations)``."""
    x = x0.copy()
    r = b - apply(x)
    d = r.copy()
    rr = float(np.vdot(r, r))
    stop = (rtol * float(np.linalg.norm(b))) ** 2
    maxiter = maxiter or 10 * b.size
    it = 0
    while rr > stop and it < maxiter:
        ad = apply(d)
        alpha = rr / float(np.vdot(d, ad))
        x += alpha * d
        r -= alpha * ad
        rr_new = float(np.vdot(r, r))
        d = r + (rr_new / rr) * d
        rr = rr_new
        it += 1
    return x, it


def dirichlet_lambda1(domain: Domain, grid_n: int = 128, rtol: float = EIG_RTOL,
                      residual_tol: float = RESIDUAL_TOL, max_iter: int = MAX_ITER) -> OracleReport:
    """Smallest eigenvalue of the 3/5-point Dirichlet Laplacian by inverse iteration.

    Each step solves ``A w = v`` by conjugate gradients warm-started from
    ``v / lambda``. Stops once the Rayleigh quotient changes by at most
    ``rtol`` relatively and ``||A v - lambda v|| <= residual_tol``.
    """
    mask, coef = _grid(domain, grid_n)
    apply = _operator(mask, coef)
    v = mask.astype(np.float64)
    v /= np.linalg.norm(v)
    av = apply(v)
    lam = float(np.vdot(v, av))
    residual = math.inf
    for it in range(1, max_iter + 1):
        w, _ = conjugate_gradient(apply, v, v / lam)
        w /= np.linalg.norm(w)
        aw = apply(w)
        lam_new = float(np.vdot(w, aw))
        residual = float(np.linalg.norm(aw - lam_new * w))
        done = abs(lam_new - lam) <= rtol * lam_new and residual <= residual_tol
        v, lam = w, lam_new
        if done:
            break
    else:
        raise SolverError(f"inverse iteration did not converge in {max_iter} steps "
                          f"(residual {residual:.3e})", residual=residual, iterations=max_iter)
    return OracleReport(
        "dirichlet_p2", {"p": 2.0, "diameter": diameter(domain), "grid_n": grid_n}, 1.0 / lam,
        lambda1=lam, alt_value=lam**-0.5, iterations=it, residual=residual,
        notes=["value is lambda_1^-1 (squared-norm convention); alt_value is lambda_1^(-1/2)"])


def discrete_interval_eigenvalue(grid_n: int, length: float = 1.0) -> float:
    """Closed form ``(2/h^2)(1 - cos(pi h / L))`` for the 3-point stencil."""
    h = length / grid_n
    return 2.0 / h**2 * (1.0 - math.cos(math.pi * h / length))


def rayleigh_ratio(report) -> float:
    """``||grad u||_2 / ||u||_2`` from a p = 2 report."""
    if report.spec.p != 2:
        raise ValueError("rayleigh_ratio needs a report with p = 2")
    up = report.totals["up_pow"]
    if not up > 0:
        raise ValueError("rayleigh_ratio of the zero field is undefined")
    return math.sqrt(report.totals["gradp_pow"] / up)
