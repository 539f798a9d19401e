"""The inequality chain: Hoelder embedding, summability certificates and the
partition-based Poincare constant.

For ``1 <= p < q`` and an almost disjoint cover ``{U_k}`` of the domain,

    C(p, Omega) = (sum mu(U_k))^(1/p - 1/q) * (sum ||u||_q^q)^(1/q)
                  / (sum ||grad u||_p^p)^(1/p)

which is ``M ||u||_q / ||grad u||_p`` with ``M = mu(Omega)^(1/p - 1/q)``.
The constant depends on ``u``; :func:`catalog_estimates` reports it per field
and takes the maximum over the catalog as a domain-level figure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDomainError, EmbeddingViolatedError, GradientFreeFieldError
from .quadrature import NormReport, NormSpec, global_norms, stable_sum

IDENTITY_TOL = 1e-12
QUADRATURE_TOL = 1e-9

NESTED_COVER_NOTE = (
    "the sets U_k = (1/k, 1) are nested, not almost disjoint, so this cover does not meet "
    "the summability lemma's own hypothesis; the partial sums are reproduced anyway"
)


def embedding_constant(measure: float, spec: NormSpec) -> float:
    """``measure^(1/p - 1/q)``."""
    if not measure > 0:
        raise DegenerateDomainError(f"degenerate domain: measure {measure!r} is not positive")
    return measure ** (1.0 / spec.p - 1.0 / spec.q)


def _tol(scale):
    return IDENTITY_TOL * max(1.0, abs(scale))


@dataclass
class EmbeddingCheck:
    per_cube: np.ndarray
    global_margin: float

    @property
    def min_cube_margin(self):
        return float(self.per_cube.min()) if len(self.per_cube) else 0.0


def check_embedding(report: NormReport, raise_on_violation: bool = True) -> EmbeddingCheck:
    """Margins ``mu^(1/p-1/q) ||u||_q - ||u||_p`` per cube and globally."""
    p, q = report.spec.p, report.spec.q
    expo = 1.0 / p - 1.0 / q
    rhs = report.measure**expo * report.uq_pow ** (1.0 / q)
    lhs = report.up_pow ** (1.0 / p)
    cube_margin = rhs - lhs
    g = report.global_norms
    m = report.totals["measure"]
    big_m = m**expo if m > 0 else 0.0
    glob = big_m * g["u_q"] - g["u_p"]
    if raise_on_violation:
        bad = cube_margin < -IDENTITY_TOL * np.maximum(1.0, rhs)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise EmbeddingViolatedError(f"embedding violated on cube {i}: margin {cube_margin[i]:.3e}")
        if glob < -_tol(big_m * g["u_q"]):
            raise EmbeddingViolatedError(f"embedding violated globally: margin {glob:.3e}")
    return EmbeddingCheck(cube_margin, float(glob))


def local_estimate_terms(report: NormReport):
    """Terms ``mu(U_k)^(1-p/q) * (int |u|^q)^(p/q)`` and their compensated total."""
    p, q = report.spec.p, report.spec.q
    terms = report.measure ** (1.0 - p / q) * report.uq_pow ** (p / q)
    bad = report.up_pow > terms + IDENTITY_TOL * np.maximum(1.0, terms)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise EmbeddingViolatedError(
            f"embedding violated on cube {i}: {report.up_pow[i]!r} > local bound {terms[i]!r}")
    return terms, stable_sum(terms)


def k_epsilon(eps: float) -> float:
    """Upper bound ``(1 + eps)/eps`` for ``sum_k k^-(1+eps)``."""
    return (1.0 + eps) / eps


def lemma3_epsilon(n_pow: float) -> float:
    """An ``eps > 0`` with ``n_pow <= (1 + eps)/eps``.

    For ``n_pow <= 1`` every ``eps`` works and 1 is returned. Otherwise
    ``eps = 1/(n_pow - 1)``, stepped down by ulps if rounding would leave
    ``k_epsilon(eps)`` below ``n_pow``; smaller eps only loosens the bound.
    """
    if n_pow < 0 or math.isnan(n_pow):
        raise ValueError("n_pow must be a nonnegative number")
    if n_pow <= 1.0:
        return 1.0
    if math.isinf(n_pow):
        raise ValueError("no finite certificate for an infinite norm")
    eps = 1.0 / (n_pow - 1.0)
    while k_epsilon(eps) < n_pow:
        eps = math.nextafter(eps, 0.0)
    return eps


@dataclass
class EstimateResult:
    spec: NormSpec
    field_id: str
    measure: float
    embedding_constant: float
    n_pow: float
    N: float
    epsilon: float | None
    delta: float | None
    constant: float
    local_estimate_total: float
    actual_ratio: float
    chain_margin: float
    norms: dict
    min_cube_margin: float
    notes: list = field(default_factory=list)

    @property
    def M(self):
        return self.embedding_constant

    @property
    def C(self):
        return self.constant

    def to_dict(self):
        return {
            "spec": self.spec.to_dict(),
            "field": self.field_id,
            "measure": self.measure,
            "embedding_constant": self.embedding_constant,
            "N": self.N,
            "n_pow": self.n_pow,
            "epsilon": self.epsilon,
            "K_epsilon": None if self.epsilon is None else k_epsilon(self.epsilon),
            "delta": self.delta,
            "K_delta": None if self.delta is None else k_epsilon(self.delta),
            "constant": self.constant,
            "local_estimate_total": self.local_estimate_total,
            "actual_ratio": self.actual_ratio,
            "chain_margin": self.chain_margin,
            "min_cube_margin": self.min_cube_margin,
            "norms": dict(self.norms),
            "notes": list(self.notes),
        }


def theorem_constant(report: NormReport) -> EstimateResult:
    """The partition-based constant built from the three report totals."""
    t = report.totals
    g = report.global_norms
    if not t["gradp_pow"] > 0:
        raise GradientFreeFieldError(
            f"gradient-free field: sum of |grad {report.field_id}|^p over the cubes is zero, "
            "so C = M ||u||_q / ||grad u||_p is undefined")
    spec = report.spec
    big_m = embedding_constant(t["measure"], spec)
    constant = big_m * g["u_q"] / g["grad_p"]
    check = check_embedding(report)
    _, local_total = local_estimate_terms(report)
    notes = []
    if spec.p == 2:
        notes.append("p = 2: compare C with lambda_1^(-1/2) (unsquared norms) and lambda_1^(-1)")
    return EstimateResult(
        spec=spec,
        field_id=report.field_id,
        measure=t["measure"],
        embedding_constant=big_m,
        n_pow=t["gradp_pow"],
        N=g["grad_p"],
        epsilon=lemma3_epsilon(t["gradp_pow"]),
        delta=lemma3_epsilon(local_total),
        constant=constant,
        local_estimate_total=local_total,
        actual_ratio=g["u_p"] / g["grad_p"],
        chain_margin=check.global_margin,
        norms=dict(g),
        min_cube_margin=check.min_cube_margin,
        notes=notes,
    )


def estimate(field, dec, spec: NormSpec, workers: int = 1) -> EstimateResult:
    return theorem_constant(global_norms(field, dec, spec, workers=workers))


def catalog_estimates(fields, dec, spec: NormSpec, workers: int = 1):
    """Per-field results (gradient-free fields skipped) and the largest constant."""
    results = {}
    for f in fields:
        try:
            results[f.id] = estimate(f, dec, spec, workers)
        except GradientFreeFieldError:
            continue
    best = max((r.constant for r in results.values()), default=None)
    return results, best


def counterexample_partial_sums(k_max: int):
    """Rows ``(k, ||1/x||_{L^1(1/k, 1)}, running sum)`` for ``k = 1..k_max``."""
    from .fields import reciprocal

    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    f = reciprocal()
    rows = []
    total = 0.0
    comp = 0.0
    for k in range(1, k_max + 1):
        norm = f.antiderivative(1.0, 1.0 / k, 1.0) if k > 1 else 0.0
        # running Neumaier sum, same arithmetic as stable_sum over the prefix
        u = total + norm
        if abs(total) >= abs(norm):
            comp += (total - u) + norm
        else:
            comp += (norm - u) + total
        total = u
        rows.append((k, norm, total + comp))
    return rows


def divergence_crossing(rows, threshold: float = 1e3):
    """First ``k`` whose partial sum exceeds ``threshold``, or ``None``."""
    for k, _, s in rows:
        if s > threshold:
            return k
    return None
