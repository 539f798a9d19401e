"""Poincare-constant estimates from dyadic inner decompositions."""

__version__ = "0.1.0"

from .errors import (DegenerateDomainError, EmbeddingViolatedError, GradientCheckError,
                     GradientFreeFieldError, PoincareError, ShapeError, SingularCellError,
                     SolverError, UnboundedDomainError)
from .estimates import (EstimateResult, check_embedding, counterexample_partial_sums,
                        embedding_constant, k_epsilon, lemma3_epsilon, local_estimate_terms,
                        theorem_constant)
from .fields import ScalarField, analytic_norm, catalog, get_field, gradient_check
from .geometry import (AxisBox, Ball, Decomposition, Domain, DyadicCube, LShape, classify_cube,
                       decompose, diameter, refine, total_measure)
from .kernels import BACKEND
from .oracles import (OracleReport, convex_p1_constant, convex_pp_constant, dirichlet_lambda1,
                      pi_p, rayleigh_ratio)
from .quadrature import NormReport, NormSpec, cell_power_integral, global_norms, stable_sum
