"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class PoincareError(Exception):
    exit_code = 1


class ShapeError(PoincareError, ValueError):
    exit_code = 2


class UnboundedDomainError(PoincareError, ValueError):
    exit_code = 3

    def __init__(self, what="domain"):
        super().__init__(
            f"unbounded {what} rejected: for a cover of an unbounded set by almost disjoint "
            "open sets the total measure sum_k mu(U_k) (Σμ(U_k)) diverges, so the factor "
            "(sum_k mu(U_k))^(1/p-1/q) in the constant C(p, Omega) is infinite "
            "and no Poincare estimate of this form exists"
        )


class GradientFreeFieldError(PoincareError, ArithmeticError):
    exit_code = 4


class SingularCellError(PoincareError, ArithmeticError):
    exit_code = 5


class SolverError(PoincareError, RuntimeError):
    exit_code = 6

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class GradientCheckError(PoincareError):
    exit_code = 7


class EmbeddingViolatedError(PoincareError, ArithmeticError):
    exit_code = 8


class DegenerateDomainError(PoincareError, ValueError):
    exit_code = 9
