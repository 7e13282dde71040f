from typing import List, NamedTuple, Optional


class BestApproxError(Exception):
    """ Base class for every error raised by bestapprox """


class InvalidVectorError(BestApproxError, ValueError):
    """ Coordinates are empty, not one-dimensional, or not finite """

    reason: str

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"Invalid vector: {reason}")


class DimensionMismatchError(BestApproxError, ValueError):
    """ Two objects that must live in the same space do not """

    expected: int
    got: int

    def __init__(self, expected: int, got: int, what: str = 'vector'):
        self.expected = expected
        self.got = got
        self.what = what
        super().__init__(f"Dimension mismatch: {what} has dimension {got}, expected {expected}")


class InvalidSetError(BestApproxError, ValueError):
    """ A set expression was constructed with data that violates its invariants """

    variant: str
    field: str

    def __init__(self, variant: str, field: str, reason: str):
        self.variant = variant
        self.field = field
        self.reason = reason
        super().__init__(f"{variant}.{field}: {reason}")


class PreconditionError(BestApproxError, ValueError):
    """ An operation was called with arguments outside of its domain """

    operation: str

    def __init__(self, operation: str, reason: str):
        self.operation = operation
        self.reason = reason
        super().__init__(f"{operation}(): {reason}")


class NotEuclideanError(PreconditionError):
    """ A Euclidean-only solver was asked to work in another norm """

    def __init__(self, operation: str, norm):
        self.norm = norm
        super().__init__(operation, f"requires the Euclidean norm, got {norm}; use general_norm_descent()")


class EmptySetError(BestApproxError):
    """ A set turned out to be empty while projecting onto it """

    variant: str

    def __init__(self, variant: str, reason: str = 'no feasible point found'):
        self.variant = variant
        super().__init__(f"{variant} appears to be empty: {reason}")


class GridBudgetExceeded(BestApproxError):
    """ The oracle grid would have more points than allowed """

    points: int
    budget: int
    suggested_resolution: float

    def __init__(self, points: int, budget: int, suggested_resolution: float):
        self.points = points
        self.budget = budget
        self.suggested_resolution = suggested_resolution
        super().__init__(f"Grid of {points} points exceeds the budget of {budget}; "
                         f"try resolution={suggested_resolution:.3g}")


class SchemaIssue(NamedTuple):
    """ A single problem found in a problem-spec document """
    path: str
    message: str

    def __str__(self):
        return f'{self.path}: {self.message}'


class ProblemSchemaError(BestApproxError, ValueError):
    """ A problem-spec document failed validation """

    errors: List[SchemaIssue]

    def __init__(self, errors: List[SchemaIssue], source: Optional[str] = None):
        self.errors = list(errors)
        self.source = source
        where = f' in {source}' if source else ''
        super().__init__(f"{len(self.errors)} schema error(s){where}:\n" +
                         '\n'.join(f'  {e}' for e in self.errors))

    @property
    def paths(self) -> List[str]:
        return [e.path for e in self.errors]
