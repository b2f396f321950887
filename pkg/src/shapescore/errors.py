"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front end:
2 for bad input, 3 for degenerate geometry, 4 for numerical failure.
"""


class ShapeScoreError(Exception):
    exit_code = 1

    def __init__(self, message, *, stage=None, cluster=None):
        super().__init__(message)
        self.stage = stage
        self.cluster = cluster

    def tag(self, stage=None, cluster=None):
        """Attach pipeline context if not already present; returns self."""
        if self.stage is None:
            self.stage = stage
        if self.cluster is None:
            self.cluster = cluster
        return self

    def __str__(self):
        msg = super().__str__()
        ctx = []
        if self.stage is not None:
            ctx.append(f"stage={self.stage}")
        if self.cluster is not None:
            ctx.append(f"cluster={self.cluster}")
        return f"{msg} [{', '.join(ctx)}]" if ctx else msg


class InputError(ShapeScoreError, ValueError):
    exit_code = 2


class ParseError(InputError):
    def __init__(self, message, line=None, **kw):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, **kw)
        self.line = line


class DimensionError(InputError):
    pass


class DegenerateGeometryError(ShapeScoreError, ValueError):
    exit_code = 3


class TooFewPointsError(DegenerateGeometryError):
    pass


class CollinearError(DegenerateGeometryError):
    pass


class DegenerateExtentError(DegenerateGeometryError):
    pass


class NonManifoldBoundaryError(DegenerateGeometryError):
    pass


class InvalidComplexError(DegenerateGeometryError):
    pass


class SingularPointError(DegenerateGeometryError):
    """Zero speed on a curve or a degenerate tangent plane on a surface."""

    def __init__(self, message, location=None, **kw):
        super().__init__(message, **kw)
        self.location = location


class NumericalError(ShapeScoreError, ArithmeticError):
    exit_code = 4


class DomainError(NumericalError, ValueError):
    pass


class InvalidWeightsError(NumericalError, ValueError):
    pass


class OverdeterminedError(NumericalError, ValueError):
    """Raised when a fit asks for more control points than data points."""


class RankDeficiencyError(NumericalError):
    pass
