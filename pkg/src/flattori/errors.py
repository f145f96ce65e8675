"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class FlattoriError(Exception):
    """Base class for all library errors."""

    exit_code = 2


class SpecError(FlattoriError):
    """Malformed or invalid curve/pair specification."""

    exit_code = 1


class AnalysisError(FlattoriError):
    """A numerical analysis step failed or its preconditions were violated."""

    exit_code = 2


class AdmissibilityError(FlattoriError):
    """A curve pair has an empty admissibility window."""

    exit_code = 3


class NonGenericCurveError(AnalysisError):
    """Self-intersections are not transversal double points."""


class LiftDivergedError(AnalysisError):
    """Fiber defect of a lift exceeded its bound."""


class ParallelSingularError(AnalysisError):
    """A parallel curve degenerates (cos(theta) - kappa*sin(theta) vanishes)."""
