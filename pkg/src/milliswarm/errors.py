"""Exception types shared across the package.

Every error carries a stable machine-readable ``code`` so that callers
(and the CLI) can branch on failure kinds without parsing messages.
Two families matter for exit codes: ``ValidationError`` covers malformed
input and broken invariants, ``PlanningError`` covers well-formed
requests that have no solution.
"""


class MilliswarmError(Exception):
    code = "error"


class ValidationError(MilliswarmError):
    code = "validation"


class NonFiniteInput(ValidationError):
    code = "non-finite-input"


class SpanNonPositive(ValidationError):
    code = "span-non-positive"


class LengthNonPositive(ValidationError):
    code = "length-non-positive"


class SweepOutOfRange(ValidationError):
    code = "sweep-out-of-range"


class StepCountNonPositive(ValidationError):
    code = "step-count-non-positive"


class NegativeStepCount(ValidationError):
    code = "negative-step-count"


class MissingInitialPose(ValidationError):
    code = "missing-initial-pose"


class EqualSweepAngles(ValidationError):
    code = "equal-sweep-angles"


class ClosingAngleOutOfRange(ValidationError):
    code = "closing-angle-out-of-range"


class DegenerateSpans(ValidationError):
    code = "degenerate-spans"


class DimensionMismatch(ValidationError):
    code = "dimension-mismatch"


class NonFiniteEntries(ValidationError):
    code = "non-finite-entries"


class NonRigidTranslation(ValidationError):
    code = "non-rigid-translation"


class WorkspaceViolation(ValidationError):
    code = "workspace-violation"


class ParseError(ValidationError):
    code = "parse-error"


class SchemaError(ValidationError):
    code = "schema-error"


class UnitError(ValidationError):
    code = "unit-error"


class IoError(MilliswarmError):
    code = "io-error"


class PlanningError(MilliswarmError):
    code = "planning"


class Infeasible(PlanningError):
    code = "infeasible"


class Unreachable(PlanningError):
    code = "unreachable"


class SpanOutOfBounds(PlanningError):
    code = "span-out-of-bounds"


class NonParallelTargets(PlanningError):
    code = "non-parallel-targets"


class ResidualExceedsTolerance(PlanningError):
    code = "residual-exceeds-tolerance"


class ChannelTooNarrow(PlanningError):
    code = "channel-too-narrow"


class PhaseSolverFailure(PlanningError):
    code = "phase-solver-failure"
