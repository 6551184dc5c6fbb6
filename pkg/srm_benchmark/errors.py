"""
Exception hierarchy shared by every module of the benchmark. Argument-type problems
derive from ValueError so callers that only know about ValueError keep working.
"""


class SRMError(Exception):
    pass


class InvalidArgumentError(SRMError, ValueError):
    pass


class ConfigError(InvalidArgumentError):
    pass


class RegionUnreachableError(SRMError):
    pass


class YieldTooLowError(SRMError):
    def __init__(self, accepted, attempts, floor):
        self.accepted = accepted
        self.attempts = attempts
        self.floor = floor
        SRMError.__init__(self, f"feasible yield {accepted}/{attempts} is below the floor {floor:g}")


class DatasetParseError(SRMError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        SRMError.__init__(self, message)


class DatasetSchemaError(DatasetParseError):
    pass


class CheckpointError(SRMError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        SRMError.__init__(self, message)


class SingularGeometryError(SRMError):
    pass


class DegenerateGeometryError(SRMError):
    pass


class GeometryViolatedError(SRMError, AssertionError):
    pass


class DegenerateScaleError(SRMError):
    pass


class DegenerateGradientError(SRMError):
    pass


class NoConvergenceError(SRMError):
    pass


class DivergedError(SRMError):
    def __init__(self, step, loss):
        self.step = step
        self.loss = loss
        SRMError.__init__(self, f"training diverged at step {step} (loss={loss})")


class InfeasibleInstanceError(SRMError):
    def __init__(self, message, p0=None, index=None):
        self.p0 = p0
        self.index = index
        SRMError.__init__(self, message)
