class AdaMotifError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(AdaMotifError, ValueError):
    """An argument lies outside the domain of an operation."""


class GraphParseError(AdaMotifError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConvergenceError(AdaMotifError, RuntimeError):
    def __init__(self, message, iterations):
        self.iterations = iterations
        super().__init__(f"{message} (after {iterations} iterations)")


class PackingError(AdaMotifError, RuntimeError):
    """Motifs could not be separated on the canvas even after growing it."""


class StageError(AdaMotifError, RuntimeError):
    def __init__(self, stage, elapsed, cause):
        self.stage = stage
        self.elapsed = elapsed
        self.cause = cause
        super().__init__(f"stage '{stage}' failed after {elapsed:.2f}s: {cause}")
