"""Exception hierarchy shared by the solvers and the CLI."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class InfeasibleDistortionError(DomainError):
    """No channel/decoder pair can meet the requested distortion."""


class FileFormatError(DomainError):
    """A pmf/channel/distortion document is malformed."""


class SearchExhaustedError(RuntimeError):
    """A witness search ran out of candidates without success."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
