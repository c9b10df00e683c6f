"""Exception hierarchy shared by every module.

The CLI maps :class:`InvalidInput` to exit code 2 and every other
:class:`FrameError` to exit code 1.
"""


class FrameError(Exception):
    """Base class. ``hypothesis`` names the failed condition, ``residual`` its size."""

    def __init__(self, message, hypothesis=None, residual=None):
        super().__init__(message)
        self.hypothesis = hypothesis
        self.residual = residual

    def to_dict(self):
        out = {"error": type(self).__name__, "message": str(self)}
        if self.hypothesis is not None:
            out["hypothesis"] = self.hypothesis
        if self.residual is not None:
            out["residual"] = float(self.residual)
        return out


class InvalidInput(FrameError, ValueError):
    pass


class HypothesisViolated(FrameError):
    pass


class NotAKFrame(HypothesisViolated):
    pass


class NotInjective(HypothesisViolated):
    pass


class NoDualExists(HypothesisViolated):
    pass


class NotRepresentable(HypothesisViolated):
    pass


class IsometrySearchFailed(FrameError):
    pass
