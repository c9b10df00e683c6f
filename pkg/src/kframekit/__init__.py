"""Numerical toolkit for K-frames, Parseval K-frames and their K-duals in C^n."""
from .errors import (
    FrameError,
    HypothesisViolated,
    InvalidInput,
    IsometrySearchFailed,
    NoDualExists,
    NotAKFrame,
    NotInjective,
    NotRepresentable,
)
from .frames import *  # noqa: F401,F403
from .kduals import *  # noqa: F401,F403
from .kframes import *  # noqa: F401,F403
from .opcore import *  # noqa: F401,F403

__version__ = "0.1.0"
