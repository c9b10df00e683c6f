"""Finite frames: operators, optimal bounds, Parseval tests, Naimark dilation."""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .opcore import (
    DEFAULT_TOL,
    adjoint,
    as_columns,
    as_operator,
    fro,
    is_projector,
    numerical_rank,
)

__all__ = [
    "FrameSystem",
    "FrameBounds",
    "DilationResult",
    "operators_of",
    "frame_bounds",
    "parseval_residual",
    "is_parseval",
    "is_equal_norm",
    "project_frame",
    "naimark_dilate",
    "gram_matrix",
    "gram_equivalent",
    "mercedes_benz",
]


@dataclass(frozen=True, eq=False)
class FrameSystem:
    """An ordered list of ``m`` vectors in ``C^n``, stored as the ``n x m`` synthesis matrix."""

    synthesis: np.ndarray

    def __post_init__(self):
        t = as_operator(self.synthesis, "frame")
        object.__setattr__(self, "synthesis", t)

    @classmethod
    def from_vectors(cls, vectors, dim=None):
        cols = as_columns(vectors, dim)
        if cols.shape[1] == 0:
            raise InvalidInput("a frame needs at least one vector")
        return cls(cols)

    @property
    def dim(self):
        return self.synthesis.shape[0]

    @property
    def count(self):
        return self.synthesis.shape[1]

    def __len__(self):
        return self.count

    @property
    def vectors(self):
        return [self.synthesis[:, j].copy() for j in range(self.count)]

    def norms(self):
        return np.linalg.norm(self.synthesis, axis=0)


@dataclass(frozen=True)
class FrameBounds:
    """Optimal constants. For ordinary frames ``lower <= upper``; for K-frames
    ``lower`` can exceed ``upper`` when ``||K|| < 1``."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (self.lower >= 0 and self.upper >= 0):
            raise InvalidInput(f"invalid bounds ({self.lower}, {self.upper})")


@dataclass(frozen=True, eq=False)
class DilationResult:
    """Witness of ``f_j = P e_j`` (or ``f_j = K P e_j``) inside ``C^big_dim``.

    ``embed`` is the ``big_dim x n`` map from ``H`` into the big space; the
    frame vector is recovered as ``adjoint(embed) @ projector @ basis[:, j]``
    (followed by ``K`` for the K-frame version).
    """

    big_dim: int
    basis: np.ndarray
    projector: np.ndarray
    embed: np.ndarray
    residual: float


def operators_of(f):
    """Return ``(synthesis, analysis, frame_operator)`` of a frame."""
    t = f.synthesis
    t_star = adjoint(t)
    s = t @ t_star
    return t, t_star, 0.5 * (s + adjoint(s))


def frame_bounds(f, tol=DEFAULT_TOL):
    """Optimal frame bounds: extreme eigenvalues of the frame operator.

    ``lower`` is reported as exactly 0 when the vectors fail to span.
    """
    _, _, s = operators_of(f)
    ev = np.linalg.eigvalsh(s)
    upper = max(float(ev[-1]), 0.0)
    if numerical_rank(f.synthesis, tol) < f.dim:
        lower = 0.0
    else:
        lower = min(max(float(ev[0]), 0.0), upper)
    return FrameBounds(lower, upper)


def parseval_residual(f):
    _, _, s = operators_of(f)
    return fro(s - np.eye(f.dim))


def is_parseval(f, tol=DEFAULT_TOL):
    return parseval_residual(f) <= tol.eq_abs * np.sqrt(f.dim)


def is_equal_norm(f, tol=DEFAULT_TOL):
    """Return ``(flag, c)`` where ``c`` is the norm of the first vector."""
    norms = f.norms()
    c = float(norms[0])
    return bool(np.max(np.abs(norms - c)) <= tol.eq_abs), c


def project_frame(f, p, tol=DEFAULT_TOL):
    """Apply an orthogonal projector to every frame vector."""
    p = as_operator(p, "projector")
    if p.shape != (f.dim, f.dim) or not is_projector(p, tol):
        raise InvalidInput("p is not an orthogonal projector on the frame space", hypothesis="projector")
    return FrameSystem(p @ f.synthesis)


def naimark_dilate(f, tol=DEFAULT_TOL):
    """Minimal Naimark dilation of a Parseval frame.

    The analysis operator ``T^*`` is an isometry ``C^n -> C^m``; with
    ``P = T^* T`` and the standard basis ``e_j`` of ``C^m`` one has
    ``P e_j = T^* f_j``, i.e. ``f_j = P e_j`` once ``H`` is identified with
    its image.
    """
    n, m = f.dim, f.count
    if m < n:
        raise InvalidInput(f"{m} vectors cannot form a Parseval frame for C^{n}", hypothesis="parseval")
    res = parseval_residual(f)
    if res > tol.eq_abs * np.sqrt(n):
        raise InvalidInput("frame is not Parseval", hypothesis="parseval", residual=res)
    t, t_star, _ = operators_of(f)
    proj = t_star @ t
    proj = 0.5 * (proj + adjoint(proj))
    basis = np.eye(m, dtype=np.complex128)
    residual = float(np.max(np.linalg.norm(proj @ basis - t_star @ t, axis=0)))
    return DilationResult(big_dim=m, basis=basis, projector=proj, embed=t_star, residual=residual)


def gram_matrix(f):
    """``G[i, j] = <f_j, f_i>`` (inner product linear in the first slot)."""
    return adjoint(f.synthesis) @ f.synthesis


def gram_equivalent(f, g, tol=DEFAULT_TOL):
    """True when some unitary maps ``f_j`` to ``g_j`` for all ``j`` (equal Gram matrices)."""
    if f.count != g.count:
        raise InvalidInput(f"vector counts differ: {f.count} vs {g.count}", hypothesis="count")
    return fro(gram_matrix(f) - gram_matrix(g)) <= tol.eq_abs * f.count


def mercedes_benz():
    """The three-vector equal-norm Parseval frame for ``R^2``."""
    ang = 2 * np.pi * np.arange(3) / 3
    return FrameSystem(np.sqrt(2 / 3) * np.vstack([np.cos(ang), np.sin(ang)]))
