"""K-frames: bounds, Parseval K-frames and the constructions built on them."""
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisViolated, InvalidInput, NotAKFrame, NotRepresentable
from .frames import (
    DilationResult,
    FrameBounds,
    FrameSystem,
    naimark_dilate,
    operators_of,
)
from .opcore import (
    DEFAULT_TOL,
    Subspace,
    adjoint,
    as_operator,
    complete_to_onb,
    douglas_factor,
    fro,
    null_basis,
    numerical_rank,
    op_norm,
    orth_projector,
    pinv,
    random_unitary,
    range_basis,
    unitary_bases_map,
)

__all__ = [
    "KFrameInstance",
    "SpectralReport",
    "kframe_bounds",
    "parseval_kframe_residual",
    "is_parseval_kframe",
    "random_parseval_kframe",
    "canonical_parseval",
    "trace_eigen_report",
    "extend_to_knorm",
    "kframe_dilation",
    "coimage_projector",
    "frame_to_subspace",
    "subspace_to_frame",
]


@dataclass(frozen=True, eq=False)
class KFrameInstance:
    """A square operator ``k`` on ``C^n`` together with a frame in ``C^n``."""

    k: np.ndarray
    frame: FrameSystem

    def __post_init__(self):
        k = as_operator(self.k, "k")
        if k.shape[0] != k.shape[1]:
            raise InvalidInput(f"k must be square, got {k.shape}", hypothesis="dimensions")
        if k.shape[0] != self.frame.dim:
            raise InvalidInput(
                f"k acts on C^{k.shape[0]} but the frame lives in C^{self.frame.dim}",
                hypothesis="dimensions",
            )
        object.__setattr__(self, "k", k)

    @property
    def n(self):
        return self.frame.dim


@dataclass(frozen=True)
class SpectralReport:
    eigenvalues: tuple
    sum_norms_sq: float
    n_knorm_sq: float
    trace_kkstar: float
    trace_residual: float
    eigen_claim_holds: bool
    regime_scalar_kkstar: bool

    @property
    def scalar_regime_equalities_hold(self):
        # only asserted inside the scalar-KK* regime
        return self.regime_scalar_kkstar and self.eigen_claim_holds and abs(
            self.sum_norms_sq - self.n_knorm_sq
        ) <= 1e-9 * max(1.0, self.n_knorm_sq)


def _psd_sqrt(s):
    w, v = np.linalg.eigh(s)
    return (v * np.sqrt(np.clip(w, 0, None))) @ adjoint(v)


def kframe_bounds(inst, tol=DEFAULT_TOL):
    """Optimal constants ``(A, B)`` in ``A||K^* f||^2 <= sum |<f, f_j>|^2 <= B||f||^2``.

    Membership is decided by the range inclusion ``R(K) <= R(T)``.  The best
    lower constant is ``1 / ||(S^{1/2})^+ K||^2``, obtained by factoring ``K``
    through ``S^{1/2}``; it is 0 for non-members.  Note that ``A`` may exceed
    ``B`` when ``||K|| < 1``, since the two sides measure different norms.
    """
    t, _, s = operators_of(inst.frame)
    upper = max(float(np.linalg.eigvalsh(s)[-1]), 0.0)
    if numerical_rank(inst.k, tol) == 0:
        raise InvalidInput("k is the zero operator; every lower bound is admissible", hypothesis="nonzero-k")
    if not douglas_factor(inst.k, t, tol).inclusion_ok:
        return FrameBounds(0.0, upper)
    fac = douglas_factor(inst.k, _psd_sqrt(s), tol)
    return FrameBounds(1.0 / fac.norm_sq_u, upper)


def parseval_kframe_residual(inst):
    _, _, s = operators_of(inst.frame)
    return fro(s - inst.k @ adjoint(inst.k))


def _parseval_scale(inst, tol):
    return tol.eq_abs * max(1.0, op_norm(inst.k) ** 2) * np.sqrt(inst.n)


def is_parseval_kframe(inst, tol=DEFAULT_TOL):
    """A frame is a Parseval K-frame exactly when its frame operator equals ``K K^*``."""
    return parseval_kframe_residual(inst) <= _parseval_scale(inst, tol)


def random_parseval_kframe(k, m, seed):
    """``f_j = K w_j`` where ``w`` is the top ``n x m`` block of a Haar unitary."""
    k = as_operator(k, "k")
    n = k.shape[0]
    if m < n:
        raise InvalidInput(f"need m >= n, got m={m}, n={n}", hypothesis="m>=n")
    rng = np.random.default_rng(seed)
    w = random_unitary(m, rng)[:n, :]
    return KFrameInstance(k, FrameSystem(k @ w))


def canonical_parseval(inst, tol=DEFAULT_TOL):
    """Normalize a K-frame into a Parseval frame for ``R(K)``.

    Returns ``(frame, projector)`` with ``f'_j = S_r^{-1/2} P f_j`` where
    ``P`` projects onto ``R(K)`` and ``S_r^{-1/2}`` is the inverse square
    root of the frame operator compressed to ``R(K)``, extended by zero.
    Requires ``S(R(K)) = R(K)``.
    """
    _, _, s = operators_of(inst.frame)
    q = range_basis(inst.k, tol)
    sq = s @ q
    leak = fro(sq - q @ (adjoint(q) @ sq))
    if leak > tol.eq_abs * max(1.0, fro(s)):
        raise HypothesisViolated("S does not map R(K) onto itself", hypothesis="S(R(K))=R(K)", residual=leak)
    if kframe_bounds(inst, tol).lower == 0.0:
        raise NotAKFrame("not a K-frame: R(K) is not contained in R(T)", hypothesis="kframe")
    s_r = adjoint(q) @ sq
    w, v = np.linalg.eigh(0.5 * (s_r + adjoint(s_r)))
    if w[0] <= tol.cutoff(s_r.shape, w[-1]):
        raise HypothesisViolated("S is singular on R(K)", hypothesis="S(R(K))=R(K)", residual=float(w[0]))
    inv_root = q @ ((v / np.sqrt(w)) @ adjoint(v)) @ adjoint(q)
    proj = q @ adjoint(q)
    return FrameSystem(inv_root @ proj @ inst.frame.synthesis), proj


def trace_eigen_report(inst, tol=DEFAULT_TOL):
    """Spectrum of ``S`` versus ``||K||^2`` for a Parseval K-frame.

    The trace identity ``sum ||f_j||^2 = sum lambda_j = tr(KK^*)`` always
    holds; ``lambda_j = ||K||^2`` for all ``j`` only when ``KK^*`` is scalar,
    which is what ``regime_scalar_kkstar`` records.
    """
    res = parseval_kframe_residual(inst)
    if res > _parseval_scale(inst, tol):
        raise InvalidInput("not a Parseval K-frame", hypothesis="parseval-kframe", residual=res)
    _, _, s = operators_of(inst.frame)
    ev = np.linalg.eigvalsh(s)[::-1]
    kk = inst.k @ adjoint(inst.k)
    knorm_sq = op_norm(inst.k) ** 2
    sum_sq = float(np.sum(inst.frame.norms() ** 2))
    n = inst.n
    return SpectralReport(
        eigenvalues=tuple(float(x) for x in ev),
        sum_norms_sq=sum_sq,
        n_knorm_sq=n * knorm_sq,
        trace_kkstar=float(np.real(np.trace(kk))),
        trace_residual=abs(sum_sq - float(np.sum(ev))),
        eigen_claim_holds=bool(np.max(np.abs(ev - knorm_sq)) <= tol.eq_abs),
        regime_scalar_kkstar=bool(fro(kk - knorm_sq * np.eye(n)) <= tol.eq_abs * np.sqrt(n)),
    )


def extend_to_knorm(k, partial, tight_mode=False, tol=DEFAULT_TOL):
    """Extend vectors of norm ``||K||`` to a K-frame made of such vectors.

    Each ``f_j`` is completed to a basis of ``H`` (of ``R(K)`` in tight mode)
    whose members all have norm ``||K||``; the union of these ``M`` bases is
    returned, each block starting with the untouched ``f_j``.  The result is
    a K-frame with bounds ``(M, M ||K||^2)``; in tight mode it is tight on
    ``R(K)``, which needs every nonzero singular value of ``K`` equal.
    """
    k = as_operator(k, "k")
    n = k.shape[0]
    if partial.dim != n:
        raise InvalidInput("frame and operator dimensions differ", hypothesis="dimensions")
    knorm = op_norm(k)
    if knorm == 0:
        raise InvalidInput("k is the zero operator", hypothesis="nonzero-k")
    dev = float(np.max(np.abs(partial.norms() - knorm)))
    if dev > tol.eq_abs:
        raise InvalidInput("vectors do not all have norm ||K||", hypothesis="knorm-vectors", residual=dev)
    if tight_mode:
        cond = knorm * op_norm(pinv(k, tol))
        if abs(cond - 1.0) > tol.eq_rel:
            raise HypothesisViolated(
                f"||K|| ||K^+|| = {cond:.6g} != 1", hypothesis="||K|| ||K^+|| = 1", residual=abs(cond - 1.0)
            )
        q = range_basis(k, tol)
    else:
        q = np.eye(n, dtype=np.complex128)
    t = partial.synthesis
    out_of_range = fro(t - q @ (adjoint(q) @ t))
    if out_of_range > tol.eq_abs * max(1.0, fro(t)):
        raise HypothesisViolated("input vectors are not in R(K)", hypothesis="in-range", residual=out_of_range)
    blocks = []
    for j in range(partial.count):
        coords = adjoint(q) @ t[:, j] / knorm
        block = knorm * (q @ complete_to_onb([coords], q.shape[1], tol))
        block[:, 0] = t[:, j]
        blocks.append(block)
    return KFrameInstance(k, FrameSystem(np.hstack(blocks)))


def kframe_dilation(inst, tol=DEFAULT_TOL):
    """Dilation ``f_j = K P e_j`` of a Parseval K-frame.

    ``{K^+ f_j}`` is a Parseval frame for ``R(K^+) = R(K^*)``; in coordinates
    of that subspace it is dilated by :func:`naimark_dilate`.  The returned
    ``embed`` maps ``H`` into ``C^m`` (isometric on ``R(K^*)``), so
    ``f_j = K @ adjoint(embed) @ projector @ basis[:, j]``.
    """
    res = parseval_kframe_residual(inst)
    if res > _parseval_scale(inst, tol):
        raise InvalidInput("not a Parseval K-frame", hypothesis="parseval-kframe", residual=res)
    k, t = inst.k, inst.frame.synthesis
    if numerical_rank(k, tol) == 0:
        raise InvalidInput("k is the zero operator", hypothesis="nonzero-k")
    p_k = orth_projector(k, tol)
    p_t = orth_projector(t, tol)
    mutual = max(fro(t - p_k @ t) / max(1.0, fro(t)), fro(k - p_t @ k) / max(1.0, fro(k)))
    if mutual > tol.eq_abs * np.sqrt(inst.n):
        raise HypothesisViolated("R(T) != R(K)", hypothesis="R(T)=R(K)", residual=mutual)
    qs = range_basis(adjoint(k), tol)
    coords = adjoint(qs) @ (pinv(k, tol) @ t)
    dil = naimark_dilate(FrameSystem(coords), tol)
    embed = dil.embed @ adjoint(qs)
    recon = k @ adjoint(embed) @ dil.projector @ dil.basis
    residual = float(np.max(np.linalg.norm(t - recon, axis=0)))
    return DilationResult(
        big_dim=dil.big_dim, basis=dil.basis, projector=dil.projector, embed=embed, residual=residual
    )


def coimage_projector(k, tol=DEFAULT_TOL):
    """Orthogonal projector onto ``R(K^*) = R(K^+)``."""
    return orth_projector(adjoint(as_operator(k, "k")), tol)


def _check_coimage_projector(k, p, tol):
    k = as_operator(k, "k")
    p = as_operator(p, "p")
    n = k.shape[0]
    if k.shape != (n, n) or p.shape != (n, n):
        raise InvalidInput("k and p must be square of the same size", hypothesis="dimensions")
    err = fro(p - coimage_projector(k, tol))
    if err > tol.eq_abs * np.sqrt(n):
        raise InvalidInput("p is not the projector onto R(K^*)", hypothesis="p=P_R(K*)", residual=err)
    return k, p


def frame_to_subspace(k, p, f, tol=DEFAULT_TOL):
    """The subspace attached to a Parseval K-frame for ``KPH``.

    A frame lying in ``R(KP)`` is written ``f_j = KP e'_j`` for an
    orthonormal basis ``e'_j`` (recovered from ``x_j = (KP)^+ f_j`` plus a
    deterministic completion inside ``N(K)``) and mapped to
    ``U_F^* KP U_F H`` with ``U_F e_j = e'_j``.  A frame outside ``R(KP)``
    but unitarily equivalent to such a frame is read as the rotated
    representative ``U_F^* f_j`` and mapped to its span.
    """
    k, p = _check_coimage_projector(k, p, tol)
    n = k.shape[0]
    if f.dim != n or f.count != n:
        raise InvalidInput(f"expected {n} vectors in C^{n}", hypothesis="n-vectors")
    kp = k @ p
    q = range_basis(kp, tol)
    t = f.synthesis
    scale = tol.eq_abs * max(1.0, fro(t))
    if fro(t - q @ (adjoint(q) @ t)) <= scale:
        x = pinv(kp, tol) @ t
        if fro(x @ adjoint(x) - p) <= tol.eq_abs * np.sqrt(n) * max(1.0, fro(x) ** 2):
            e = x + null_basis(kp, tol) @ adjoint(null_basis(x, tol))
            u_f = unitary_bases_map(np.eye(n), e, tol)
            return Subspace.span_of(adjoint(u_f) @ kp @ u_f, tol)
    gram_ev = np.linalg.eigvalsh(adjoint(t) @ t)
    ref_ev = np.linalg.eigvalsh(adjoint(kp) @ kp)
    err = float(np.max(np.abs(gram_ev - ref_ev)))
    if err > tol.eq_abs * np.sqrt(n) * max(1.0, op_norm(k) ** 2) or numerical_rank(t, tol) != q.shape[1]:
        raise NotRepresentable(
            "frame is not unitarily equivalent to any {KP e'_j}", hypothesis="f_j=KPe'_j", residual=err
        )
    return Subspace.span_of(t, tol)


def subspace_to_frame(k, p, w, tol=DEFAULT_TOL):
    """Inverse of :func:`frame_to_subspace`: ``{u^* KP u e_j}`` with ``u W = R(KP)``."""
    k, p = _check_coimage_projector(k, p, tol)
    n = k.shape[0]
    kp = k @ p
    q = range_basis(kp, tol)
    if w.ambient_dim != n or w.dim != q.shape[1]:
        raise InvalidInput(
            f"subspace must have dimension rank(KP) = {q.shape[1]} in C^{n}", hypothesis="dimensions"
        )
    u = unitary_bases_map(w.basis, q, tol)
    return FrameSystem(adjoint(u) @ kp @ u)
