"""K-duals: verification, the full dual family, and equal-norm dual construction."""
from dataclasses import dataclass

import numpy as np

from .errors import (
    HypothesisViolated,
    InvalidInput,
    IsometrySearchFailed,
    NoDualExists,
)
from .frames import FrameSystem, is_equal_norm
from .kframes import KFrameInstance, kframe_bounds
from .opcore import (
    DEFAULT_TOL,
    adjoint,
    as_operator,
    douglas_factor,
    fro,
    left_inverse,
    null_basis,
    numerical_rank,
    op_norm,
    orth_projector,
    pinv,
    random_complex,
    singular_values,
)

__all__ = [
    "DualPair",
    "ErrorIdentityReport",
    "EqualNormDualReport",
    "is_kdual",
    "kdual_family",
    "error_identity_report",
    "equal_norm_dual",
    "find_orthogonal_isometry",
    "reference_instance",
]


@dataclass(frozen=True, eq=False)
class DualPair:
    k: np.ndarray
    frame: FrameSystem
    dual: FrameSystem
    residual: float
    accepted: bool
    reconstruction_residual: float = float("nan")
    dual_is_kstar_frame: bool = False


@dataclass(frozen=True)
class ErrorIdentityReport:
    samples: int
    max_identity_residual: float
    accepted: bool
    t_minus_k_theta_sq: float
    lower_bound: float
    upper_bound: float
    lower_vacuous: bool
    bound_holds: bool


@dataclass(frozen=True)
class EqualNormDualReport:
    a: float
    norms: tuple
    max_norm_spread: float
    formula_value: float
    formula_applies: bool
    formula_residual: float
    duality_residual: float
    orthogonality_residual: float
    knat_norm_preserving: bool


def _check_pair(k, f, g):
    k = as_operator(k, "k")
    if f.count != g.count:
        raise InvalidInput(f"vector counts differ: {f.count} vs {g.count}", hypothesis="count")
    if not (f.dim == g.dim == k.shape[0] == k.shape[1]):
        raise InvalidInput("k, frame and dual dimensions disagree", hypothesis="dimensions")
    return k


def is_kdual(k, f, g, tol=DEFAULT_TOL, seed=0):
    """Check ``T Theta^* = K``; accepted pairs are also checked on random vectors.

    For an accepted pair the reconstruction ``Kx = sum <x, g_j> f_j`` is
    evaluated on 20 seeded random ``x`` and ``g`` is confirmed to be a
    ``K^*``-frame.
    """
    k = _check_pair(k, f, g)
    t, theta = f.synthesis, g.synthesis
    residual = fro(t @ adjoint(theta) - k)
    accepted = residual <= tol.eq_abs * max(1.0, op_norm(k))
    if not accepted:
        return DualPair(k, f, g, residual, False)
    rng = np.random.default_rng(seed)
    recon = 0.0
    for _ in range(20):
        x = random_complex(rng, f.dim)
        coeffs = adjoint(theta) @ x
        recon = max(recon, float(np.linalg.norm(k @ x - t @ coeffs)) / np.linalg.norm(x))
    kstar = numerical_rank(k, tol) == 0 or kframe_bounds(KFrameInstance(adjoint(k), g), tol).lower > 0
    return DualPair(k, f, g, residual, True, recon, bool(kstar))


def kdual_family(k, f, z=None, tol=DEFAULT_TOL):
    """The K-dual with ``V^* = T^+ K + (I - T^+ T) z^*``; ``z = 0`` gives the canonical one.

    Every K-dual of ``f`` arises this way for some ``n x m`` matrix ``z``.
    """
    k = as_operator(k, "k")
    t = f.synthesis
    n, m = t.shape
    if k.shape != (n, n):
        raise InvalidInput("k and frame dimensions disagree", hypothesis="dimensions")
    z = np.zeros((n, m)) if z is None else as_operator(z, "z")
    if z.shape != (n, m):
        raise InvalidInput(f"z must be {n} x {m}, got {z.shape}", hypothesis="dimensions")
    fac = douglas_factor(k, t, tol)
    if not fac.inclusion_ok:
        raise NoDualExists(
            "R(K) is not contained in R(T)", hypothesis="R(K)<=R(T)", residual=fac.inclusion_residual
        )
    t_dag = pinv(t, tol)
    v_star = t_dag @ k + (np.eye(m) - t_dag @ t) @ adjoint(z)
    return FrameSystem(adjoint(v_star))


def error_identity_report(k, f, g, tol=DEFAULT_TOL, samples=100, seed=0):
    """Check ``||(T^* - Theta^* K^*) x||^2 = ||K K^* x||^2 - ||K^* x||^2`` on random ``x``.

    Preconditions (each rejected by name): ``f`` is a Parseval K-frame,
    ``g`` is a K-dual of ``f``, and ``g`` is a Parseval ``K^*``-frame.  Also
    reports ``||T - K Theta||^2`` against the two-sided operator bound, with
    ``||(KK^*)^{-1}||`` taken on ``R(K)``.
    """
    k = _check_pair(k, f, g)
    if samples < 1:
        raise InvalidInput("samples must be positive")
    t, theta = f.synthesis, g.synthesis
    kk = k @ adjoint(k)
    knorm = op_norm(k)
    scale = tol.eq_abs * max(1.0, knorm**2) * np.sqrt(f.dim)
    checks = (
        ("parseval-kframe", fro(t @ adjoint(t) - kk)),
        ("kdual", fro(t @ adjoint(theta) - k)),
        ("parseval-kstar-frame", fro(theta @ adjoint(theta) - adjoint(k) @ k)),
    )
    for name, res in checks:
        if res > scale:
            raise HypothesisViolated(f"precondition {name} fails", hypothesis=name, residual=res)
    rng = np.random.default_rng(seed)
    diff = adjoint(t) - adjoint(theta) @ adjoint(k)
    worst = 0.0
    for _ in range(samples):
        x = random_complex(rng, f.dim)
        lhs = np.linalg.norm(diff @ x) ** 2
        rhs = np.linalg.norm(kk @ x) ** 2 - np.linalg.norm(adjoint(k) @ x) ** 2
        worst = max(worst, abs(lhs - rhs))
    gap = op_norm(t - k @ theta) ** 2
    s = singular_values(k)
    s_min = s[s > tol.cutoff(k.shape, s[0])].min() if s[0] > 0 else 0.0
    # ||(KK^*)^{-1}||^{-2} on R(K) is s_min^4
    lower = s_min**4 * (1.0 - knorm**2)
    upper = knorm**4
    slack = tol.eq_abs * max(1.0, upper)
    return ErrorIdentityReport(
        samples=samples,
        max_identity_residual=float(worst),
        accepted=bool(worst <= tol.eq_abs * max(1.0, knorm**4)),
        t_minus_k_theta_sq=float(gap),
        lower_bound=float(lower),
        upper_bound=float(upper),
        lower_vacuous=bool(lower <= 0),
        bound_holds=bool(lower - slack <= gap <= upper + slack),
    )


def _constraint_matrix(a_vecs, c_vecs):
    # row j: coefficients of a_j^* B c_j in vec(B) (row-major)
    return np.array([np.kron(np.conj(a), c) for a, c in zip(a_vecs.T, c_vecs.T)])


def find_orthogonal_isometry(a_vecs, c_vecs, tol=DEFAULT_TOL, seed=0, max_iter=500, restarts=8):
    """Search for an isometry ``B`` (``n x d``) with ``<a_j, B c_j> = 0`` for all ``j``.

    ``a_vecs`` is ``n x m`` and ``c_vecs`` is ``d x m``.  Alternates between the
    linear constraint space and the Stiefel manifold (polar factor), starting
    from seeded random isometries.  Returns ``B`` or raises
    :class:`IsometrySearchFailed`.
    """
    n, d = a_vecs.shape[0], c_vecs.shape[0]
    if d == 0:
        raise IsometrySearchFailed("null(T) is trivial: the K-dual is unique", hypothesis="isometry-exists")
    if d > n:
        raise IsometrySearchFailed(f"no isometry from C^{d} into C^{n}", hypothesis="isometry-exists")
    a_mat = _constraint_matrix(a_vecs, c_vecs)
    proj_null = np.eye(n * d) - pinv(a_mat, tol) @ a_mat
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(restarts):
        u, _, vh = np.linalg.svd(random_complex(rng, (n, d)), full_matrices=False)
        b = u @ vh
        for _ in range(max_iter):
            viol = float(np.max(np.abs(a_mat @ b.ravel())))
            best = min(best, viol)
            if viol <= tol.eq_abs:
                return b
            lin = (proj_null @ b.ravel()).reshape(n, d)
            if fro(lin) <= tol.eq_abs:
                break
            u, _, vh = np.linalg.svd(lin, full_matrices=False)
            b = u @ vh
    raise IsometrySearchFailed(
        "no isometry satisfies the orthogonality constraints", hypothesis="isometry-exists", residual=best
    )


def equal_norm_dual(k, f, a, u=None, tol=DEFAULT_TOL, seed=0):
    """Equal-norm K-dual ``g_j = K^nat f_j + a u delta_j`` of a Parseval K-frame.

    ``K^nat`` is the pseudo-inverse of the injective ``K``.  ``u`` (``n x m``)
    must be a partial isometry with initial space ``N(T)`` and satisfy
    ``<K^nat f_j, u delta_j> = 0``; if omitted it is searched for with
    :func:`find_orthogonal_isometry`.  Every nonzero ``a`` yields a distinct
    dual.  The closed-form norm is checked when ``f`` is equal-norm and
    ``KK^*`` is the projector onto ``R(K)``.

    Returns ``(dual_frame, report)``.
    """
    a = float(a)
    if a == 0 or not np.isfinite(a):
        raise InvalidInput("a must be a nonzero finite real", hypothesis="a!=0")
    k = as_operator(k, "k")
    t = f.synthesis
    n, m = t.shape
    if k.shape != (n, n):
        raise InvalidInput("k and frame dimensions disagree", hypothesis="dimensions")
    kk = k @ adjoint(k)
    res = fro(t @ adjoint(t) - kk)
    if res > tol.eq_abs * max(1.0, op_norm(k) ** 2) * np.sqrt(n):
        raise HypothesisViolated("f is not a Parseval K-frame", hypothesis="parseval-kframe", residual=res)
    knat = left_inverse(k, tol)
    pre = knat @ t
    c = null_basis(t, tol)
    if u is None:
        b = find_orthogonal_isometry(pre, adjoint(c), tol, seed=seed)
        u = b @ adjoint(c)
    else:
        u = as_operator(u, "u")
        if u.shape != (n, m):
            raise InvalidInput(f"u must be {n} x {m}, got {u.shape}", hypothesis="dimensions")
        err = fro(adjoint(u) @ u - c @ adjoint(c))
        if err > tol.eq_abs * np.sqrt(m):
            raise HypothesisViolated(
                "u is not a partial isometry with initial space N(T)", hypothesis="u-partial-isometry", residual=err
            )
    orth = float(np.max(np.abs(np.sum(np.conj(pre) * u, axis=0))))
    if orth > tol.eq_abs:
        raise HypothesisViolated(
            "<K^nat f_j, u delta_j> != 0", hypothesis="K^nat f_j perp u delta_j", residual=orth
        )
    theta = pre + a * u
    dual = FrameSystem(theta)
    norms = dual.norms()
    knorm = op_norm(k)
    formula = a**2 + (1 - 2 * a**2) * (n / m) * knorm**2 + (a**2 * n / m) * knorm**4
    p_k = orth_projector(k, tol)
    applies = is_equal_norm(f, tol)[0] and fro(kk - p_k) <= tol.eq_abs * np.sqrt(n)
    formula_res = float(np.max(np.abs(norms**2 - formula))) if applies else float("nan")
    report = EqualNormDualReport(
        a=a,
        norms=tuple(float(x) for x in norms),
        max_norm_spread=float(norms.max() - norms.min()),
        formula_value=float(formula),
        formula_applies=bool(applies),
        formula_residual=formula_res,
        duality_residual=fro(t @ adjoint(theta) - k),
        orthogonality_residual=float(np.max(np.abs(np.sum(np.conj(pre) * (a * u), axis=0)))),
        knat_norm_preserving=bool(np.max(np.abs(np.linalg.norm(pre, axis=0) - f.norms())) <= tol.eq_abs),
    )
    return dual, report


def reference_instance():
    """The ``n = 2, m = 4`` instance: ``K = I``, doubled scaled basis, explicit ``u``."""
    f = FrameSystem(np.hstack([np.eye(2), np.eye(2)]) / np.sqrt(2))
    # null(T) = {(x, y, -x, -y)}
    c = np.vstack([np.eye(2), -np.eye(2)]) / np.sqrt(2)
    b = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.eye(2, dtype=np.complex128), f, (b @ adjoint(c)).astype(np.complex128)
