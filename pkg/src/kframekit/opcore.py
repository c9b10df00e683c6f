"""Dense operator algebra on finite-dimensional complex spaces.

Operators are plain ``numpy`` arrays of dtype ``complex128``; a vector is a
1-D array and a list of vectors is stored column-wise in a 2-D array.
Everything here is a pure function of its arguments.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotInjective

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "DouglasFactorization",
    "Subspace",
    "as_operator",
    "as_columns",
    "adjoint",
    "fro",
    "op_norm",
    "singular_values",
    "numerical_rank",
    "pinv",
    "penrose_residuals",
    "orth_projector",
    "is_projector",
    "range_basis",
    "null_basis",
    "douglas_factor",
    "complete_to_onb",
    "unitary_bases_map",
    "left_inverse",
    "principal_angles",
    "random_unitary",
    "random_complex",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds.

    ``rank_rel`` is scaled by ``max(rows, cols)`` and by the largest
    singular value before singular values are cut off.
    """

    rank_rel: float = 1e-12
    eq_abs: float = 1e-9
    eq_rel: float = 1e-8

    def __post_init__(self):
        for name in ("rank_rel", "eq_abs", "eq_rel"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidInput(f"tolerance {name} must be positive, got {value!r}")

    def cutoff(self, shape, smax):
        return self.rank_rel * max(shape) * smax


DEFAULT_TOL = Tolerance()


def as_operator(a, name="operator"):
    """Return ``a`` as a finite 2-D complex array or raise :class:`InvalidInput`."""
    try:
        arr = np.array(a, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name}: cannot convert to a complex matrix ({exc})") from None
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or 0 in arr.shape:
        raise InvalidInput(f"{name}: expected a non-empty matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name}: entries must be finite")
    return arr


def as_columns(vectors, ambient_dim=None, name="vectors"):
    """Stack a sequence of vectors (or a matrix of columns) into an ``n x k`` array.

    An empty sequence gives an ``n x 0`` array, which needs ``ambient_dim``.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        cols = np.array(vectors, dtype=np.complex128)
    else:
        vectors = list(vectors)
        if not vectors:
            if ambient_dim is None:
                raise InvalidInput(f"{name}: empty list needs an ambient dimension")
            return np.zeros((ambient_dim, 0), dtype=np.complex128)
        try:
            cols = np.array([np.asarray(v, dtype=np.complex128).ravel() for v in vectors]).T
        except ValueError:
            raise InvalidInput(f"{name}: vectors have unequal lengths") from None
    if ambient_dim is not None and cols.shape[0] != ambient_dim:
        raise InvalidInput(f"{name}: expected length {ambient_dim}, got {cols.shape[0]}")
    if not np.all(np.isfinite(cols)):
        raise InvalidInput(f"{name}: entries must be finite")
    return cols


def adjoint(a):
    return np.conj(a).T


def fro(a):
    return float(np.linalg.norm(a))


def op_norm(a):
    """Spectral norm (largest singular value)."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def singular_values(a):
    return np.linalg.svd(a, compute_uv=False)


def numerical_rank(a, tol=DEFAULT_TOL):
    s = singular_values(as_operator(a))
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol.cutoff(a.shape, s[0])))


def _fix_phase(cols):
    # first significant entry of each column made real and nonnegative
    cols = np.array(cols, dtype=np.complex128)
    for j in range(cols.shape[1]):
        col = cols[:, j]
        mags = np.abs(col)
        big = np.flatnonzero(mags > 1e-8 * max(mags.max(), 1e-300))
        if big.size:
            z = col[big[0]]
            cols[:, j] = col * (np.conj(z) / abs(z))
    return cols


def _svd(a, tol):
    u, s, vh = np.linalg.svd(a, full_matrices=True)
    if s.size == 0 or s[0] == 0:
        return u, s, vh, 0
    rank = int(np.sum(s > tol.cutoff(a.shape, s[0])))
    return u, s, vh, rank


def pinv(a, tol=DEFAULT_TOL):
    """Moore-Penrose pseudo-inverse by truncated SVD.

    Singular values at or below ``tol.rank_rel * max(a.shape) * s_max`` are
    treated as zero.
    """
    a = as_operator(a)
    u, s, vh, r = _svd(a, tol)
    if r == 0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=np.complex128)
    return (adjoint(vh[:r]) / s[:r]) @ adjoint(u[:, :r])


def penrose_residuals(a, a_dag):
    """Frobenius residuals of the four Penrose identities, in the usual order."""
    return (
        fro(a @ a_dag @ a - a),
        fro(a_dag @ a @ a_dag - a_dag),
        fro(adjoint(a @ a_dag) - a @ a_dag),
        fro(adjoint(a_dag @ a) - a_dag @ a),
    )


def orth_projector(a, tol=DEFAULT_TOL):
    """Orthogonal projector ``a a^+`` onto the range of ``a``.

    The projector onto the range of ``a^+`` (the co-image) is
    ``orth_projector(adjoint(a))``.
    """
    q = range_basis(a, tol)
    p = q @ adjoint(q)
    # exact Hermitian symmetry; the product above is Hermitian only up to rounding
    return 0.5 * (p + adjoint(p))


def is_projector(p, tol=DEFAULT_TOL):
    p = as_operator(p)
    if p.shape[0] != p.shape[1]:
        return False
    scale = tol.eq_abs * max(1.0, np.sqrt(p.shape[0]))
    return fro(p @ p - p) <= scale and fro(p - adjoint(p)) <= scale


def range_basis(a, tol=DEFAULT_TOL):
    """Orthonormal columns spanning the range of ``a`` (phase-normalized)."""
    a = as_operator(a)
    u, _, _, r = _svd(a, tol)
    return _fix_phase(u[:, :r])


def null_basis(a, tol=DEFAULT_TOL):
    """Orthonormal columns spanning the null space of ``a`` (phase-normalized)."""
    a = as_operator(a)
    _, _, vh, r = _svd(a, tol)
    return _fix_phase(adjoint(vh[r:]))


@dataclass(frozen=True, eq=False)
class DouglasFactorization:
    """Result of factoring ``l1 = l2 @ factor_u``.

    ``norm_sq_u`` is ``||factor_u||^2``, which equals the smallest ``alpha``
    with ``l1 l1^* <= alpha l2 l2^*`` whenever ``inclusion_ok`` holds.
    """

    factor_u: np.ndarray
    norm_sq_u: float
    inclusion_ok: bool
    inclusion_residual: float
    factor_residual: float
    kernel_ok: bool
    range_ok: bool


def douglas_factor(l1, l2, tol=DEFAULT_TOL):
    """Range-inclusion test and minimal factorization ``l1 = l2 u``.

    ``u = l2^+ l1`` is the unique solution with ``null(u) = null(l1)`` and
    ``range(u)`` inside ``range(l2^*)``; both facts are checked and reported.
    """
    l1 = as_operator(l1, "l1")
    l2 = as_operator(l2, "l2")
    if l1.shape[0] != l2.shape[0]:
        raise InvalidInput(
            f"row counts differ: l1 is {l1.shape}, l2 is {l2.shape}", hypothesis="dimensions"
        )
    l2_dag = pinv(l2, tol)
    scale = tol.eq_abs * max(1.0, fro(l1))
    incl = fro(l1 - l2 @ (l2_dag @ l1))
    u = l2_dag @ l1
    fac = fro(l1 - l2 @ u)
    kernel_ok = numerical_rank(u, tol) == numerical_rank(l1, tol) and fro(
        u @ null_basis(l1, tol)
    ) <= scale
    coimage = orth_projector(adjoint(l2), tol)
    range_ok = fro(u - coimage @ u) <= tol.eq_abs * max(1.0, fro(u))
    return DouglasFactorization(
        factor_u=u,
        norm_sq_u=op_norm(u) ** 2,
        inclusion_ok=bool(incl <= scale),
        inclusion_residual=incl,
        factor_residual=fac,
        kernel_ok=bool(kernel_ok),
        range_ok=bool(range_ok),
    )


def _check_orthonormal(cols, tol, name):
    k = cols.shape[1]
    if k == 0:
        return
    err = fro(adjoint(cols) @ cols - np.eye(k))
    if err > tol.eq_abs * max(1.0, np.sqrt(k)):
        raise InvalidInput(f"{name} is not orthonormal", hypothesis="orthonormal", residual=err)


def complete_to_onb(vs, ambient_dim, tol=DEFAULT_TOL):
    """Extend orthonormal vectors to an orthonormal basis of ``C^ambient_dim``.

    Returns an ``ambient_dim x ambient_dim`` unitary whose first columns are
    ``vs`` unchanged.  Standard basis vectors are orthogonalized against the
    current set in index order (two Gram-Schmidt passes); remainders that are
    numerically zero are skipped.
    """
    if ambient_dim < 1:
        raise InvalidInput("ambient dimension must be positive")
    cols = as_columns(vs, ambient_dim, "vs")
    if cols.shape[1] > ambient_dim:
        raise InvalidInput("more vectors than the ambient dimension")
    _check_orthonormal(cols, tol, "vs")
    # the accepted orthonormality slack must not pass for a new direction
    skip = max(tol.rank_rel * ambient_dim, 10 * tol.eq_abs)
    basis = [cols[:, j] for j in range(cols.shape[1])]
    added = []
    for i in range(ambient_dim):
        if len(basis) == ambient_dim:
            break
        x = np.zeros(ambient_dim, dtype=np.complex128)
        x[i] = 1.0
        for _ in range(2):
            for b in basis:
                x = x - np.vdot(b, x) * b
        nrm = np.linalg.norm(x)
        if nrm <= skip:
            continue
        x = x / nrm
        basis.append(x)
        added.append(len(basis) - 1)
    out = np.column_stack(basis)
    if added:
        out[:, added] = _fix_phase(out[:, added])
    return out


def unitary_bases_map(b1, b2, tol=DEFAULT_TOL):
    """Unitary ``u`` with ``u @ b1[j] = b2[j]`` for every ``j``.

    Both lists are completed with :func:`complete_to_onb` and ``u`` maps the
    first completed basis onto the second.
    """
    c1 = as_columns(b1, name="b1")
    c2 = as_columns(b2, name="b2")
    if c1.shape != c2.shape:
        raise InvalidInput(
            f"basis shapes differ: {c1.shape} vs {c2.shape}", hypothesis="dimensions"
        )
    n = c1.shape[0]
    full1 = complete_to_onb(c1, n, tol)
    full2 = complete_to_onb(c2, n, tol)
    return full2 @ adjoint(full1)


def left_inverse(k, tol=DEFAULT_TOL):
    """Left inverse of an injective ``k``; the pseudo-inverse is used."""
    k = as_operator(k, "k")
    r = numerical_rank(k, tol)
    if r < k.shape[1]:
        raise NotInjective(
            f"operator has rank {r} < {k.shape[1]} columns", hypothesis="injective"
        )
    return pinv(k, tol)


def principal_angles(a, b):
    """Principal angles (radians, descending) between the column spans of ``a`` and ``b``."""
    from scipy.linalg import subspace_angles

    return subspace_angles(np.asarray(a), np.asarray(b))


def random_complex(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(n, rng):
    """Haar-distributed ``n x n`` unitary (QR with the diagonal phase fix)."""
    q, r = np.linalg.qr(random_complex(rng, (n, n)))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of ``C^ambient_dim`` given by orthonormal columns."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        basis = as_columns(self.basis, self.ambient_dim, "basis")
        _check_orthonormal(basis, DEFAULT_TOL, "subspace basis")
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self):
        return self.basis.shape[1]

    @classmethod
    def span_of(cls, a, tol=DEFAULT_TOL):
        a = as_operator(a)
        return cls(a.shape[0], range_basis(a, tol))

    def projector(self):
        return self.basis @ adjoint(self.basis)
