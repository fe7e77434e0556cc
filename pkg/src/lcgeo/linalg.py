"""Numerical linear algebra for the indefinite inner-product space R^{p+1,q+1}.

The metric is fixed diagonal: the first ``p_plus`` coordinates are spacelike
(+1), the last ``q_plus`` timelike (-1).  Vectors are plain numpy arrays
(real or complex; the complex extension of the form is bilinear, never
Hermitian).  Most functions broadcast over leading axes, so a "vector" of
shape (..., n) is a batch of vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Eigenvalues below RANK_RTOL * max|eigenvalue| count as null.
RANK_RTOL = 1e-9
# Ambiguity band: eigenvalues within 10x of the cutoff are flagged.
RANK_AMBIGUITY = 10.0


class DegenerateSubspaceError(ValueError):
    """Operation requires a nondegenerate subspace."""


class IndeterminateSignatureError(ValueError):
    """An eigenvalue sits too close to the rank cutoff to classify."""


@dataclass(frozen=True)
class AmbientSpace:
    """The pseudo-Euclidean space R^{p+1,q+1} with its diagonal bilinear form."""

    p_plus: int
    q_plus: int

    def __post_init__(self):
        if self.p_plus < 1 or self.q_plus < 1:
            raise ValueError("need at least one spacelike and one timelike direction")
        if self.dim > 10:
            raise ValueError("ambient dimension capped at 10")

    @property
    def dim(self) -> int:
        return self.p_plus + self.q_plus

    @property
    def metric_diag(self) -> np.ndarray:
        g = np.ones(self.dim)
        g[self.p_plus:] = -1.0
        return g

    @property
    def metric(self) -> np.ndarray:
        return np.diag(self.metric_diag)

    def basis(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def inner(self, x, y):
        """Bilinear form sum_i g_i x_i y_i, broadcasting over leading axes."""
        x = np.asarray(x)
        y = np.asarray(y)
        if x.shape[-1] != self.dim or y.shape[-1] != self.dim:
            raise ValueError(
                f"dimension mismatch: expected {self.dim}, "
                f"got {x.shape[-1]} and {y.shape[-1]}"
            )
        return (x * y * self.metric_diag).sum(axis=-1)

    def norm2(self, x):
        return self.inner(x, x)

    def is_lightlike(self, x, rtol: float = 1e-12) -> bool:
        x = np.asarray(x)
        scale = float((x * x).sum(axis=-1))
        return bool(abs(self.norm2(x)) <= rtol * max(scale, 1e-300))


def inner(space: AmbientSpace, x, y):
    return space.inner(x, y)


def wedge_apply(space: AmbientSpace, a, b, c):
    """(a^b)c = (a,c) b - (b,c) a, the wedge acting as a skew endomorphism."""
    a = np.asarray(a)
    b = np.asarray(b)
    ac = np.asarray(space.inner(a, c))[..., None]
    bc = np.asarray(space.inner(b, c))[..., None]
    return ac * b - bc * a


def wedge_matrix(space: AmbientSpace, a, b) -> np.ndarray:
    """Matrix of the wedge a^b, so wedge_matrix(a,b) @ c == wedge_apply(a,b,c).

    Supports batched a, b of shape (..., n); returns (..., n, n).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    g = space.metric_diag
    ga = a * g
    gb = b * g
    return b[..., :, None] * ga[..., None, :] - a[..., :, None] * gb[..., None, :]


class Bivector:
    """Skew endomorphism of the ambient space, stored as its full matrix.

    Skewness is with respect to the ambient form: (Mx, y) = -(x, My).
    """

    __slots__ = ("space", "mat")

    def __init__(self, space: AmbientSpace, mat: np.ndarray):
        mat = np.asarray(mat)
        if mat.shape[-2:] != (space.dim, space.dim):
            raise ValueError("matrix shape does not match ambient dimension")
        self.space = space
        self.mat = mat

    @classmethod
    def from_wedge(cls, space: AmbientSpace, a, b) -> "Bivector":
        return cls(space, wedge_matrix(space, a, b))

    @classmethod
    def zero(cls, space: AmbientSpace) -> "Bivector":
        return cls(space, np.zeros((space.dim, space.dim)))

    def apply(self, c):
        return self.mat @ np.asarray(c)

    def pair(self, other: "Bivector"):
        """Invariant pairing extending (a^b, c^d) = (a,c)(b,d) - (a,d)(b,c)."""
        return bivector_pairing_mat(self.mat, other.mat)

    def commutator(self, other: "Bivector") -> "Bivector":
        return Bivector(self.space, self.mat @ other.mat - other.mat @ self.mat)

    def pos_norm(self):
        return bivector_pos_norm(self.mat)

    def skewness_defect(self) -> float:
        gm = self.space.metric @ self.mat
        return float(np.max(np.abs(gm + gm.T)))

    def __add__(self, other):
        return Bivector(self.space, self.mat + other.mat)

    def __sub__(self, other):
        return Bivector(self.space, self.mat - other.mat)

    def __mul__(self, s):
        return Bivector(self.space, self.mat * s)

    __rmul__ = __mul__

    def __neg__(self):
        return Bivector(self.space, -self.mat)


def bivector_pairing_mat(m1: np.ndarray, m2: np.ndarray):
    """Pairing of two skew endomorphisms given as matrices: -tr(m1 m2)/2.

    On simple wedges this reproduces (a,c)(b,d) - (a,d)(b,c); the bilinear
    (non-Hermitian) extension is used for complex matrices.  Broadcasts over
    leading axes.
    """
    return -0.5 * np.einsum("...ij,...ji->...", m1, m2)


def bivector_pos_norm(mat: np.ndarray):
    """Positive-definite norm: Frobenius/sqrt(2) of the matrix.

    Equals the pairing norm with the sign of its negative part flipped
    (coefficients on the e_i^e_j basis enter with weight |g_i g_j| = 1).
    """
    return np.sqrt((np.abs(mat) ** 2).sum(axis=(-2, -1)) / 2.0)


def bivector_pairing(space: AmbientSpace, xi: Bivector, eta: Bivector):
    if xi.space.dim != space.dim or eta.space.dim != space.dim:
        raise ValueError("dimension mismatch")
    return xi.pair(eta)


@dataclass
class SubspaceFrame:
    """A subspace given by linearly independent spanning vectors (rows).

    Caches the Gram matrix and, for real frames, the signature triple
    (positive, negative, null) computed from Gram eigenvalues.
    """

    space: AmbientSpace
    vectors: np.ndarray
    _gram: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors))
        if v.shape[1] != self.space.dim:
            raise ValueError("spanning vectors do not match ambient dimension")
        sv = np.linalg.svd(v, compute_uv=False)
        if sv[-1] <= RANK_RTOL * sv[0]:
            raise ValueError("spanning set is not linearly independent")
        self.vectors = v
        self._gram = np.einsum("ik,k,jk->ij", v, self.space.metric_diag, v)

    @property
    def rank(self) -> int:
        return self.vectors.shape[0]

    @property
    def gram(self) -> np.ndarray:
        return self._gram

    def signature(self, rtol: float = RANK_RTOL) -> tuple[int, int, int]:
        """(positive, negative, null) eigenvalue counts of the Gram matrix."""
        if np.iscomplexobj(self.vectors):
            raise ValueError("signature is defined for real frames only")
        w = np.linalg.eigvalsh(self._gram)
        cut = rtol * max(np.abs(w).max(), 1e-300)
        aw = np.abs(w)
        ambiguous = (aw > cut / RANK_AMBIGUITY) & (aw < cut * RANK_AMBIGUITY)
        if ambiguous.any():
            raise IndeterminateSignatureError(
                f"eigenvalue within {RANK_AMBIGUITY}x of rank cutoff: {w}"
            )
        null = int((aw <= cut).sum())
        pos = int((w > cut).sum())
        return pos, self.rank - pos - null, null

    def is_degenerate(self) -> bool:
        return self.signature()[2] > 0

    def orthogonal_complement(self) -> "SubspaceFrame":
        """Frame for {y : (v, y) = 0 for all v in the subspace}."""
        a = self.vectors * self.space.metric_diag
        _, s, vh = np.linalg.svd(a, full_matrices=True)
        ns = vh[self.rank:]
        return SubspaceFrame(self.space, ns)

    def intersect(self, other: "SubspaceFrame") -> "SubspaceFrame":
        """Frame for the intersection, via the nullspace of stacked coordinates."""
        a = np.concatenate([self.vectors.T, -other.vectors.T], axis=1)
        _, s, vh = np.linalg.svd(a, full_matrices=True)
        cut = RANK_RTOL * max(s[0], 1e-300)
        rank = int((s > cut).sum())
        coeffs = vh[rank:, : self.rank]
        if coeffs.shape[0] == 0:
            raise ValueError("trivial intersection")
        return SubspaceFrame(self.space, coeffs @ self.vectors)

    def project(self, x) -> np.ndarray:
        """Orthogonal projection onto the subspace (requires nondegeneracy)."""
        if self.is_degenerate():
            raise DegenerateSubspaceError("cannot project onto a degenerate subspace")
        rhs = np.einsum("ik,k,...k->...i", self.vectors, self.space.metric_diag, np.asarray(x))
        coeff = np.linalg.solve(self._gram, rhs[..., None])[..., 0]
        return coeff @ self.vectors

    def contains(self, x, rtol: float = 1e-10) -> bool:
        x = np.asarray(x, dtype=float)
        res = x - np.linalg.lstsq(self.vectors.T, x, rcond=None)[0] @ self.vectors
        return bool(np.linalg.norm(res) <= rtol * max(np.linalg.norm(x), 1e-300))


def _canonical_null_direction(v: np.ndarray) -> np.ndarray:
    """Scale a null vector deterministically: unit length, first significant
    component positive."""
    v = v / np.linalg.norm(v)
    nz = np.nonzero(np.abs(v) > 1e-12)[0]
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def null_lines_in_plane(frame: SubspaceFrame) -> tuple[np.ndarray, np.ndarray]:
    """The two null lines of a signature (1,1) plane.

    Returns unit spanning vectors in a deterministic (lexicographic) order.
    """
    if frame.rank != 2:
        raise ValueError(f"expected a rank 2 frame, got rank {frame.rank}")
    sig = frame.signature()
    if sig != (1, 1, 0):
        raise ValueError(f"no null lines: plane signature is {sig}")
    w, vecs = np.linalg.eigh(frame.gram)
    # w[0] < 0 < w[1]; eigvector combinations e_+/sqrt(w_+) +- e_-/sqrt(-w_-)
    e_neg = vecs[:, 0] @ frame.vectors / np.sqrt(-w[0])
    e_pos = vecs[:, 1] @ frame.vectors / np.sqrt(w[1])
    v1 = _canonical_null_direction(e_pos + e_neg)
    v2 = _canonical_null_direction(e_pos - e_neg)
    if tuple(np.round(v2, 12)) < tuple(np.round(v1, 12)):
        v1, v2 = v2, v1
    return v1, v2


def random_pseudo_orthogonal(space: AmbientSpace, rng: np.random.Generator,
                             scale: float = 0.4) -> np.ndarray:
    """Random element of O(p+1,q+1) via the exponential of a G-skew matrix."""
    from scipy.linalg import expm

    n = space.dim
    a = rng.standard_normal((n, n))
    s = scale * (a - a.T)
    return expm(np.diag(space.metric_diag) @ s)


def principal_angles(basis1: np.ndarray, basis2: np.ndarray) -> np.ndarray:
    """Principal angles between the row spans (Euclidean geometry).

    Sine-based formula, accurate down to machine precision for small angles.
    """
    q1 = np.linalg.qr(np.asarray(basis1).T)[0]
    q2 = np.linalg.qr(np.asarray(basis2).T)[0]
    resid = q2 - q1 @ (q1.T @ q2)
    sv = np.linalg.svd(resid, compute_uv=False)
    k = min(q1.shape[1], q2.shape[1])
    return np.arcsin(np.clip(np.sort(sv)[::-1][:k], 0.0, 1.0))
