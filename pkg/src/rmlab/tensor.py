"""Dense tensor-algebra kernel.

Everything in this package lives in matrix algebras M_d^{(x) n}, the
n-fold tensor power of the d x d complex matrices, realized as dense
d^n x d^n arrays.  Conventions, used consistently everywhere:

* Kronecker/tensor factor 1 is the leftmost factor; ``kron(a, b)`` puts
  ``a`` on slot 1.  Row index (i-1)*d + j of a two-slot matrix means
  basis vector e_i (x) e_j.
* ``shift(x, k)`` prepends k identity slots on the left (the canonical
  endomorphism direction), ``embed(x, n)`` appends identity slots on
  the right (the trace-compatible inclusion).
* All traces are normalized: trace / dimension.  Unnormalized traces
  never cross a module boundary.

Levels are tracked explicitly through :class:`AlgebraElement` so that
mixing incompatible levels is an error rather than a silent reshape.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse.csgraph

from .errors import LevelError, NormalityError, ShapeError

__all__ = [
    "AlgebraElement",
    "EigenCluster",
    "as_complex_matrix",
    "eig_normal",
    "embed",
    "expectation_to_level",
    "frobenius_norm",
    "hs_inner",
    "identity_element",
    "is_unitary",
    "kron",
    "normalized_trace",
    "operator_norm_estimate",
    "partial_trace_left",
    "partial_trace_right",
    "shift",
]

#: Relative tolerance used to cluster eigenvalues of normal matrices.
CLUSTER_TOL = 1e-9


def as_complex_matrix(matrix) -> np.ndarray:
    """Coerce input to a finite, square complex ndarray."""
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ShapeError("matrix entries must be finite")
    return a


@dataclass(frozen=True)
class AlgebraElement:
    """A d^level x d^level matrix tagged with its local dimension and level.

    Level 0 is the scalars (a 1 x 1 matrix).  The tag is what lets
    embeddings, shifts and partial traces check direction instead of
    guessing from shapes.
    """

    d: int
    level: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.d < 1:
            raise ShapeError(f"local dimension must be >= 1, got {self.d}")
        if self.level < 0:
            raise LevelError(f"level must be >= 0, got {self.level}")
        m = as_complex_matrix(self.matrix)
        if m.shape[0] != self.d ** self.level:
            raise ShapeError(
                f"matrix has shape {m.shape}, expected "
                f"({self.d ** self.level}, {self.d ** self.level}) "
                f"for d={self.d}, level={self.level}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.d ** self.level


def identity_element(d: int, level: int) -> AlgebraElement:
    return AlgebraElement(d, level, np.eye(d ** level, dtype=complex))


def kron(a, b) -> np.ndarray:
    """Kronecker product with `a` on the left (slot 1)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def embed(x: AlgebraElement, target_level: int) -> AlgebraElement:
    """Include x into level ``target_level`` by tensoring identity on the right.

    This is the inclusion compatible with the normalized trace and with
    the conditional expectations onto lower levels.
    """
    if target_level < x.level:
        raise LevelError(
            f"cannot embed level {x.level} down to level {target_level}"
        )
    if target_level == x.level:
        return x
    pad = np.eye(x.d ** (target_level - x.level), dtype=complex)
    return AlgebraElement(x.d, target_level, kron(x.matrix, pad))


def shift(x: AlgebraElement, k: int = 1) -> AlgebraElement:
    """Tensor k identity slots on the left: the k-step canonical shift."""
    if k < 0:
        raise LevelError(f"shift steps must be >= 0, got {k}")
    if k == 0:
        return x
    pad = np.eye(x.d ** k, dtype=complex)
    return AlgebraElement(x.d, x.level + k, kron(pad, x.matrix))


def normalized_trace(x: AlgebraElement) -> complex:
    """tr(x) / d^level."""
    return complex(np.trace(x.matrix)) / x.dim


def partial_trace_left(x: AlgebraElement) -> AlgebraElement:
    """Normalized partial trace over slot 1, landing one level down."""
    if x.level < 1:
        raise LevelError("partial trace needs at least one slot")
    d, s = x.d, x.d ** (x.level - 1)
    m = x.matrix.reshape(d, s, d, s)
    out = np.einsum("asat->st", m) / d
    return AlgebraElement(d, x.level - 1, out)


def partial_trace_right(x: AlgebraElement) -> AlgebraElement:
    """Normalized partial trace over the last slot."""
    if x.level < 1:
        raise LevelError("partial trace needs at least one slot")
    d, s = x.d, x.d ** (x.level - 1)
    m = x.matrix.reshape(s, d, s, d)
    out = np.einsum("sbtb->st", m) / d
    return AlgebraElement(d, x.level - 1, out)


def expectation_to_level(x: AlgebraElement, n: int) -> AlgebraElement:
    """Iterated right partial trace down to level n (E_n; E_0 is the trace).

    Idempotent at n == level, a level error for n > level.
    """
    if n > x.level:
        raise LevelError(f"cannot take expectation up: {x.level} -> {n}")
    y = x
    while y.level > n:
        y = partial_trace_right(y)
    return y


def frobenius_norm(matrix) -> float:
    return float(np.linalg.norm(np.asarray(matrix, dtype=complex)))


def operator_norm_estimate(matrix) -> float:
    """Largest singular value (exact for the dense sizes used here)."""
    a = np.asarray(matrix, dtype=complex)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def is_unitary(matrix, tol: float = 1e-10) -> bool:
    a = as_complex_matrix(matrix)
    defect = frobenius_norm(a.conj().T @ a - np.eye(a.shape[0]))
    return defect <= tol


def hs_inner(a, b) -> complex:
    """Normalized Hilbert-Schmidt inner product tau(a* b).

    Conjugate-linear in the first argument.
    """
    am = np.asarray(a, dtype=complex)
    bm = np.asarray(b, dtype=complex)
    if am.shape != bm.shape:
        raise ShapeError(f"shape mismatch {am.shape} vs {bm.shape}")
    return complex(np.vdot(am, bm)) / am.shape[0]


class EigenCluster(NamedTuple):
    value: complex
    multiplicity: int
    projection: np.ndarray


def eig_normal(matrix, tol: float = CLUSTER_TOL) -> list[EigenCluster]:
    """Spectral decomposition of a normal matrix with eigenvalue clustering.

    Eigenvalues closer than ``tol`` times the spectral scale are merged
    into one cluster; each cluster gets the orthogonal projection onto
    its joint eigenspace.  Clusters are returned sorted by (real, imag)
    of the representative value, so the order is deterministic.

    Raises
    ------
    NormalityError
        if ``norm(x x* - x* x) > tol * norm(x)^2`` in Frobenius norm.
    """
    a = as_complex_matrix(matrix)
    n = a.shape[0]
    scale = frobenius_norm(a)
    defect = frobenius_norm(a @ a.conj().T - a.conj().T @ a)
    if defect > tol * max(scale * scale, 1e-300):
        raise NormalityError(
            f"matrix is not normal within tolerance: defect={defect:.3e}, "
            f"bound={tol * scale * scale:.3e}",
            defect=defect,
        )
    t, q = scipy.linalg.schur(a, output="complex")
    evals = np.diag(t)

    radius = tol * max(1.0, float(np.max(np.abs(evals))) if n else 1.0)
    # Cluster = connected component of the "closer than radius" graph.
    diff = np.abs(evals[:, None] - evals[None, :]) <= radius
    ncomp, labels = scipy.sparse.csgraph.connected_components(
        diff, directed=False
    )
    clusters = []
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        vecs = q[:, idx]
        proj = vecs @ vecs.conj().T
        value = complex(np.mean(evals[idx]))
        clusters.append(EigenCluster(value, len(idx), proj))
    clusters.sort(key=lambda cl: (cl.value.real, cl.value.imag))
    return clusters
