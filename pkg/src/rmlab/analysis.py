"""Structural analysis of Yang-Baxter solutions.

The entry point is :func:`analyze`, which assembles an
:class:`AnalysisReport` out of independent sections: spectra, the
partial trace invariant, commutant towers, fixed points, ergodicity,
index bounds, concentration-based triviality, involutive normal forms
and (for d = 2) an explicit classification into the four known
families.  A failing section is recorded in ``report.errors`` instead
of aborting the rest.

Everything here is deterministic given the inputs and the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .errors import (
    DomainError,
    InternalConsistencyError,
    NormalFormError,
    RmlabError,
)
from .commutant import (
    SubalgebraBasis,
    fixed_subalgebra,
    operator_matrix,
    relative_commutant_L,
    relative_commutant_M,
    relative_commutant_N,
)
from .rmatrix import (
    NormalFormSpec,
    RMatrix,
    is_involutive,
    is_trivial,
    quasifree_conjugate,
    verify,
)
from .tensor import (
    AlgebraElement,
    eig_normal,
    frobenius_norm,
    operator_norm_estimate,
    partial_trace_left,
    partial_trace_right,
    shift,
)

__all__ = [
    "AnalysisReport",
    "ConcentrationData",
    "Dim2Classification",
    "ErgodicityResult",
    "IndexBounds",
    "PartialTraceData",
    "ReductionLeaf",
    "ReductionSplit",
    "ReductionResult",
    "analyze",
    "classify_dim2",
    "ergodicity_necessary_check",
    "index_bounds",
    "is_ergodic",
    "is_irreducible",
    "normal_form_of_involutive",
    "partial_trace_invariant",
    "phi_image",
    "reduce_involutive",
    "triviality_by_concentration",
    "CONCENTRATION_THRESHOLD",
]

#: Spectral concentration below this radius forces the solution to be
#: scalar: 1 - 2^(-1/4).
CONCENTRATION_THRESHOLD = 1.0 - 2.0 ** (-0.25)


def phi_image(r: RMatrix) -> np.ndarray:
    """Normalized left partial trace of R, a d x d matrix."""
    return partial_trace_left(r.as_element()).matrix


@dataclass(frozen=True)
class PartialTraceData:
    matrix: np.ndarray = field(repr=False)
    left_right_residual: float
    normality_defect: float
    operator_norm: float
    spectrum: tuple


def partial_trace_invariant(r: RMatrix, tol: float = 1e-10
                            ) -> PartialTraceData:
    """The left partial trace of R with its invariance certificates.

    For a verified solution the left and right partial traces agree,
    the common value is normal, and its operator norm is at most 1.
    Violations beyond ``tol`` are internal-consistency errors.
    """
    left = partial_trace_left(r.as_element()).matrix
    right = partial_trace_right(r.as_element()).matrix
    lr = frobenius_norm(left - right)
    defect = frobenius_norm(
        left @ left.conj().T - left.conj().T @ left
    )
    if lr > tol or defect > tol:
        raise InternalConsistencyError(
            f"partial trace invariance broken: left-right={lr:.3e}, "
            f"normality={defect:.3e}"
        )
    norm = operator_norm_estimate(left)
    if norm > 1.0 + tol:
        raise InternalConsistencyError(
            f"partial trace has operator norm {norm} > 1"
        )
    spectrum = tuple(
        (cl.value, cl.multiplicity) for cl in eig_normal(left)
    )
    return PartialTraceData(left, lr, defect, norm, spectrum)


@dataclass(frozen=True)
class ErgodicityResult:
    ergodic: bool
    max_deviation: float
    witness: tuple | None


def is_ergodic(r: RMatrix, tol: float = 1e-10) -> ErgodicityResult:
    """Test the averaging identity E_1(R (x (x) 1) R*) = tr(x) 1.

    Equivalent to the entrywise tensor identity
    sum_{m,n} R^{im}_{kn} conj(R^{jm}_{ln}) = delta_ij delta_kl; the
    worst-violating index tuple (i, j, k, l) is reported as witness.
    """
    d = r.d
    t4 = r.matrix.reshape(d, d, d, d)
    got = np.einsum("imkn,jmln->ijkl", t4, t4.conj())
    eye = np.eye(d)
    want = np.einsum("ij,kl->ijkl", eye, eye)
    dev = np.abs(got - want)
    max_dev = float(dev.max())
    if max_dev <= tol:
        return ErgodicityResult(True, max_dev, None)
    witness = tuple(int(v) for v in np.unravel_index(dev.argmax(), dev.shape))
    return ErgodicityResult(False, max_dev, witness)


def ergodicity_necessary_check(r: RMatrix) -> float:
    """|tr(R* phi(R)) - 1/d^2|, which vanishes for ergodic solutions."""
    d = r.d
    a = np.kron(r.matrix, np.eye(d, dtype=complex))
    b = shift(r.as_element(), 1).matrix
    value = complex(np.vdot(a, b)) / d ** 3
    return abs(value - 1.0 / d ** 2)


def is_irreducible(r: RMatrix, seed: int = 0) -> bool:
    """True when the level-1 relative commutant is the scalars."""
    return relative_commutant_M(r, 1, seed=seed).dimension == 1


@dataclass(frozen=True)
class IndexBounds:
    lower: float
    upper: float
    sources: tuple

    def __post_init__(self):
        if not (1.0 - 1e-12 <= self.lower <= self.upper + 1e-12):
            raise InternalConsistencyError(
                f"index bounds out of order: [{self.lower}, {self.upper}]"
            )


def index_bounds(r: RMatrix, tol: float = 1e-9) -> IndexBounds:
    """Rigorous lower and upper bounds for the endomorphism index.

    Lower: distinct eigenvalue counts of R and of its partial trace
    (the latter squared).  Upper: d^2 always, improved by the fourth
    power of the inverse partial trace norm when it is invertible.
    """
    d = r.d
    spec_r = eig_normal(r.matrix)
    phi = phi_image(r)
    spec_phi = eig_normal(phi)
    lower_r = float(len(spec_r))
    lower_phi = float(len(spec_phi)) ** 2
    lower = max(1.0, lower_r, lower_phi)
    sources = [
        f"distinct eigenvalues of R: {int(lower_r)}",
        f"distinct eigenvalues of partial trace, squared: {int(lower_phi)}",
        f"dimension bound d^2 = {d * d}",
    ]
    upper = float(d * d)
    min_abs = min(abs(cl.value) for cl in spec_phi)
    if min_abs > tol:
        inv_norm_bound = (1.0 / min_abs) ** 4
        if inv_norm_bound < upper:
            upper = inv_norm_bound
            sources.append(
                f"inverse partial trace norm^4: {inv_norm_bound:.6g}"
            )
    lower = min(lower, upper)
    return IndexBounds(lower, upper, tuple(sources))


@dataclass(frozen=True)
class ConcentrationData:
    margin: float
    threshold: float
    concluded_trivial: bool


def triviality_by_concentration(r: RMatrix) -> ConcentrationData:
    """Distance of the spectrum from the best single phase.

    margin = min over |mu| = 1 of max_k |lambda_k - mu|.  A margin
    below 1 - 2^(-1/4) forces the solution to be scalar; that
    implication is asserted and its failure would be an
    internal-consistency error.
    """
    evals = np.linalg.eigvals(r.matrix)

    def worst(theta: float) -> float:
        return float(np.max(np.abs(evals - np.exp(1j * theta))))

    grid = np.linspace(0.0, 2.0 * math.pi, 2048, endpoint=False)
    values = [worst(t) for t in grid]
    best = int(np.argmin(values))
    h = 2.0 * math.pi / 2048
    res = scipy.optimize.minimize_scalar(
        worst, bounds=(grid[best] - h, grid[best] + h), method="bounded",
        options={"xatol": 1e-12},
    )
    margin = float(min(res.fun, values[best]))
    concluded = margin < CONCENTRATION_THRESHOLD
    if concluded and not is_trivial(r):
        raise InternalConsistencyError(
            f"spectrum concentrated (margin {margin:.6f}) but the "
            "solution is not scalar"
        )
    return ConcentrationData(margin, CONCENTRATION_THRESHOLD, concluded)


def normal_form_of_involutive(r: RMatrix, tol: float = 1e-9
                              ) -> NormalFormSpec:
    """Read the block data of an involutive solution off its partial trace.

    The partial trace of a normal-form solution is constant on each
    block with value sign * dim / d, so an eigenvalue v of multiplicity
    m decodes to m / (d |v|) blocks of dimension d |v| and sign(v).
    Non-integer decodings mean the input is not equivalent to a normal
    form.
    """
    if not is_involutive(r, tol=max(tol, 1e-10)):
        raise DomainError("solution is not involutive")
    d = r.d
    phi = phi_image(r)
    herm_defect = frobenius_norm(phi - phi.conj().T)
    if herm_defect > tol:
        raise NormalFormError(
            f"partial trace not Hermitian (defect {herm_defect:.3e})"
        )
    blocks = []
    total = 0
    for cl in eig_normal((phi + phi.conj().T) / 2.0):
        v = cl.value.real
        if abs(v) * d < 0.5:
            raise NormalFormError(
                f"partial trace eigenvalue {v:.3e} too close to zero"
            )
        dim_f = abs(v) * d
        dim = round(dim_f)
        count_f = cl.multiplicity / dim_f
        count = round(count_f)
        if abs(dim_f - dim) > 1e-6 or abs(count_f - count) > 1e-6:
            raise NormalFormError(
                f"eigenvalue {v:.6f} (multiplicity {cl.multiplicity}) "
                "does not decode to integer block data"
            )
        sign = 1 if v > 0 else -1
        blocks.extend([(dim, sign)] * count)
        total += dim * count
    if total != d:
        raise NormalFormError(
            f"decoded blocks cover dimension {total}, expected {d}"
        )
    return NormalFormSpec(tuple(blocks))


@dataclass(frozen=True)
class ReductionLeaf:
    """A terminal factor: 'trivial' (= sign * identity) or 'flip'."""

    kind: str
    sign: int
    dim: int

    def blocks(self) -> tuple:
        if self.kind == "trivial":
            return ((self.dim, self.sign),)
        return ((1, self.sign),) * self.dim


@dataclass(frozen=True)
class ReductionSplit:
    dim: int
    conjugator: np.ndarray = field(repr=False)
    left: object
    right: object

    def blocks(self) -> tuple:
        return self.left.blocks() + self.right.blocks()


@dataclass(frozen=True)
class ReductionResult:
    root: object
    spec: NormalFormSpec

    @property
    def blocks(self) -> tuple:
        return self.spec.blocks


def _hermitian_probe(basis_mats, rng) -> np.ndarray:
    herm = []
    for b in basis_mats:
        herm.append((b + b.conj().T) / 2.0)
        herm.append((b - b.conj().T) / 2.0j)
    coeffs = rng.standard_normal(len(herm))
    return sum(c * h for c, h in zip(coeffs, herm))


def _split_projection(m: SubalgebraBasis, rng) -> np.ndarray:
    """A proper projection inside a non-scalar algebra span."""
    g = _hermitian_probe([b.matrix for b in m.basis], rng)
    clusters = eig_normal(g)
    if len(clusters) < 2:
        raise InternalConsistencyError(
            "probe of a non-scalar algebra produced one spectral cluster"
        )
    return clusters[0].projection


def reduce_involutive(r: RMatrix, tol: float = 1e-8, seed: int = 0
                      ) -> ReductionResult:
    """Recursively split an involutive solution along its commutant.

    Any proper projection p in the level-1 relative commutant induces
    a basis change after which the solution maps range(p) x range(p)
    and its complement pair into themselves (two smaller involutive
    solutions S and T) and swaps the mixed subspaces through some
    unitary off-diagonal block.  The summands are reduced in turn; the
    whole solution stays character-equivalent to the box sum of S and
    T regardless of the off-diagonal block.  Leaves are scalar (+-1)
    or irreducible with constant partial trace (the flip class);
    anything else stops the reduction with a normal-form error.  The
    collected leaf data is cross-checked against
    :func:`normal_form_of_involutive`.
    """
    if not is_involutive(r, tol=max(tol, 1e-10)):
        raise DomainError("solution is not involutive")
    rng = np.random.default_rng(seed)

    def descend(cur: RMatrix):
        d = cur.d
        if is_trivial(cur, tol=tol):
            c = complex(np.trace(cur.matrix)) / d ** 2
            sign = 1 if c.real > 0 else -1
            if abs(c - sign) > tol:
                raise NormalFormError(
                    f"scalar leaf value {c} is not +-1"
                )
            return ReductionLeaf("trivial", sign, d)
        m = relative_commutant_M(cur, 1, seed=int(rng.integers(2 ** 31)))
        if m.dimension == 1:
            phi = phi_image(cur)
            sign = 1 if np.trace(phi).real > 0 else -1
            resid = frobenius_norm(phi - sign * np.eye(d) / d)
            if resid > tol:
                raise NormalFormError(
                    "irreducible factor is neither scalar nor of flip "
                    f"class (partial trace residual {resid:.3e})"
                )
            return ReductionLeaf("flip", sign, d)
        p = _split_projection(m, rng)
        evals, vecs = np.linalg.eigh(p)
        order = np.argsort(-evals)
        rank = int(round(float(np.sum(evals > 0.5))))
        if rank < 1 or rank >= d:
            raise InternalConsistencyError(
                f"split projection has improper rank {rank}"
            )
        u = vecs[:, order].conj().T
        aligned = quasifree_conjugate(cur, u).matrix
        ww = [i * d + j for i in range(rank) for j in range(rank)]
        cc = [i * d + j for i in range(rank, d) for j in range(rank, d)]
        wc = [i * d + j for i in range(rank) for j in range(rank, d)]
        cw = [i * d + j for i in range(rank, d) for j in range(rank)]
        s = verify(aligned[np.ix_(ww, ww)], rank, tol=tol)
        t = verify(aligned[np.ix_(cc, cc)], d - rank, tol=tol)
        off = aligned[np.ix_(cw, wc)]
        recon = np.zeros_like(aligned)
        recon[np.ix_(ww, ww)] = s.matrix
        recon[np.ix_(cc, cc)] = t.matrix
        recon[np.ix_(cw, wc)] = off
        recon[np.ix_(wc, cw)] = off.conj().T
        unit_defect = frobenius_norm(
            off.conj().T @ off - np.eye(len(wc))
        )
        drift = frobenius_norm(aligned - recon)
        if drift > tol or unit_defect > tol:
            raise NormalFormError(
                "aligned solution does not split along the projection "
                f"(drift {drift:.3e}, off-block defect {unit_defect:.3e})"
            )
        return ReductionSplit(d, u, descend(s), descend(t))

    root = descend(r)
    spec = NormalFormSpec(root.blocks())
    direct = normal_form_of_involutive(r)
    if spec.blocks != direct.blocks:
        raise InternalConsistencyError(
            f"reduction blocks {spec.blocks} disagree with the partial "
            f"trace decoding {direct.blocks}"
        )
    return ReductionResult(root, spec)


@dataclass(frozen=True)
class Dim2Classification:
    family: int | None
    parameters: dict
    conjugator: np.ndarray | None = field(repr=False, default=None)
    residual: float = math.inf

    @property
    def classified(self) -> bool:
        return self.family is not None


_FAM2_SUPPORT = ((0, 0), (1, 2), (2, 1), (3, 3))
_FAM3_SUPPORT = ((0, 3), (1, 1), (2, 2), (3, 0))


def _off_support_norm(m: np.ndarray, support) -> float:
    masked = m.copy()
    for i, j in support:
        masked[i, j] = 0.0
    return frobenius_norm(masked)


def _conjugate_by(r: RMatrix, u: np.ndarray) -> np.ndarray:
    big = np.kron(u, u)
    return big @ r.matrix @ big.conj().T


def _basis_unitary_from_vector(v: np.ndarray) -> np.ndarray:
    """Unitary sending the line of v to e_1 (rows are the new basis)."""
    v = v / np.linalg.norm(v)
    if abs(v[0]) > 1e-12:
        v = v * (np.conj(v[0]) / abs(v[0]))
    else:
        v = v * (np.conj(v[1]) / abs(v[1]))
    w = np.array([-np.conj(v[1]), np.conj(v[0])], dtype=complex)
    return np.stack([v.conj(), w.conj()], axis=0)


def _vector_from_angles(theta: float, phase: float) -> np.ndarray:
    return np.array(
        [math.cos(theta / 2.0),
         np.exp(1j * phase) * math.sin(theta / 2.0)],
        dtype=complex,
    )


def _family4_canonical(q: complex) -> np.ndarray:
    s = q / math.sqrt(2.0)
    m = np.array(
        [
            [1.0, 1.0, 0.0, 0.0],
            [-1.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, -1.0],
            [0.0, 0.0, 1.0, 1.0],
        ],
        dtype=complex,
    )
    return s * m


def _try_family4(r: RMatrix, fixed: SubalgebraBasis, tol: float,
                 rng) -> Dim2Classification | None:
    g = _hermitian_probe([b.matrix for b in fixed.basis], rng)
    clusters = eig_normal(g)
    rank_one = [cl.projection for cl in clusters if cl.multiplicity == 1]
    for p in rank_one:
        evals, vecs = np.linalg.eigh(p)
        v = vecs[:, int(np.argmax(evals))]
        w = _basis_unitary_from_vector(v)
        aligned = _conjugate_by(r, w)
        off = aligned.copy()
        off[:2, :2] = 0.0
        off[2:, 2:] = 0.0
        if frobenius_norm(off) > 1e-6:
            continue
        q = aligned[0, 0] * math.sqrt(2.0)
        if abs(abs(q) - 1.0) > 1e-6:
            continue
        gamma = aligned[0, 1] / (q / math.sqrt(2.0))
        best = None
        for u2 in (np.diag([1.0, gamma]), np.diag([1.0, np.conj(gamma)])):
            candidate = u2 @ w
            resid = frobenius_norm(
                _conjugate_by(r, candidate) - _family4_canonical(q)
            )
            if best is None or resid < best[0]:
                best = (resid, candidate)
        if best is not None and best[0] <= tol:
            return Dim2Classification(
                4, {"q": complex(q)}, best[1], float(best[0])
            )
    return None


def _diag_seed_vectors(r: RMatrix) -> list:
    """Candidate eigenbasis vectors for the product-basis families.

    The map x -> (left partial trace of R (x (x) 1) R*) commutes with
    conjugation of R, and for the product-basis families its
    eigenvectors are supported on single matrix units of the right
    basis, so singular vectors of those eigenvectors recover the basis.
    The partial trace of R and the spectral projections of R^2
    contribute further seeds.
    """
    d = r.d
    seeds = []

    def push(vec):
        n = np.linalg.norm(vec)
        if n > 1e-9:
            seeds.append(np.asarray(vec, dtype=complex) / n)

    m = operator_matrix(
        lambda x: partial_trace_left(
            AlgebraElement(
                d, 2, r.matrix @ np.kron(x, np.eye(d)) @ r.matrix.conj().T
            )
        ).matrix,
        d, 1,
    )
    _, vecs = np.linalg.eig(m)
    for i in range(vecs.shape[1]):
        x = vecs[:, i].reshape(d, d)
        u_l, _, v_r = np.linalg.svd(x)
        push(u_l[:, 0])
        push(v_r[0, :].conj())
    try:
        for cl in eig_normal(phi_image(r)):
            if cl.multiplicity == 1:
                ev, evec = np.linalg.eigh(cl.projection)
                push(evec[:, int(np.argmax(ev))])
    except RmlabError:
        pass
    for cl in eig_normal(r.matrix @ r.matrix):
        for side in (partial_trace_left, partial_trace_right):
            reduced = side(AlgebraElement(d, 2, cl.projection)).matrix
            ev, evec = np.linalg.eigh(reduced)
            push(evec[:, int(np.argmax(ev))])
    return seeds


#: Change of basis carrying the overlap form q*diag-antidiag(1,-1,-1,1)
#: onto antidiagonal support.  The diagonal and antidiagonal families
#: intersect in a single quasifree orbit; its members are reported as
#: family 3, whose split-commutant condition q^2 = p r they satisfy.
_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


def _extract_product_family(r: RMatrix, w: np.ndarray, tol: float
                            ) -> Dim2Classification | None:
    aligned = _conjugate_by(r, w)
    s2 = _off_support_norm(aligned, _FAM2_SUPPORT)
    s3 = _off_support_norm(aligned, _FAM3_SUPPORT)
    if min(s2, s3) > tol:
        return None
    if s2 <= s3:
        p, q = complex(aligned[0, 0]), complex(aligned[1, 2])
        rr, s = complex(aligned[2, 1]), complex(aligned[3, 3])
        on_overlap = max(abs(p - s), abs(q - rr), abs(q + p)) <= max(tol, s2)
        if on_overlap:
            promoted = _extract_product_family(r, _HADAMARD @ w, tol)
            if promoted is not None and promoted.family == 3:
                return promoted
        params = {"p": p, "q": q, "r": rr, "s": s}
        return Dim2Classification(2, params, w, float(s2))
    mid = abs(aligned[1, 1] - aligned[2, 2])
    if mid > tol:
        return None
    params = {
        "p": complex(aligned[0, 3]),
        "q": complex((aligned[1, 1] + aligned[2, 2]) / 2.0),
        "r": complex(aligned[3, 0]),
    }
    return Dim2Classification(3, params, w, float(s3))


def classify_dim2(r: RMatrix, tol: float = 1e-8, seed: int = 0
                  ) -> Dim2Classification:
    """Classify a d = 2 solution into the four known families.

    Decision order: scalar solutions; solutions with nontrivial
    endomorphism fixed points (the Pauli-type family); then a search
    for a product eigenbasis exposing the diagonal and
    antidiagonal families.  Unclassifiable inputs are returned with
    ``family=None`` and the best residual found.
    """
    if r.d != 2:
        raise DomainError(f"classification needs d = 2, got d = {r.d}")
    rng = np.random.default_rng(seed)

    if is_trivial(r):
        q = complex(np.trace(r.matrix)) / 4.0
        resid = frobenius_norm(r.matrix - q * np.eye(4))
        return Dim2Classification(
            1, {"q": q}, np.eye(2, dtype=complex), float(resid)
        )

    fixed = fixed_subalgebra(r, 1, seed=seed)
    if fixed.dimension > 1:
        out = _try_family4(r, fixed, tol, rng)
        if out is not None:
            return out

    best_resid = math.inf
    # Structural seeds first; they are usually exact.
    for v in _diag_seed_vectors(r):
        w = _basis_unitary_from_vector(v)
        out = _extract_product_family(r, w, tol)
        if out is not None:
            return out
        aligned = _conjugate_by(r, w)
        best_resid = min(
            best_resid,
            _off_support_norm(aligned, _FAM2_SUPPORT),
            _off_support_norm(aligned, _FAM3_SUPPORT),
        )

    def objective(angles) -> float:
        w = _basis_unitary_from_vector(
            _vector_from_angles(angles[0], angles[1])
        )
        aligned = _conjugate_by(r, w)
        return min(
            _off_support_norm(aligned, _FAM2_SUPPORT),
            _off_support_norm(aligned, _FAM3_SUPPORT),
        )

    starts = []
    golden = math.pi * (3.0 - math.sqrt(5.0))
    for i in range(32):
        z = 1.0 - 2.0 * (i + 0.5) / 32.0
        starts.append((math.acos(z), (golden * i) % (2.0 * math.pi)))
    for theta, phase in starts:
        res = scipy.optimize.minimize(
            objective, np.array([theta, phase]), method="Nelder-Mead",
            options={"maxiter": 400, "xatol": 1e-12, "fatol": 1e-14},
        )
        best_resid = min(best_resid, float(res.fun))
        if res.fun <= tol:
            w = _basis_unitary_from_vector(
                _vector_from_angles(res.x[0], res.x[1])
            )
            out = _extract_product_family(r, w, tol)
            if out is not None:
                return out
    return Dim2Classification(None, {}, None, float(best_resid))


def _feasible_fixed_cap(d: int, cap: int) -> int:
    n = 1
    while d ** (2 * (n + 1)) <= 4096 and n + 1 <= cap:
        n += 1
    return n


@dataclass
class AnalysisReport:
    label: str
    d: int
    n_cap: int
    fixed_cap: int
    seed: int
    ybe_residual: float
    unitarity_residual: float
    involutive: bool
    trivial: bool
    spectrum: tuple | None = None
    partial_trace: PartialTraceData | None = None
    commutants: dict = field(default_factory=dict)
    fixed_dims: tuple | None = None
    ergodic: ErgodicityResult | None = None
    necessary_gap: float | None = None
    irreducible: bool | None = None
    bounds: IndexBounds | None = None
    concentration: ConcentrationData | None = None
    normal_form: NormalFormSpec | None = None
    dim2: Dim2Classification | None = None
    exact_index: tuple | None = None
    errors: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def pair(z):
            z = complex(z)
            return [float(z.real), float(z.imag)]

        def matrix_entries(m):
            return [pair(v) for v in np.asarray(m, dtype=complex).reshape(-1)]

        out: dict = {
            "label": self.label,
            "d": self.d,
            "n_cap": self.n_cap,
            "fixed_cap": self.fixed_cap,
            "seed": self.seed,
            "ybe_residual": float(self.ybe_residual),
            "unitarity_residual": float(self.unitarity_residual),
            "involutive": self.involutive,
            "trivial": self.trivial,
            "errors": dict(self.errors),
        }
        if self.spectrum is not None:
            out["spectrum"] = [
                {"value": pair(v), "multiplicity": m} for v, m in self.spectrum
            ]
        if self.partial_trace is not None:
            pt = self.partial_trace
            out["partial_trace"] = {
                "matrix": matrix_entries(pt.matrix),
                "left_right_residual": float(pt.left_right_residual),
                "normality_defect": float(pt.normality_defect),
                "operator_norm": float(pt.operator_norm),
                "spectrum": [
                    {"value": pair(v), "multiplicity": m}
                    for v, m in pt.spectrum
                ],
            }
        if self.commutants:
            out["commutants"] = {
                str(n): {
                    name: {
                        "dimension": b.dimension,
                        "profile": (
                            list(b.block_profile)
                            if b.block_profile is not None else None
                        ),
                        "profile_text": b.profile_text(),
                        "converged": b.converged,
                    }
                    for name, b in by_name.items()
                }
                for n, by_name in self.commutants.items()
            }
        if self.fixed_dims is not None:
            out["fixed_dims"] = list(self.fixed_dims)
        if self.ergodic is not None:
            out["ergodic"] = {
                "ergodic": self.ergodic.ergodic,
                "max_deviation": float(self.ergodic.max_deviation),
                "witness": (
                    list(self.ergodic.witness)
                    if self.ergodic.witness is not None else None
                ),
            }
        if self.necessary_gap is not None:
            out["necessary_gap"] = float(self.necessary_gap)
        if self.irreducible is not None:
            out["irreducible"] = self.irreducible
        if self.bounds is not None:
            out["index_bounds"] = {
                "lower": float(self.bounds.lower),
                "upper": float(self.bounds.upper),
                "sources": list(self.bounds.sources),
            }
        if self.concentration is not None:
            out["concentration"] = {
                "margin": float(self.concentration.margin),
                "threshold": float(self.concentration.threshold),
                "concluded_trivial": self.concentration.concluded_trivial,
            }
        if self.normal_form is not None:
            out["normal_form"] = [
                {"dim": dim, "sign": sign}
                for dim, sign in self.normal_form.blocks
            ]
        if self.dim2 is not None:
            out["dim2"] = {
                "family": self.dim2.family,
                "parameters": {
                    k: pair(v) for k, v in sorted(self.dim2.parameters.items())
                },
                "conjugator": (
                    matrix_entries(self.dim2.conjugator)
                    if self.dim2.conjugator is not None else None
                ),
                "residual": float(self.dim2.residual),
            }
        if self.exact_index is not None:
            out["exact_index"] = {
                "value": float(self.exact_index[0]),
                "reason": self.exact_index[1],
            }
        return out

    def to_markdown(self) -> str:
        lines = [f"# Analysis: {self.label or 'unnamed solution'}", ""]
        lines.append(
            f"* d = {self.d}, residuals: ybe {self.ybe_residual:.3e}, "
            f"unitarity {self.unitarity_residual:.3e}"
        )
        note = " (endomorphism is an automorphism)" if self.trivial else ""
        lines.append(
            f"* involutive: {self.involutive}, trivial: {self.trivial}{note}"
        )
        if self.spectrum is not None:
            parts = ", ".join(
                f"{v:.6g} (x{m})" for v, m in self.spectrum
            )
            lines.append(f"* spectrum of R: {parts}")
        if self.partial_trace is not None:
            parts = ", ".join(
                f"{v:.6g} (x{m})" for v, m in self.partial_trace.spectrum
            )
            lines.append(
                f"* partial trace spectrum: {parts} "
                f"(norm {self.partial_trace.operator_norm:.6g})"
            )
        for n, by_name in sorted(self.commutants.items()):
            row = ", ".join(
                f"{name}: {b.profile_text()} (dim {b.dimension}"
                + ("" if b.converged else ", truncated")
                + ")"
                for name, b in by_name.items()
            )
            lines.append(f"* level {n}: {row}")
        if self.fixed_dims is not None:
            lines.append(
                "* fixed point dimensions: "
                + ", ".join(str(v) for v in self.fixed_dims)
            )
        if self.ergodic is not None:
            lines.append(
                f"* ergodic: {self.ergodic.ergodic} "
                f"(max deviation {self.ergodic.max_deviation:.3e}, "
                f"necessary gap {self.necessary_gap:.3e})"
            )
        if self.irreducible is not None:
            lines.append(f"* irreducible: {self.irreducible}")
        if self.bounds is not None:
            lines.append(
                f"* index bounds: [{self.bounds.lower:.6g}, "
                f"{self.bounds.upper:.6g}]"
            )
        if self.concentration is not None:
            lines.append(
                f"* concentration margin: {self.concentration.margin:.6f} "
                f"(threshold {self.concentration.threshold:.6f})"
            )
        if self.normal_form is not None:
            text = " + ".join(
                f"{dim}:{'+' if sign > 0 else '-'}"
                for dim, sign in self.normal_form.blocks
            )
            lines.append(f"* normal form blocks: {text}")
        if self.dim2 is not None:
            if self.dim2.family is None:
                lines.append(
                    f"* d=2 family: unclassified "
                    f"(best residual {self.dim2.residual:.3e})"
                )
            else:
                params = ", ".join(
                    f"{k}={v:.6g}"
                    for k, v in sorted(self.dim2.parameters.items())
                )
                lines.append(
                    f"* d=2 family: {self.dim2.family} ({params}), "
                    f"residual {self.dim2.residual:.3e}"
                )
        if self.exact_index is not None:
            lines.append(
                f"* exact index: {self.exact_index[0]:.6g} "
                f"({self.exact_index[1]})"
            )
        for section, message in sorted(self.errors.items()):
            lines.append(f"* [error] {section}: {message}")
        lines.append("")
        return "\n".join(lines)


def analyze(r: RMatrix, n_cap: int = 2, fixed_cap: int = 4,
            seed: int = 0) -> AnalysisReport:
    """Run every analysis section on a verified solution.

    Sections are independent; a failure is recorded under its name in
    ``errors`` and the remaining sections still run.  The output is
    deterministic in (r, n_cap, fixed_cap, seed).
    """
    report = AnalysisReport(
        label=r.label,
        d=r.d,
        n_cap=n_cap,
        fixed_cap=fixed_cap,
        seed=seed,
        ybe_residual=r.ybe_residual,
        unitarity_residual=r.unitarity_residual,
        involutive=is_involutive(r),
        trivial=is_trivial(r),
    )

    def section(name, fn):
        try:
            fn()
        except RmlabError as exc:
            report.errors[name] = str(exc)

    def compute_spectrum():
        report.spectrum = tuple(
            (cl.value, cl.multiplicity) for cl in eig_normal(r.matrix)
        )

    def compute_partial_trace():
        report.partial_trace = partial_trace_invariant(r)

    def compute_commutants():
        for n in range(1, n_cap + 1):
            entry = {}
            entry["M"] = relative_commutant_M(r, n, seed=seed)
            entry["N"] = relative_commutant_N(r, n, seed=seed)
            entry["L"] = relative_commutant_L(r, n, seed=seed)
            report.commutants[n] = entry

    def compute_fixed():
        cap = _feasible_fixed_cap(r.d, fixed_cap)
        report.fixed_dims = tuple(
            fixed_subalgebra(r, n, seed=seed).dimension
            for n in range(1, cap + 1)
        )

    def compute_ergodic():
        report.ergodic = is_ergodic(r)
        report.necessary_gap = ergodicity_necessary_check(r)

    def compute_irreducible():
        if 1 in report.commutants:
            report.irreducible = report.commutants[1]["M"].dimension == 1
        else:
            report.irreducible = is_irreducible(r, seed=seed)

    def compute_bounds():
        report.bounds = index_bounds(r)

    def compute_concentration():
        report.concentration = triviality_by_concentration(r)

    def compute_normal_form():
        if report.involutive:
            report.normal_form = normal_form_of_involutive(r)

    def compute_dim2():
        if r.d == 2:
            report.dim2 = classify_dim2(r, seed=seed)

    def compute_exact_index():
        if report.trivial:
            report.exact_index = (1.0, "scalar solution")
        elif report.dim2 is not None and report.dim2.family in (2, 3):
            report.exact_index = (4.0, "product-basis family at d = 2")
        elif report.dim2 is not None and report.dim2.family == 4:
            report.exact_index = (2.0, "Pauli-type family at d = 2")
        elif (report.normal_form is not None
              and all(dim == 1 for dim, _ in report.normal_form.blocks)):
            report.exact_index = (
                float(r.d ** 2), "involutive with rank-one blocks"
            )

    section("spectrum", compute_spectrum)
    section("partial_trace", compute_partial_trace)
    section("commutants", compute_commutants)
    section("fixed_dims", compute_fixed)
    section("ergodic", compute_ergodic)
    section("irreducible", compute_irreducible)
    section("index_bounds", compute_bounds)
    section("concentration", compute_concentration)
    section("normal_form", compute_normal_form)
    section("dim2", compute_dim2)
    section("exact_index", compute_exact_index)
    return report
