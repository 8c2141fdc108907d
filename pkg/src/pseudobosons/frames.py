"""Frame operators, Riesz-bound diagnostics, and the similarity to bosons.

The frame operator of a family is the partial sum S = sum_n |v_n><v_n|.
Whether its condition number stays flat or grows as the truncation doubles
is the computable stand-in for the bounded / unbounded dichotomy: a single
dimension can never distinguish the two.  The positive square root of S
conjugates a pseudo-boson pair to the standard ladder pair; the quality of
that similarity, and how it degrades toward the truncation edge, is the
other half of the diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CommutationError,
    IllConditionedError,
    InsufficientDataError,
    NotPositiveDefiniteError,
    ShapeError,
)
from .fock import TruncatedOperator, build_ladder, default_trust
from .pbsystem import BiorthogonalSystem, PseudoBosonPair
from .tolerances import EPS, Tolerances

RPB_CONSISTENT = "RPB-consistent"
NONREGULAR_CONSISTENT = "PB-nonregular-consistent"
INCONCLUSIVE = "inconclusive"


def frame_operator(family, trust: int | None = None) -> TruncatedOperator:
    """Partial sum of |v_n><v_n| over the family, as a dense matrix."""
    try:
        vectors = np.atleast_2d(np.asarray(family, dtype=complex))
    except ValueError as exc:
        raise ShapeError(f"family vectors must share a common dimension: {exc}") from None
    if vectors.size == 0 or vectors.ndim != 2:
        raise ShapeError("frame operator needs a nonempty family of equal-length vectors")
    s = vectors.T @ vectors.conj()
    return TruncatedOperator(s, trust or default_trust(s.shape[0]))


def frame_convergence_delta(family, trust: int) -> float:
    """Trust-block change of the partial sum when the family is halved.

    The series behind the frame operator may or may not converge; this is
    the doubling test quantifying how settled the finite sum is.
    """
    vectors = np.asarray(family, dtype=complex)
    half = frame_operator(vectors[: max(1, len(vectors) // 2)], trust)
    full = frame_operator(vectors, trust)
    return float(np.linalg.norm((full.entries - half.entries)[:trust, :trust], 2))


def riesz_bounds(s: TruncatedOperator, tol: Tolerances | None = None) -> tuple[float, float, float]:
    """Extremal eigenvalues (A, B) of the trust block of S, and B/A."""
    tol = tol or Tolerances()
    block = s.block()
    dev = float(np.linalg.norm(block - block.conj().T, 2)) / max(float(np.linalg.norm(block, 2)), EPS)
    if dev > tol.herm:
        raise NotPositiveDefiniteError(f"frame block not Hermitian: relative deviation {dev:.3e}")
    w = np.linalg.eigvalsh((block + block.conj().T) / 2.0)
    floor = s.trust * EPS * float(np.max(np.abs(w)))
    if w[0] <= floor:
        raise NotPositiveDefiniteError(
            f"frame block not positive definite: smallest eigenvalue {w[0]:.6e}", eigenvalue=float(w[0])
        )
    return float(w[0]), float(w[-1]), float(w[-1] / w[0])


def classify_regularity(growth, tol: Tolerances | None = None) -> str:
    """Read a (dim, condition) sweep as flat, growing, or neither.

    Flat within tol.flat_ratio is consistent with a Riesz-basis pair;
    strictly increasing beyond tol.grow_ratio is consistent with a
    non-regular pair.  Anything else stays inconclusive.
    """
    tol = tol or Tolerances()
    rows = sorted((int(d), float(c)) for d, c in growth)
    if len(rows) < 3:
        raise InsufficientDataError(f"need at least 3 dims to classify, got {len(rows)}")
    conds = [c for _, c in rows]
    ratio = conds[-1] / conds[0]
    if ratio < tol.flat_ratio:
        return RPB_CONSISTENT
    increasing = all(b > a for a, b in zip(conds, conds[1:]))
    if increasing and ratio > tol.grow_ratio:
        return NONREGULAR_CONSISTENT
    return INCONCLUSIVE


def mutual_mapping_check(
    s_phi: TruncatedOperator,
    s_psi: TruncatedOperator,
    system: BiorthogonalSystem,
) -> tuple[float, float]:
    """Worst relative residuals of S_phi psi_n = phi_n and S_psi phi_n = psi_n.

    Residual vectors are restricted to the smaller trust block; partial-sum
    error beyond it is truncation artifact.
    """
    t = min(s_phi.trust, s_psi.trust)
    worst_phi = 0.0
    worst_psi = 0.0
    for n in range(system.count):
        d_phi = (s_phi.entries @ system.psi[n] - system.phi[n])[:t]
        d_psi = (s_psi.entries @ system.phi[n] - system.psi[n])[:t]
        worst_phi = max(worst_phi, float(np.linalg.norm(d_phi) / np.linalg.norm(system.phi[n])))
        worst_psi = max(worst_psi, float(np.linalg.norm(d_psi) / np.linalg.norm(system.psi[n])))
    return worst_phi, worst_psi


def intertwine_residual(s: TruncatedOperator, n_op: TruncatedOperator, n_dual: TruncatedOperator) -> float:
    """Trust-block norm of S N - N' S.

    Call as (S_psi, N, N_dual) for the one direction and
    (S_phi, N_dual, N) for the other.
    """
    t = min(s.trust, n_op.trust, n_dual.trust)
    defect = s.entries @ n_op.entries - n_dual.entries @ s.entries
    return float(np.linalg.norm(defect[:t, :t], 2))


@dataclass(frozen=True, eq=False)
class FrameReport:
    s_phi: TruncatedOperator
    s_psi: TruncatedOperator
    bounds: tuple[float, float]
    condition: float
    growth: tuple
    classification: str
    product_defect: float
    convergence_delta: float


def frame_report(
    system: BiorthogonalSystem,
    trust: int,
    growth=(),
    tol: Tolerances | None = None,
) -> FrameReport:
    """Assemble both frame operators and their spectral diagnostics.

    `growth` is an optional (dim, condition) history from other truncations;
    with three or more entries it is classified, otherwise the report stays
    inconclusive.
    """
    tol = tol or Tolerances()
    s_phi = frame_operator(system.phi, trust)
    s_psi = frame_operator(system.psi, trust)
    lower, upper, condition = riesz_bounds(s_phi, tol)
    product = s_phi.entries @ s_psi.entries
    product_defect = float(np.linalg.norm(product[:trust, :trust] - np.eye(trust), 2))
    delta = frame_convergence_delta(system.phi, trust)
    rows = tuple(growth)
    try:
        classification = classify_regularity(rows, tol) if len(rows) >= 3 else INCONCLUSIVE
    except InsufficientDataError:
        classification = INCONCLUSIVE
    return FrameReport(
        s_phi=s_phi,
        s_psi=s_psi,
        bounds=(lower, upper),
        condition=condition,
        growth=rows,
        classification=classification,
        product_defect=product_defect,
        convergence_delta=delta,
    )


@dataclass(frozen=True, eq=False)
class SimilarityWitness:
    """T with a = T c T^-1 and b = T c* T^-1 on a leading block.

    All members live on the block of size `block`; `residual_profile` holds
    (head, residual_a, residual_b) rows for increasing heads, recording how
    the similarity degrades toward the truncation edge.  The headline
    residuals are taken at half the block, where T^-1 has not yet amplified
    edge noise.
    """

    t: TruncatedOperator
    t_inv: TruncatedOperator
    c: TruncatedOperator
    c_dag: TruncatedOperator
    residual_a: float
    residual_b: float
    residual_profile: tuple
    orthonormality_defect: float | None
    symmetrization_defect: float
    block: int


def bosonize(
    pair: PseudoBosonPair,
    s_phi: TruncatedOperator,
    system: BiorthogonalSystem | None = None,
    heads=(8, 12, 16, 24),
    tol: Tolerances | None = None,
) -> SimilarityWitness:
    """Extract T = sqrt(S_phi) on the trust block and test the similarity.

    S is symmetrized before the square root and the symmetrization defect
    recorded.  When `system` is given, the vectors T^-1 phi_n for n below
    the block are checked for orthonormality; they are the recovered
    orthonormal basis behind the pair.
    """
    tol = tol or Tolerances()
    block = s_phi.trust
    raw = s_phi.block(block)
    scale = max(float(np.linalg.norm(raw, 2)), EPS)
    sym_defect = float(np.linalg.norm(raw - raw.conj().T, 2)) / scale
    sym = (raw + raw.conj().T) / 2.0
    w, v = np.linalg.eigh(sym)
    floor = block * EPS * float(np.max(np.abs(w)))
    if w[0] <= floor:
        raise NotPositiveDefiniteError(
            f"frame block of size {block} not positive definite: smallest eigenvalue {w[0]:.6e}",
            eigenvalue=float(w[0]),
        )
    t_mat = (v * np.sqrt(w)) @ v.conj().T
    t_inv = (v / np.sqrt(w)) @ v.conj().T
    c, c_dag = build_ladder(block)
    defect_a = pair.a.entries[:block, :block] - t_mat @ c.entries @ t_inv
    defect_b = pair.b.entries[:block, :block] - t_mat @ c_dag.entries @ t_inv
    half = max(1, block // 2)
    probe = sorted({h for h in (*heads, half, block) if 1 <= h <= block})
    profile = tuple(
        (h, float(np.linalg.norm(defect_a[:h, :h], 2)), float(np.linalg.norm(defect_b[:h, :h], 2)))
        for h in probe
    )
    residual_a = float(np.linalg.norm(defect_a[:half, :half], 2))
    residual_b = float(np.linalg.norm(defect_b[:half, :half], 2))
    onb = None
    if system is not None:
        n_onb = min(system.count, block)
        hatted = (t_inv @ system.phi[:n_onb, :block].T).T
        gram = hatted.conj() @ hatted.T
        onb = float(np.max(np.abs(gram - np.eye(n_onb))))
    return SimilarityWitness(
        t=TruncatedOperator(t_mat, block),
        t_inv=TruncatedOperator(t_inv, block),
        c=c,
        c_dag=c_dag,
        residual_a=residual_a,
        residual_b=residual_b,
        residual_profile=profile,
        orthonormality_defect=onb,
        symmetrization_defect=sym_defect,
        block=block,
    )


def debosonize(
    c: TruncatedOperator,
    c_dag: TruncatedOperator,
    t: TruncatedOperator,
    tol: Tolerances | None = None,
) -> PseudoBosonPair:
    """Conjugate the standard ladders by T to manufacture a pair.

    Refuses a T whose condition number would push the conjugation past
    double precision, and verifies [a, b] = 1 on the resulting trust block.
    """
    tol = tol or Tolerances()
    if t.dim != c.dim:
        raise ShapeError(f"T dim {t.dim} does not match ladder dim {c.dim}")
    singular = np.linalg.svd(t.entries, compute_uv=False)
    condition = float(singular[0] / max(singular[-1], np.finfo(float).tiny))
    cond_max = 1.0 / (tol.scale * t.dim * EPS)
    if condition > cond_max:
        raise IllConditionedError(
            f"condition {condition:.3e} exceeds invertibility threshold {cond_max:.3e}", condition=condition
        )
    t_inv = np.linalg.inv(t.entries)
    trust = min(c.trust, t.trust)
    a = TruncatedOperator(t.entries @ c.entries @ t_inv, trust)
    b = TruncatedOperator(t.entries @ c_dag.entries @ t_inv, trust)
    pair = PseudoBosonPair(a, b)
    defect = pair.commutation_defect()
    if defect > tol.bio:
        raise CommutationError(f"[a, b] - 1 defect {defect:.3e} on trust {trust}", defect=defect)
    return pair
