"""Pseudo-boson pairs and their biorthogonal vector families.

A pair (a, b) with [a, b] = 1 on the trust block, b not required to be the
adjoint of a, generates two families: phi_n by raising the a-vacuum with b,
and psi_n by raising the b-adjoint vacuum with a-adjoint.  The families are
biorthogonal once the vacua are normalized to overlap one.  All statements
hold on the trust block only; the truncation edge is never trusted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateVacuumError,
    NormalizationError,
    NoVacuumError,
    ShapeError,
    TruncationOverrunError,
    UnderSpannedError,
)
from .fock import TruncatedOperator, commutator, multi_indices, tensor_lift
from .tolerances import EPS, Tolerances

# Kernel-vector components below this fraction of the peak are zeroed: the
# singular vector carries O(eps) noise everywhere, and ladder generation
# amplifies noise at unoccupied indices geometrically.
VACUUM_CLEAN_CUT = 1e-13


@dataclass(frozen=True, eq=False)
class PseudoBosonPair:
    """Lowering operator `a` and raising operator `b` acting on one mode.

    For d > 1 the same single-mode pair is replicated per mode; `lifted`
    returns the Kronecker embeddings.
    """

    a: TruncatedOperator
    b: TruncatedOperator
    d: int = 1

    def __post_init__(self):
        if self.a.dim != self.b.dim:
            raise ShapeError(f"pair dims differ: {self.a.dim} vs {self.b.dim}")
        if self.d < 1:
            raise ShapeError(f"mode count must be positive, got {self.d}")

    @property
    def dim(self) -> int:
        return self.a.dim

    @property
    def trust(self) -> int:
        return min(self.a.trust, self.b.trust)

    def number_op(self) -> TruncatedOperator:
        return self.b @ self.a

    def dual_number_op(self) -> TruncatedOperator:
        # (b a)^dagger = a^dagger b^dagger
        return (self.b @ self.a).adjoint()

    def lifted(self, mode_index: int) -> "PseudoBosonPair":
        a = tensor_lift(self.a, mode_index, self.d, self.dim)
        b = tensor_lift(self.b, mode_index, self.d, self.dim)
        return PseudoBosonPair(a, b, d=1)

    def commutation_defect(self, trust: int | None = None) -> float:
        """Spectral norm of [a, b] - 1 on the leading block."""
        trust = self.trust if trust is None else trust
        defect = commutator(self.a, self.b) - TruncatedOperator.identity(self.dim)
        return float(np.linalg.norm(defect.entries[:trust, :trust], 2))


def vacuum_solve(op: TruncatedOperator, tol: Tolerances | None = None) -> np.ndarray:
    """Unit-norm kernel vector of the trust block of `op`.

    The smallest right singular vector of the trust block is taken as the
    vacuum when its singular value is below tol.kernel relative to the
    largest.  Components below VACUUM_CLEAN_CUT of the peak are zeroed and
    the vector renormalized.  Phase convention: first nonzero coefficient
    real and positive.
    """
    tol = tol or Tolerances()
    t = op.trust
    block = op.entries[:t, :t]
    _, sv, vh = np.linalg.svd(block)
    top = max(float(sv[0]), EPS)
    relative = sv / top
    kernel_dim = int(np.count_nonzero(relative < tol.kernel))
    if kernel_dim == 0:
        raise NoVacuumError(
            f"no numerical kernel on trust block {t}: smallest relative singular value "
            f"{relative[-1]:.3e} at threshold {tol.kernel:.1e}",
            relative_sigma=float(relative[-1]),
        )
    if kernel_dim >= 2:
        raise DegenerateVacuumError(
            f"kernel dimension {kernel_dim} on trust block {t}; "
            f"trailing singular values {sv[-kernel_dim:].tolist()}",
            singular_values=sv[-kernel_dim:].copy(),
        )
    v = vh[-1].conj()
    peak = float(np.max(np.abs(v)))
    v = np.where(np.abs(v) < VACUUM_CLEAN_CUT * peak, 0.0, v)
    v = v / np.linalg.norm(v)
    first = np.nonzero(np.abs(v) > 1e-12 * np.max(np.abs(v)))[0][0]
    v = v * (np.abs(v[first]) / v[first])
    out = np.zeros(op.dim, dtype=complex)
    out[:t] = v
    return out


def ladder_generate(raiser: TruncatedOperator, vacuum: np.ndarray, n_max: int) -> np.ndarray:
    """Rows v_n = raiser^n vacuum / sqrt(n!), n = 0..n_max.

    Requires n_max < raiser.trust so the top occupied index stays trusted.
    """
    if n_max >= raiser.trust:
        raise TruncationOverrunError(f"n_max {n_max} reaches past trust {raiser.trust}")
    vacuum = np.asarray(vacuum, dtype=complex)
    if vacuum.shape != (raiser.dim,):
        raise ShapeError(f"vacuum shape {vacuum.shape} does not match dim {raiser.dim}")
    out = np.zeros((n_max + 1, raiser.dim), dtype=complex)
    out[0] = vacuum
    for n in range(1, n_max + 1):
        out[n] = (raiser.entries @ out[n - 1]) / np.sqrt(n)
    return out


def ladder_generate_product(raisers, vacuum: np.ndarray, n_max: int, per_mode_dim: int, d: int) -> np.ndarray:
    """Multi-mode family over all occupation tuples with every n_j <= n_max.

    `raisers` are the lifted per-mode raising operators, applied in mode
    order; rows follow the flat ordering of `multi_indices`.
    """
    singles = []
    for raiser in raisers:
        if n_max >= raiser.trust:
            raise TruncationOverrunError(f"n_max {n_max} reaches past trust {raiser.trust}")
        singles.append(raiser.entries)
    dim_full = singles[0].shape[0]
    tuples = multi_indices(n_max + 1, d)
    out = np.zeros((len(tuples), dim_full), dtype=complex)
    for row, occ in enumerate(tuples):
        v = np.asarray(vacuum, dtype=complex).copy()
        for j in range(d):
            for step in range(int(occ[j])):
                v = singles[j] @ v / np.sqrt(step + 1)
        out[row] = v
    return out


@dataclass(frozen=True, eq=False)
class BiorthogonalSystem:
    """The two generated families, rows indexed by occupation number."""

    phi: np.ndarray
    psi: np.ndarray
    n_max: int
    norm_profile: np.ndarray

    def __post_init__(self):
        for name in ("phi", "psi", "norm_profile"):
            arr = np.asarray(getattr(self, name))
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.phi.shape != self.psi.shape:
            raise ShapeError("families must have matching shapes")

    @property
    def count(self) -> int:
        return self.phi.shape[0]

    @property
    def dim(self) -> int:
        return self.phi.shape[1]

    def phi_norms(self) -> np.ndarray:
        return np.linalg.norm(self.phi, axis=1)

    def psi_norms(self) -> np.ndarray:
        return np.linalg.norm(self.psi, axis=1)

    def gram_matrix(self) -> np.ndarray:
        """G[n, m] = <psi_n, phi_m>, conjugate-linear in the first slot."""
        return self.psi.conj() @ self.phi.T


def build_system(
    pair: PseudoBosonPair,
    n_max: int | None = None,
    phi0_scale: float = 1.0,
    tol: Tolerances | None = None,
) -> BiorthogonalSystem:
    """Solve both vacua, normalize their overlap to one, run both ladders.

    phi_0 is the unit-norm a-kernel times `phi0_scale`; psi_0 is rescaled so
    <psi_0, phi_0> = 1 exactly.  Default n_max is half the pair trust:
    ladder error grows with n, and halving again keeps Gram defects near
    machine precision.
    """
    tol = tol or Tolerances()
    if n_max is None:
        n_max = pair.trust // 2
    phi0 = vacuum_solve(pair.a, tol) * phi0_scale
    psi0 = vacuum_solve(pair.b.adjoint(), tol)
    overlap = complex(np.vdot(psi0, phi0))
    if abs(overlap) < tol.kernel:
        raise NormalizationError(
            f"vacua numerically orthogonal: |<psi0, phi0>| = {abs(overlap):.3e}", overlap=overlap
        )
    psi0 = psi0 / np.conj(overlap)
    phi = ladder_generate(pair.b, phi0, n_max)
    psi = ladder_generate(pair.a.adjoint(), psi0, n_max)
    profile = np.linalg.norm(phi, axis=1) * np.linalg.norm(psi, axis=1)
    return BiorthogonalSystem(phi=phi, psi=psi, n_max=n_max, norm_profile=profile)


def gram_defect(system: BiorthogonalSystem) -> float:
    """Largest entrywise deviation of the Gram matrix from the identity."""
    g = system.gram_matrix()
    return float(np.max(np.abs(g - np.eye(system.count))))


@dataclass(frozen=True)
class EigenCheckResult:
    phi_residuals: tuple
    psi_residuals: tuple
    max_residual: float
    trust: int


def eigen_check(system: BiorthogonalSystem, pair: PseudoBosonPair, tol: Tolerances | None = None) -> EigenCheckResult:
    """Relative residuals of N phi_n = n phi_n and its dual on the trust block.

    Residual vectors are restricted to the trust block before taking norms:
    components at untrusted indices are finite-section artifacts, not
    properties of the pair.
    """
    nop = pair.number_op()
    dual = pair.dual_number_op()
    t = nop.trust
    r_phi, r_psi = [], []
    for n in range(system.count):
        dphi = (nop.entries @ system.phi[n] - n * system.phi[n])[:t]
        dpsi = (dual.entries @ system.psi[n] - n * system.psi[n])[:t]
        r_phi.append(float(np.linalg.norm(dphi)) / float(np.linalg.norm(system.phi[n])))
        r_psi.append(float(np.linalg.norm(dpsi)) / float(np.linalg.norm(system.psi[n])))
    worst = max(max(r_phi), max(r_psi))
    return EigenCheckResult(tuple(r_phi), tuple(r_psi), worst, t)


def basis_completeness(system: BiorthogonalSystem, trust: int) -> float:
    """Defect of sum_n |phi_n><psi_n| against the identity on the block.

    A finite-section stand-in for the resolution of the identity: needs at
    least `trust` vectors, and converges only once n_max comfortably
    exceeds the block size for families with growing norms.
    """
    if system.count < trust:
        raise UnderSpannedError(f"{system.count} vectors cannot span a block of {trust}")
    resolved = system.phi.T @ system.psi.conj()
    defect = resolved[:trust, :trust] - np.eye(trust)
    return float(np.linalg.norm(defect, 2))
