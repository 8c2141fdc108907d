"""Truncated Fock-space foundation.

Operators live as dense complex matrices cut off at a finite dimension.
Truncation artifacts concentrate near the cutoff, so every matrix carries a
`trust` index: the size of the leading block on which finite-section effects
are declared negligible.  Algebraic combinations keep the minimum trust of
their operands.

Conventions fixed here and relied on everywhere else:

* the number basis is indexed 0..dim-1;
* multi-mode spaces use row-major Kronecker ordering with mode 0 slowest;
* matrix functions use the spectral decomposition on the Hermitian path and
  scaling-and-squaring on the general path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ExponentOverflowError,
    InvalidDimensionError,
    NotHermitianError,
    NotPositiveDefiniteError,
    ShapeError,
)
from .tolerances import EPS, Tolerances

# Real exponents beyond this overflow double precision.
_EXP_LIMIT = 700.0


def default_trust(dim: int) -> int:
    """Half the dimension, rounded up.

    The commutator defect of a truncated ladder pair sits in the last row and
    column, and ladder-generated vectors degrade from the top; half dimension
    is a conservative margin for both.
    """
    return -(-dim // 2)


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """A finite section of an operator, with its declared trust block.

    `entries` is stored read-only; all arithmetic returns new instances.
    A trust of 0 means "use the default", i.e. half the dimension.
    """

    entries: np.ndarray
    trust: int = 0

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ShapeError(f"operator must be square, got shape {arr.shape}")
        if arr.shape[0] < 2:
            raise InvalidDimensionError(f"dimension must be at least 2, got {arr.shape[0]}")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)
        trust = self.trust if self.trust else default_trust(arr.shape[0])
        if not 1 <= trust <= arr.shape[0]:
            raise ShapeError(f"trust {trust} outside 1..{arr.shape[0]}")
        object.__setattr__(self, "trust", int(trust))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, dim: int, trust: int | None = None) -> "TruncatedOperator":
        return cls(np.eye(dim), trust or dim)

    def block(self, size: int | None = None) -> np.ndarray:
        """Writable copy of the leading block (default: the trust block)."""
        size = self.trust if size is None else size
        if not 1 <= size <= self.dim:
            raise ShapeError(f"block size {size} outside 1..{self.dim}")
        return self.entries[:size, :size].copy()

    def norm(self, size: int | None = None) -> float:
        """Spectral norm of the leading block (default: full matrix)."""
        size = self.dim if size is None else size
        return float(np.linalg.norm(self.entries[:size, :size], 2))

    def adjoint(self) -> "TruncatedOperator":
        return TruncatedOperator(self.entries.conj().T, self.trust)

    def _combine_trust(self, other) -> int:
        return min(self.trust, other.trust)

    def _check_shape(self, other):
        if self.dim != other.dim:
            raise ShapeError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        self._check_shape(other)
        return TruncatedOperator(self.entries + other.entries, self._combine_trust(other))

    def __sub__(self, other):
        self._check_shape(other)
        return TruncatedOperator(self.entries - other.entries, self._combine_trust(other))

    def __neg__(self):
        return TruncatedOperator(-self.entries, self.trust)

    def __mul__(self, scalar):
        return TruncatedOperator(self.entries * complex(scalar), self.trust)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, np.ndarray):
            return self.entries @ other
        self._check_shape(other)
        return TruncatedOperator(self.entries @ other.entries, self._combine_trust(other))

    def __repr__(self):
        return f"TruncatedOperator(dim={self.dim}, trust={self.trust})"


def build_ladder(dim: int) -> tuple[TruncatedOperator, TruncatedOperator]:
    """Standard lowering and raising matrices at truncation `dim`.

    c[n-1, n] = sqrt(n); c_dag is the transpose.  The commutator defect of
    the pair lives entirely in the (dim-1, dim-1) entry, so trust = dim - 1.
    """
    if dim < 2:
        raise InvalidDimensionError(f"ladder needs dim >= 2, got {dim}")
    off = np.sqrt(np.arange(1, dim, dtype=float))
    c = np.diag(off, k=1)
    return (
        TruncatedOperator(c, trust=dim - 1),
        TruncatedOperator(c.T.copy(), trust=dim - 1),
    )


def commutator(x: TruncatedOperator, y: TruncatedOperator) -> TruncatedOperator:
    return x @ y - y @ x


def tensor_lift(op: TruncatedOperator, mode_index: int, d: int, per_mode_dim: int) -> TruncatedOperator:
    """Kronecker-embed a single-mode operator into a d-mode space.

    Mode 0 is the slowest index.  The lifted trust is the largest flat
    leading block whose mode-`mode_index` component stays inside the
    single-mode trust: op.trust * per_mode_dim**(d - 1 - mode_index).
    Lifts of different modes commute exactly, entry by entry.
    """
    if not 0 <= mode_index < d:
        raise ShapeError(f"mode_index {mode_index} outside 0..{d - 1}")
    if op.dim != per_mode_dim:
        raise ShapeError(f"operator dim {op.dim} does not match per_mode_dim {per_mode_dim}")
    out = np.array([[1.0 + 0.0j]])
    for j in range(d):
        factor = op.entries if j == mode_index else np.eye(per_mode_dim)
        out = np.kron(out, factor)
    trust = op.trust * per_mode_dim ** (d - 1 - mode_index)
    return TruncatedOperator(out, trust=trust)


def multi_indices(per_mode_dim: int, d: int) -> np.ndarray:
    """All d-mode occupation tuples in flat order; shape (per_mode_dim**d, d)."""
    grids = np.indices((per_mode_dim,) * d)
    return np.stack([g.ravel() for g in grids], axis=1)


def flat_index(n, per_mode_dim: int) -> int:
    """Flat position of occupation tuple `n` under the fixed ordering."""
    out = 0
    for nj in n:
        if not 0 <= nj < per_mode_dim:
            raise ShapeError(f"occupation {tuple(n)} outside per-mode cutoff {per_mode_dim}")
        out = out * per_mode_dim + int(nj)
    return out


def _hermitian_deviation(arr: np.ndarray) -> float:
    scale = max(float(np.linalg.norm(arr, 2)), EPS)
    return float(np.linalg.norm(arr - arr.conj().T, 2)) / scale


def herm_sqrt(op: TruncatedOperator, tol: Tolerances | None = None) -> TruncatedOperator:
    """Unique positive square root of a Hermitian positive definite matrix.

    The input must be Hermitian to `tol.herm` (relative) and have its
    smallest eigenvalue above the dim-scaled floor; the result squared
    reproduces the symmetrized input within tau_rec = dim * eps * norm.
    """
    tol = tol or Tolerances()
    dev = _hermitian_deviation(op.entries)
    if dev > tol.herm:
        raise NotHermitianError(f"relative Hermiticity deviation {dev:.3e} exceeds {tol.herm:.1e}", deviation=dev)
    sym = (op.entries + op.entries.conj().T) / 2.0
    w, v = np.linalg.eigh(sym)
    floor = op.dim * EPS * float(np.max(np.abs(w)))
    if w[0] <= floor:
        raise NotPositiveDefiniteError(
            f"smallest eigenvalue {w[0]:.6e} at or below positivity floor {floor:.1e}",
            eigenvalue=float(w[0]),
        )
    root = (v * np.sqrt(w)) @ v.conj().T
    tau_rec = op.dim * EPS * float(np.linalg.norm(sym, 2))
    defect = float(np.linalg.norm(root @ root - sym, 2))
    if defect > tau_rec:
        # spectral reconstruction should never miss by this much
        raise NotPositiveDefiniteError(f"square-root reconstruction defect {defect:.3e} exceeds {tau_rec:.3e}")
    return TruncatedOperator(root, op.trust)


def herm_exp(op: TruncatedOperator, scale: complex = 1.0, tol: Tolerances | None = None) -> TruncatedOperator:
    """Matrix exponential exp(scale * op).

    Hermitian `op` with real `scale` goes through the spectral decomposition,
    which keeps the result exactly Hermitian positive definite.  Anything
    else falls back to dense scaling-and-squaring.
    """
    tol = tol or Tolerances()
    if _hermitian_deviation(op.entries) <= tol.herm and abs(complex(scale).imag) == 0.0:
        sym = (op.entries + op.entries.conj().T) / 2.0
        w, v = np.linalg.eigh(sym)
        exponents = float(complex(scale).real) * w
        if np.max(np.abs(exponents)) > _EXP_LIMIT:
            raise ExponentOverflowError(
                f"largest exponent magnitude {np.max(np.abs(exponents)):.3e} overflows double precision",
                norm_estimate=float(np.max(np.abs(exponents))),
            )
        result = (v * np.exp(exponents)) @ v.conj().T
    else:
        norm_est = abs(complex(scale)) * float(np.linalg.norm(op.entries, 2))
        if norm_est > _EXP_LIMIT:
            raise ExponentOverflowError(
                f"scaled norm {norm_est:.3e} overflows double precision", norm_estimate=norm_est
            )
        result = scipy.linalg.expm(complex(scale) * op.entries)
        if not np.all(np.isfinite(result)):
            raise ExponentOverflowError("exponential produced non-finite entries", norm_estimate=norm_est)
    return TruncatedOperator(result, op.trust)


def factorial_sqrt(n: int) -> float:
    """sqrt(n!) without overflow for the truncations used here."""
    return math.exp(0.5 * math.lgamma(n + 1))
