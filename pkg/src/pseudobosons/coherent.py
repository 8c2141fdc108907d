"""Coherent states for a biorthogonal pair of families, and the quadrature
check of the resolution of the identity.

States are built from the truncated series over phi_n and psi_n, not from
exponentiated displacement operators: the series is exactly summable at
finite dimension, while truncated exponentials lose unitarity.  Agreement
of the two routes at small amplitude is available as a diagnostic.

The identity resolution is tested by polar-coordinate quadrature per mode:
Gauss-Legendre radially on [0, r_max], uniform trapezoid in the angle
(exact for the trigonometric polynomials that occur).  Whether the radial
integrand stays Gaussian-damped or grows with radius is the computable
divergence test: for families with growing norms the integral is formal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.special

from .errors import DomainExceededError, QuadratureConvergenceError, ShapeError
from .fock import TruncatedOperator, multi_indices
from .pbsystem import BiorthogonalSystem, PseudoBosonPair
from .tolerances import Tolerances


@dataclass(frozen=True, eq=False)
class CoherentState:
    z: complex
    vec_phi: np.ndarray
    vec_psi: np.ndarray
    series_cutoff: int
    tail_bound: float


def _series_weights(z: complex, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    # z^n / sqrt(n!) without overflow
    log_mag = n * np.log(np.abs(z)) if z != 0 else np.where(n == 0, 0.0, -np.inf)
    mag = np.exp(log_mag - 0.5 * scipy.special.gammaln(n + 1))
    phase = np.exp(1j * n * np.angle(z)) if z != 0 else np.ones(n_max + 1)
    return mag * phase


def coherent_build(system: BiorthogonalSystem, z: complex, tol: Tolerances | None = None) -> CoherentState:
    """Truncated coherent state pair at amplitude z.

    vec_phi = exp(-|z|^2/2) sum_n z^n/sqrt(n!) phi_n, and the same series
    over psi_n.  The dropped tail is bounded geometrically from the last
    norm and the observed growth of the norm profile; amplitudes whose tail
    bound is not below tol.tail are outside the admissible domain at this
    truncation and are refused.
    """
    tol = tol or Tolerances()
    n_max = system.n_max
    weights = _series_weights(z, n_max)
    prefactor = math.exp(-0.5 * abs(z) ** 2)
    vec_phi = prefactor * (weights @ system.phi)
    vec_psi = prefactor * (weights @ system.psi)

    phi_norms = system.phi_norms()
    psi_norms = system.psi_norms()
    window = min(4, n_max)
    growth = 1.0
    for norms in (phi_norms, psi_norms):
        if window >= 1:
            ratios = norms[-window:] / norms[-window - 1 : -1]
            growth = max(growth, float(np.max(ratios)))
    leading = abs(z) ** (n_max + 1) / math.exp(0.5 * math.lgamma(n_max + 2))
    first_dropped = prefactor * leading * float(max(phi_norms[-1], psi_norms[-1])) * growth
    ratio = abs(z) * growth / math.sqrt(n_max + 2)
    if ratio >= 1.0:
        raise DomainExceededError(
            f"series terms not decreasing at |z| = {abs(z):.3f} with cutoff {n_max}",
            tail_bound=math.inf,
        )
    tail = first_dropped / (1.0 - ratio)
    if tail >= tol.tail:
        raise DomainExceededError(
            f"tail bound {tail:.3e} at |z| = {abs(z):.3f} exceeds {tol.tail:.1e}; "
            f"amplitude outside the admissible domain at cutoff {n_max}",
            tail_bound=tail,
        )
    return CoherentState(z=complex(z), vec_phi=vec_phi, vec_psi=vec_psi, series_cutoff=n_max, tail_bound=tail)


def kron_state(first: CoherentState, second: CoherentState) -> CoherentState:
    """Two-mode state as the Kronecker product of single-mode states."""
    return CoherentState(
        z=(first.z, second.z),
        vec_phi=np.kron(first.vec_phi, second.vec_phi),
        vec_psi=np.kron(first.vec_psi, second.vec_psi),
        series_cutoff=min(first.series_cutoff, second.series_cutoff),
        tail_bound=first.tail_bound + second.tail_bound,
    )


def eigen_relation_check(state: CoherentState, pair: PseudoBosonPair) -> tuple[float, float]:
    """Residuals of a |z> = z |z> and b* |z>' = z |z>'.

    Both use the amplitude itself, not its conjugate: the psi-state is an
    eigenvector of the adjoint of the raising operator.
    """
    a = pair.a.entries
    b_dag = pair.b.adjoint().entries
    r_phi = np.linalg.norm(a @ state.vec_phi - state.z * state.vec_phi) / np.linalg.norm(state.vec_phi)
    r_psi = np.linalg.norm(b_dag @ state.vec_psi - state.z * state.vec_psi) / np.linalg.norm(state.vec_psi)
    return float(r_phi), float(r_psi)


def displacement_route_residual(system: BiorthogonalSystem, pair: PseudoBosonPair, z: complex) -> float:
    """Norm gap between the series state and exp(z b - conj(z) a) phi_0.

    Meaningful as a small-amplitude diagnostic only; the exponential route
    carries truncation non-unitarity.
    """
    series = coherent_build(system, z).vec_phi
    generator = z * pair.b.entries - np.conj(z) * pair.a.entries
    displaced = scipy.linalg.expm(generator) @ system.phi[0]
    return float(np.linalg.norm(displaced - series))


@dataclass(frozen=True)
class QuadratureSpec:
    r_max: float = 6.0
    radial_nodes: int = 64
    angular_nodes: int = 64


def gauss_moment_matrix(count: int, spec: QuadratureSpec) -> np.ndarray:
    """M[n, m] = (1/pi) integral of z^n conj(z)^m e^{-|z|^2} / sqrt(n! m!).

    Exact value is the identity; the quadrature version carries the radial
    cutoff error.  Accumulation order is fixed (radial nodes ascending) for
    reproducibility.
    """
    x, wx = np.polynomial.legendre.leggauss(spec.radial_nodes)
    r = (x + 1.0) * (spec.r_max / 2.0)
    wr = wx * (spec.r_max / 2.0)
    theta = 2.0 * np.pi * np.arange(spec.angular_nodes) / spec.angular_nodes
    w_theta = 2.0 * np.pi / spec.angular_nodes
    n = np.arange(count)
    inv_sqrt_fact = np.exp(-0.5 * scipy.special.gammaln(n + 1))
    m = np.zeros((count, count), dtype=complex)
    for i in range(spec.radial_nodes):
        z = r[i] * np.exp(1j * theta)
        c = math.exp(-0.5 * r[i] ** 2) * (z[:, None] ** n[None, :]) * inv_sqrt_fact[None, :]
        m += (wr[i] * r[i] * w_theta / np.pi) * (c.T @ c.conj())
    return m


def moment_head(count: int, spec: QuadratureSpec, tol: Tolerances | None = None) -> int:
    """Largest leading block whose moments survive the radial cutoff.

    The diagonal moment for index n is missing a tail of
    gammaincc(n + 1, r_max^2); the head is the largest block size whose
    worst tail stays below tol.moment.
    """
    tol = tol or Tolerances()
    cut = spec.r_max**2
    head = 0
    for b in range(1, count + 1):
        if scipy.special.gammaincc(b, cut) < tol.moment:
            head = b
        else:
            break
    return head


def radial_growth_ratio(system: BiorthogonalSystem, spec: QuadratureSpec) -> float:
    """Growth of the integrand norm envelope along the radial nodes.

    At radius r the integrand norm is bounded by
    exp(-r^2) sqrt(sum r^{2n}/n! |phi_n|^2) sqrt(sum r^{2n}/n! |psi_n|^2);
    the ratio of its maximum to its value at the innermost node is the
    divergence detector.  Gaussian-damped families stay near one.
    """
    x, _ = np.polynomial.legendre.leggauss(spec.radial_nodes)
    r = (x + 1.0) * (spec.r_max / 2.0)
    n = np.arange(system.count)
    log_pow = np.outer(np.log(np.maximum(r, 1e-300)) * 2.0, n) - scipy.special.gammaln(n + 1)[None, :]
    base = np.exp(log_pow - r[:, None] ** 2)
    phi_sq = system.phi_norms() ** 2
    psi_sq = system.psi_norms() ** 2
    envelope = np.sqrt(base @ phi_sq) * np.sqrt(base @ psi_sq)
    return float(np.max(envelope) / envelope[0])


@dataclass(frozen=True, eq=False)
class QuadratureResult:
    op_s_phi: TruncatedOperator
    op_s_psi: TruncatedOperator
    op_identity: TruncatedOperator
    defects: dict
    head: int
    doubling_delta: float
    growth_ratio: float
    node_trace: tuple
    spec: QuadratureSpec


def _quadrature_ops(system: BiorthogonalSystem, m: np.ndarray, head: int):
    phi, psi = system.phi, system.psi
    s_phi_q = phi.T @ m @ phi.conj()
    s_psi_q = psi.T @ m @ psi.conj()
    mixed = phi.T @ m @ psi.conj()
    return (
        TruncatedOperator(s_phi_q, head),
        TruncatedOperator(s_psi_q, head),
        TruncatedOperator(mixed, head),
    )


def identity_resolution_quadrature(
    system: BiorthogonalSystem,
    spec: QuadratureSpec | None = None,
    tol: Tolerances | None = None,
) -> QuadratureResult:
    """Quadrature versions of both frame operators and the mixed identity.

    Defects are trust-restricted to the moment head: against the partial-sum
    frame operators for the two diagonal integrals, against the identity for
    the mixed one.  Raises on a radially growing integrand or on failure of
    the node-doubling gate; the error carries the observed trace.
    """
    spec = spec or QuadratureSpec()
    tol = tol or Tolerances()
    ratio = radial_growth_ratio(system, spec)
    if ratio > tol.div_ratio:
        raise QuadratureConvergenceError(
            f"integrand grows by {ratio:.3e} along the radial window (limit {tol.div_ratio:.1f}); "
            "the identity integral is formal for this family at this truncation",
            trace=(("radial_growth_ratio", ratio),),
        )
    head = moment_head(system.count, spec, tol)
    if head < 2:
        raise QuadratureConvergenceError(
            f"radial cutoff {spec.r_max} leaves no trusted moments",
            trace=(("moment_head", head),),
        )
    from .frames import frame_operator  # late import; frames does not need us

    m_base = gauss_moment_matrix(system.count, spec)
    s_phi_q, s_psi_q, mixed_q = _quadrature_ops(system, m_base, head)
    s_phi_ref = frame_operator(system.phi, head)
    s_psi_ref = frame_operator(system.psi, head)
    eye = np.eye(head)
    defects = {
        "s_phi": float(np.linalg.norm(s_phi_q.entries[:head, :head] - s_phi_ref.entries[:head, :head], 2)),
        "s_psi": float(np.linalg.norm(s_psi_q.entries[:head, :head] - s_psi_ref.entries[:head, :head], 2)),
        "identity": float(np.linalg.norm(mixed_q.entries[:head, :head] - eye, 2)),
    }
    doubled = QuadratureSpec(spec.r_max, spec.radial_nodes * 2, spec.angular_nodes * 2)
    m_fine = gauss_moment_matrix(system.count, doubled)
    _, _, mixed_fine = _quadrature_ops(system, m_fine, head)
    delta = float(np.linalg.norm((mixed_fine.entries - mixed_q.entries)[:head, :head], 2))
    identity_fine = float(np.linalg.norm(mixed_fine.entries[:head, :head] - eye, 2))
    trace = (
        (spec.radial_nodes, defects["identity"]),
        (doubled.radial_nodes, identity_fine),
    )
    if delta > tol.quad:
        raise QuadratureConvergenceError(
            f"node doubling moved the mixed integral by {delta:.3e} (gate {tol.quad:.1e})",
            trace=(("doubling_delta", delta),) + trace,
        )
    return QuadratureResult(
        op_s_phi=s_phi_q,
        op_s_psi=s_psi_q,
        op_identity=mixed_q,
        defects=defects,
        head=head,
        doubling_delta=delta,
        growth_ratio=ratio,
        node_trace=trace,
        spec=spec,
    )


def identity_resolution_quadrature_2mode(
    system0: BiorthogonalSystem,
    system1: BiorthogonalSystem,
    spec: QuadratureSpec | None = None,
    tol: Tolerances | None = None,
) -> tuple[float, int]:
    """Mixed-identity defect for two modes via the product structure.

    The double integral factorizes exactly into the Kronecker product of
    the single-mode integrals; the defect is evaluated on the flat indices
    whose mode components both lie under the per-mode head.
    """
    res0 = identity_resolution_quadrature(system0, spec, tol)
    res1 = identity_resolution_quadrature(system1, spec, tol)
    mixed = np.kron(res0.op_identity.entries, res1.op_identity.entries)
    head = min(res0.head, res1.head)
    if system0.dim != system1.dim:
        raise ShapeError("two-mode check expects equal per-mode dimensions")
    tuples = multi_indices(system0.dim, 2)
    mask = (tuples[:, 0] < head) & (tuples[:, 1] < head)
    sub = mixed[np.ix_(mask, mask)]
    defect = float(np.linalg.norm(sub - np.eye(sub.shape[0]), 2))
    return defect, head
