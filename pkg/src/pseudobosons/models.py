"""Concrete pseudo-boson models, ready to instantiate at any truncation.

Four families ship:

* standard bosons, the self-dual reference point;
* the extended oscillator, a c-number shift of both ladders (parameter
  beta > 0) whose metric is exp(2(a + a*)/beta);
* the Swanson pair, a Bogoliubov-type mix (parameter theta strictly
  between -pi/4 and pi/4, nonzero) whose metric is the squeeze-type
  exponential |alpha|^2 exp(i theta (a^2 - a*^2));
* the Riesz-seeded construction, standard ladders conjugated by a known
  positive seed with prescribed condition number.

Plus the derivative/position grid pair, which deliberately has no
normalizable vacuum and serves as the negative demo.

Parameter corners that are admissible in exact arithmetic but hostile to
float64 at useful cutoffs (beta well below 1, theta close to the quarter
turn) are constructible here but left out of the shipped registry; their
norm profiles outrun the Gram tolerance before the families are useful.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoVacuumError, ParameterError
from .fock import TruncatedOperator, build_ladder, default_trust, herm_exp
from .frames import debosonize
from .pbsystem import BiorthogonalSystem, PseudoBosonPair, build_system, vacuum_solve
from .tolerances import Tolerances

KINDS = ("standard", "extended_oscillator", "swanson", "riesz_seeded", "counterexample")


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    dim: int
    d: int = 1
    beta: float | None = None
    theta: float | None = None
    alpha: complex = 1.0
    condition: float | None = None
    rotate: bool = False
    seed: int = 0
    grid_points: int | None = None
    box_half_width: float | None = None

    @property
    def label(self) -> str:
        if self.kind == "extended_oscillator":
            return f"extended_oscillator(beta={self.beta:g})"
        if self.kind == "swanson":
            return f"swanson(theta={self.theta:g})"
        if self.kind == "riesz_seeded":
            return f"riesz_seeded(condition={self.condition:g})"
        if self.kind == "counterexample":
            return f"counterexample(n={self.grid_points}, half_width={self.box_half_width:g})"
        return self.kind


def standard(dim: int = 64) -> ModelSpec:
    return ModelSpec(kind="standard", dim=dim)


def extended_oscillator(beta: float, dim: int = 64) -> ModelSpec:
    if not (math.isfinite(beta) and beta > 0):
        raise ParameterError(f"beta must be positive and finite, got {beta!r}")
    return ModelSpec(kind="extended_oscillator", dim=dim, beta=float(beta))


def swanson(theta: float, alpha: complex = 1.0, dim: int = 64) -> ModelSpec:
    if not (0.0 < abs(theta) < math.pi / 4):
        raise ParameterError(f"theta must lie in (-pi/4, pi/4) excluding 0, got {theta!r}")
    if alpha == 0:
        raise ParameterError("alpha must be nonzero")
    return ModelSpec(kind="swanson", dim=dim, theta=float(theta), alpha=complex(alpha))


def riesz_seeded(condition: float = 10.0, dim: int = 64, rotate: bool = False, seed: int = 0) -> ModelSpec:
    if not (math.isfinite(condition) and condition >= 1.0):
        raise ParameterError(f"seed condition must be >= 1, got {condition!r}")
    return ModelSpec(kind="riesz_seeded", dim=dim, condition=float(condition), rotate=bool(rotate), seed=int(seed))


def counterexample(grid_points: int = 201, box_half_width: float = 10.0) -> ModelSpec:
    if grid_points < 8:
        raise ParameterError(f"grid needs at least 8 points, got {grid_points}")
    if not (math.isfinite(box_half_width) and box_half_width > 0):
        raise ParameterError(f"box half-width must be positive, got {box_half_width!r}")
    return ModelSpec(
        kind="counterexample",
        dim=int(grid_points),
        grid_points=int(grid_points),
        box_half_width=float(box_half_width),
    )


def with_dim(spec: ModelSpec, dim: int) -> ModelSpec:
    """Same model at another truncation (grid size, for the grid model)."""
    if spec.kind == "counterexample":
        return dataclasses.replace(spec, dim=int(dim), grid_points=int(dim))
    return dataclasses.replace(spec, dim=int(dim))


SHIPPED_MODELS = {
    "standard": standard(),
    "extended_beta1": extended_oscillator(1.0),
    "extended_beta2": extended_oscillator(2.0),
    "swanson_theta01": swanson(0.1),
    "swanson_theta02": swanson(0.2),
    "swanson_theta03": swanson(0.3),
    "riesz_cond4": riesz_seeded(4.0),
    "riesz_cond10": riesz_seeded(10.0),
    "counterexample": counterexample(),
}


def riesz_seed_matrix(spec: ModelSpec) -> TruncatedOperator:
    """Positive seed with condition exactly `spec.condition`.

    Diagonal alternating (1, condition); optionally conjugated by a fixed-
    seed random orthogonal rotation of the leading trust block.  The
    rotation preserves the spectrum; confining it to the leading block
    keeps the ladder's truncation-corner defect in the corner, where a
    full-size rotation would smear it across trusted indices.
    """
    diag = np.where(np.arange(spec.dim) % 2 == 0, 1.0, spec.condition)
    t = np.diag(diag)
    if spec.rotate:
        rng = np.random.default_rng(spec.seed)
        block = default_trust(spec.dim)
        q, _ = np.linalg.qr(rng.standard_normal((block, block)))
        t[:block, :block] = q @ t[:block, :block] @ q.T
    return TruncatedOperator(t, trust=spec.dim)


def grid_operators(spec: ModelSpec) -> tuple[TruncatedOperator, TruncatedOperator]:
    """Central-difference derivative and position on a uniform grid.

    End rows use one-sided differences so the discrete kernel is exactly
    the constants; zero end rows would leave a two-dimensional checkerboard
    kernel and defeat the kernel-growth demonstration.
    """
    n = spec.grid_points
    half = spec.box_half_width
    x = np.linspace(-half, half, n)
    h = 2.0 * half / (n - 1)
    d = np.zeros((n, n))
    for k in range(1, n - 1):
        d[k, k + 1] = 1.0 / (2.0 * h)
        d[k, k - 1] = -1.0 / (2.0 * h)
    d[0, 0], d[0, 1] = -1.0 / h, 1.0 / h
    d[-1, -1], d[-1, -2] = 1.0 / h, -1.0 / h
    trust = default_trust(n)
    return TruncatedOperator(d, trust), TruncatedOperator(np.diag(x), trust)


def instantiate(spec: ModelSpec) -> PseudoBosonPair:
    """The model's (lowering, raising) pair at its truncation."""
    if spec.kind == "standard":
        c, c_dag = build_ladder(spec.dim)
        return PseudoBosonPair(c, c_dag, d=spec.d)
    if spec.kind == "extended_oscillator":
        c, c_dag = build_ladder(spec.dim)
        shift = (1.0 / spec.beta) * TruncatedOperator.identity(spec.dim)
        return PseudoBosonPair(c - shift, c_dag + shift, d=spec.d)
    if spec.kind == "swanson":
        c, c_dag = build_ladder(spec.dim)
        cos_t, sin_t = math.cos(spec.theta), math.sin(spec.theta)
        a = cos_t * c + (1j * sin_t) * c_dag
        b = cos_t * c_dag + (1j * sin_t) * c
        return PseudoBosonPair(a, b, d=spec.d)
    if spec.kind == "riesz_seeded":
        c, c_dag = build_ladder(spec.dim)
        return debosonize(c, c_dag, riesz_seed_matrix(spec))
    if spec.kind == "counterexample":
        d_op, x_op = grid_operators(spec)
        return PseudoBosonPair(d_op, x_op)
    raise ParameterError(f"unknown model kind {spec.kind!r}")


def canonical_vacuum_scale(spec: ModelSpec) -> float:
    """Vacuum normalization matching the closed-form metric diagonal.

    With this scale on phi_0, the squared norms of the generated family
    equal the diagonal of the model's metric, so partial-sum frame
    operators and the explicit exponential can be compared directly.
    """
    if spec.kind == "extended_oscillator":
        return math.exp(1.0 / spec.beta**2)
    if spec.kind == "swanson":
        return abs(spec.alpha) * math.cos(2.0 * spec.theta) ** -0.25
    return 1.0


def build_model_system(
    spec: ModelSpec,
    n_max: int | None = None,
    tol: Tolerances | None = None,
) -> tuple[PseudoBosonPair, BiorthogonalSystem]:
    pair = instantiate(spec)
    system = build_system(pair, n_max=n_max, phi0_scale=canonical_vacuum_scale(spec), tol=tol)
    return pair, system


# ---------------------------------------------------------------------------
# Hamiltonians

def gamma_beta(beta: float) -> float:
    return (2.0 + beta**2) / (2.0 * beta**2)


def omega_theta(theta: float) -> float:
    return 1.0 / math.cos(2.0 * theta)


def _quadratures(dim: int):
    c, c_dag = build_ladder(dim)
    x = (1.0 / math.sqrt(2.0)) * (c + c_dag)
    p = (-1j / math.sqrt(2.0)) * (c - c_dag)
    return x, p


def hamiltonian(spec: ModelSpec, form: str = "direct") -> TruncatedOperator:
    """Model Hamiltonian from its quadratic definition or its factorized form.

    direct: the (x, p) expression; factored: the ladder product shifted by
    the model constant.  The two agree on the trust block and differ in the
    truncation corner.
    """
    if spec.kind not in ("extended_oscillator", "swanson"):
        raise ParameterError(f"no Hamiltonian defined for kind {spec.kind!r}")
    if form not in ("direct", "factored"):
        raise ParameterError(f"form must be 'direct' or 'factored', got {form!r}")
    if spec.kind == "extended_oscillator":
        if form == "direct":
            x, p = _quadratures(spec.dim)
            return (spec.beta / 2.0) * (p @ p + x @ x) + (1j * math.sqrt(2.0)) * p
        pair = instantiate(spec)
        shift = gamma_beta(spec.beta) * TruncatedOperator.identity(spec.dim)
        return spec.beta * (pair.b @ pair.a + shift)
    if form == "direct":
        x, p = _quadratures(spec.dim)
        tan2 = math.tan(2.0 * spec.theta)
        return 0.5 * (p @ p + x @ x) + (-0.5j * tan2) * (p @ p - x @ x)
    pair = instantiate(spec)
    shift = 0.5 * TruncatedOperator.identity(spec.dim)
    return omega_theta(spec.theta) * (pair.b @ pair.a + shift)


def hamiltonian_factor_check(spec: ModelSpec, trust: int | None = None) -> float:
    """Trust-block norm of the direct-vs-factored difference."""
    direct = hamiltonian(spec, "direct")
    factored = hamiltonian(spec, "factored")
    t = trust or default_trust(spec.dim)
    return float(np.linalg.norm((direct.entries - factored.entries)[:t, :t], 2))


@dataclass(frozen=True)
class SpectralCheck:
    max_error: float
    max_imag: float
    window: int
    block: int


def default_spectral_window(spec: ModelSpec) -> int:
    # Onset of pseudospectral sensitivity measured at block 32, dim 64:
    # eigenvalues match the ladder formula only well below the block size,
    # and the usable window shrinks with the non-normality of the model.
    if spec.kind == "extended_oscillator":
        return 13 if spec.beta >= 1.0 else 6
    if spec.kind == "swanson":
        return 9 if abs(spec.theta) <= 0.2 else 7
    raise ParameterError(f"no spectral window for kind {spec.kind!r}")


def spectral_check(spec: ModelSpec, block: int = 32, window: int | None = None) -> SpectralCheck:
    """Distance from the predicted real spectrum on a trusted window.

    For each n below the window, finds the computed eigenvalue of the
    truncated Hamiltonian closest to the closed-form level and reports the
    worst distance and worst imaginary part.  Eigenvalues above the window
    are dominated by truncation and non-normality and are not compared.
    """
    if window is None:
        window = default_spectral_window(spec)
    h = hamiltonian(spec, "factored")
    eigs = np.linalg.eigvals(h.entries[:block, :block])
    if spec.kind == "extended_oscillator":
        levels = spec.beta * (np.arange(window) + gamma_beta(spec.beta))
    else:
        levels = omega_theta(spec.theta) * (np.arange(window) + 0.5)
    max_err = 0.0
    max_imag = 0.0
    for n in range(window):
        nearest = eigs[np.argmin(np.abs(eigs - levels[n]))]
        max_err = max(max_err, float(abs(nearest - levels[n])))
        max_imag = max(max_imag, float(abs(nearest.imag)))
    return SpectralCheck(max_error=max_err, max_imag=max_imag, window=window, block=block)


# ---------------------------------------------------------------------------
# Explicit metrics

def explicit_metric(spec: ModelSpec, tol: Tolerances | None = None) -> TruncatedOperator:
    """The model's closed-form metric as a truncated exponential.

    Extended oscillator: exp((2/beta)(c + c*)).  Swanson:
    |alpha|^2 exp(i theta (c^2 - c*^2)); the exponent is Hermitian as
    written.  Exponentiating the truncated exponent is reliable at the
    dims used here (up to 64); well beyond that the truncated eigenbasis
    stops resembling the true section, so compare against partial sums or
    `metric_section` before trusting larger truncations.
    """
    if spec.kind == "extended_oscillator":
        c, c_dag = build_ladder(spec.dim)
        return herm_exp(c + c_dag, scale=2.0 / spec.beta, tol=tol)
    if spec.kind == "swanson":
        c, c_dag = build_ladder(spec.dim)
        exponent = 1j * (c @ c - c_dag @ c_dag)
        metric = herm_exp(exponent, scale=spec.theta, tol=tol)
        return abs(spec.alpha) ** 2 * metric
    raise ParameterError(f"no closed-form metric for kind {spec.kind!r}")


def metric_section(spec: ModelSpec, block: int) -> np.ndarray:
    """Exact leading block of the metric via normal-ordered factorization.

    Both exponentials factor into triangular parts whose leading sections
    close on themselves, so no truncation error enters; the price is
    catastrophic cancellation for large blocks (alternating terms with
    factorial growth).  Stable for the modest blocks used in comparisons,
    roughly 32 and below.
    """
    if spec.kind == "standard":
        return np.eye(block)
    if spec.kind == "riesz_seeded":
        seed = riesz_seed_matrix(spec)
        return (seed.entries @ seed.entries)[:block, :block].copy()
    if spec.kind == "extended_oscillator":
        gamma = 2.0 / spec.beta
        lower = np.zeros((block, block))
        for row in range(block):
            for col in range(row + 1):
                lower[row, col] = (
                    gamma ** (row - col)
                    * math.exp(0.5 * (math.lgamma(row + 1) - math.lgamma(col + 1)))
                    / math.factorial(row - col)
                )
        return math.exp(gamma**2 / 2.0) * (lower @ lower.T)
    if spec.kind == "swanson":
        c, c_dag = build_ladder(max(block, 2))
        half_tan = math.tan(2.0 * spec.theta) / 2.0
        raise2 = (-1j * half_tan) * (c_dag.entries @ c_dag.entries)[:block, :block]
        lower2 = (1j * half_tan) * (c.entries @ c.entries)[:block, :block]
        u1 = np.eye(block, dtype=complex)
        term = np.eye(block, dtype=complex)
        for j in range(1, block // 2 + 2):
            term = term @ raise2 / j
            u1 += term
        u2 = np.eye(block, dtype=complex)
        term = np.eye(block, dtype=complex)
        for j in range(1, block // 2 + 2):
            term = term @ lower2 / j
            u2 += term
        diag = np.cos(2.0 * spec.theta) ** -(np.arange(block) + 0.5)
        return abs(spec.alpha) ** 2 * ((u1 * diag[None, :]) @ u2)
    raise ParameterError(f"no metric section for kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# Counterexample demo

@dataclass(frozen=True)
class CounterexampleReport:
    grid_points: int
    box_half_width: float
    vacuum_outcome: str
    relative_sigma: float
    sigma_min: float
    sigma_next: float
    kernel_constant_deviation: float
    norm_integrals: tuple
    growth_ratio: float
    commutator_residuals: tuple
    commutator_order: float
    classification: str


def counterexample_demo(spec: ModelSpec) -> CounterexampleReport:
    """Demonstrate that the grid pair has no normalizable vacuum.

    Three observations: the trust block of the derivative has no numerical
    kernel, so vacuum solving fails; the full-grid kernel is the constant
    vector, whose squared-norm integral grows linearly with the box at
    fixed spacing; and the commutator equals the identity in the grid
    interior to second order in the spacing.  Failure is the product here.
    """
    if spec.kind != "counterexample":
        raise ParameterError(f"demo requires the counterexample model, got {spec.kind!r}")
    pair = instantiate(spec)
    try:
        vacuum_solve(pair.a)
        outcome = "unexpected: trust block produced a kernel vector"
        rel_sigma = 0.0
    except NoVacuumError as err:
        outcome = str(err)
        rel_sigma = float(err.relative_sigma)

    h = 2.0 * spec.box_half_width / (spec.grid_points - 1)
    integrals = []
    sigma_min = sigma_next = const_dev = 0.0
    for half in (spec.box_half_width, 2.0 * spec.box_half_width):
        points = int(round(2.0 * half / h)) + 1
        d_op, _ = grid_operators(counterexample(points, half))
        _, sv, vh = np.linalg.svd(d_op.entries)
        kernel = vh[-1].conj()
        kernel = kernel / kernel[np.argmax(np.abs(kernel))]
        mean = kernel.mean()
        dev = float(np.max(np.abs(kernel - mean)) / np.abs(mean))
        integrals.append((half, float(np.linalg.norm(kernel) ** 2 * h)))
        if half == spec.box_half_width:
            sigma_min, sigma_next, const_dev = float(sv[-1]), float(sv[-2]), dev
    growth_ratio = integrals[1][1] / integrals[0][1]

    residuals = []
    for spacing in (h, h / 2.0):
        points = int(round(2.0 * spec.box_half_width / spacing)) + 1
        d_op, x_op = grid_operators(counterexample(points, spec.box_half_width))
        grid = np.linspace(-spec.box_half_width, spec.box_half_width, points)
        probe = np.exp(-0.5 * grid**2)
        acted = d_op.entries @ (x_op.entries @ probe) - x_op.entries @ (d_op.entries @ probe)
        gap = np.abs(acted - probe)[2:-2]
        residuals.append((spacing, float(np.max(gap) / np.max(np.abs(probe)))))
    order = residuals[0][1] / residuals[1][1]

    return CounterexampleReport(
        grid_points=spec.grid_points,
        box_half_width=spec.box_half_width,
        vacuum_outcome=outcome,
        relative_sigma=rel_sigma,
        sigma_min=sigma_min,
        sigma_next=sigma_next,
        kernel_constant_deviation=const_dev,
        norm_integrals=tuple(integrals),
        growth_ratio=float(growth_ratio),
        commutator_residuals=tuple(residuals),
        commutator_order=float(order),
        classification="vacuum existence: fail (no normalizable vacuum)",
    )
