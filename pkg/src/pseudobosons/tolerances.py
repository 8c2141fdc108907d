"""Tolerance policy.

A single immutable table holds every threshold the checks use, so a report
can echo the exact values it was produced with.  Residuals that compare
matrices use the scaled rule

    tau = scale * dim * eps * max(1, product of operand norms)

which keeps the bound meaningful as the truncation grows.  The remaining
entries are absolute thresholds calibrated on the shipped models at
dim <= 128; all are overridable.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class Tolerances:
    bio: float = 1e-8          # Gram-matrix deviation from the identity
    tail: float = 1e-8         # coherent series tail bound
    quad: float = 1e-6         # node-doubling change gate for quadrature
    moment: float = 2e-6       # radial tail cut deciding trusted moment head
    kernel: float = 1e-8       # relative sigma_min declaring a kernel vector
    herm: float = 1e-10        # relative Hermiticity deviation
    div_ratio: float = 10.0    # radial integrand growth flagging divergence
    flat_ratio: float = 1.5    # condition growth below this reads as flat
    grow_ratio: float = 4.0    # condition growth above this reads as growing
    scale: float = 100.0       # kappa in the scaled matrix rule

    def matrix(self, *operands) -> float:
        """Scaled residual threshold for a comparison between matrices.

        `operands` may be arrays or anything with an `entries` attribute.
        """
        dim = 2
        prod = 1.0
        for op in operands:
            arr = np.asarray(getattr(op, "entries", op))
            dim = max(dim, arr.shape[0])
            prod *= float(np.linalg.norm(arr, 2))
        return self.scale * dim * EPS * max(1.0, prod)

    def replace(self, **overrides) -> "Tolerances":
        for key, value in overrides.items():
            if not hasattr(self, key):
                raise ConfigError(f"unknown tolerance key {key!r}")
            if not (float(value) > 0.0):
                raise ConfigError(f"tolerance {key} must be positive, got {value!r}")
        return dataclasses.replace(self, **{k: float(v) for k, v in overrides.items()})

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)
