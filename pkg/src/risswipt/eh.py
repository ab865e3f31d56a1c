"""Saturating nonlinear energy-harvesting model (all powers in mW)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InfeasibleTarget(ValueError):
    """Requested harvested power is at or above the saturation level."""


@dataclass(frozen=True)
class EhModel:
    a: float = 2.463
    b: float = 1.635
    c: float = 0.826

    def __post_init__(self):
        if min(self.a, self.b, self.c) <= 0:
            raise ValueError("EH coefficients must be positive")
        if self.a <= self.b / self.c:
            raise ValueError(f"need a > b/c for an invertible model, got a={self.a}, b/c={self.b / self.c}")

    @classmethod
    def from_scenario(cls, scn) -> "EhModel":
        return cls(scn.eh_a, scn.eh_b, scn.eh_c)

    @property
    def saturation(self) -> float:
        return self.a - self.b / self.c

    def harvest(self, p_in):
        """Harvested power for linear input power ``p_in`` (mW)."""
        p = np.asarray(p_in, dtype=float)
        if np.any(p < 0):
            raise ValueError("input power must be nonnegative")
        # (a p + b)/(p + c) - b/c, rewritten to avoid cancellation near p = 0
        out = p * (self.a - self.b / self.c) / (p + self.c)
        return float(out) if out.ndim == 0 else out

    def required_input(self, target):
        """Linear input power (mW) that yields ``target`` harvested power."""
        e = np.asarray(target, dtype=float)
        if np.any(e < 0):
            raise ValueError("harvested-power target must be nonnegative")
        if np.any(e >= self.saturation):
            raise InfeasibleTarget(f"target {np.max(e)} mW >= saturation {self.saturation} mW")
        out = e * self.c / (self.saturation - e)
        return float(out) if out.ndim == 0 else out
