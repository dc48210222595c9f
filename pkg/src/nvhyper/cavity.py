"""Steady-state cavity reflection amplitudes and the photon/NV scattering operator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import LocalOperator


class SingularParametersError(ValueError):
    """Raised when the input-output denominator vanishes."""


@dataclass(frozen=True)
class CavityParams:
    """Rates in any consistent unit (rad/s, or scaled by sqrt(kappa*gamma))."""

    g: float
    kappa: float
    kappa_s: float = 0.0
    gamma: float = 1.0
    delta_c: float = 0.0
    delta_0: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.kappa_s < 0:
            raise ValueError(f"kappa_s must be >= 0, got {self.kappa_s}")
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")

    @property
    def resonant(self) -> bool:
        return self.delta_c == 0 and self.delta_0 == 0

    @classmethod
    def normalized(cls, g_norm: float, ks_ratio: float) -> "CavityParams":
        """Resonant parameters with kappa = gamma = 1, so g is in units of sqrt(kappa*gamma)."""
        return cls(g=g_norm, kappa=1.0, kappa_s=ks_ratio, gamma=1.0)


@dataclass(frozen=True)
class ReflectionPair:
    r: complex
    r0: complex

    def __post_init__(self):
        for name in ("r", "r0"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
            if abs(v) > 1 + 1e-12:
                raise ValueError(f"|{name}| = {abs(v)} exceeds 1")

    @property
    def phases(self) -> tuple[float, float]:
        return float(np.angle(self.r)), float(np.angle(self.r0))

    @property
    def is_real(self) -> bool:
        return abs(complex(self.r).imag) < 1e-12 and abs(complex(self.r0).imag) < 1e-12

    def real(self) -> tuple[float, float]:
        if not self.is_real:
            raise ValueError("reflection pair has a non-negligible imaginary part")
        return float(complex(self.r).real), float(complex(self.r0).real)


IDEAL = ReflectionPair(1.0, -1.0)


def reflection_coupled(p: CavityParams) -> complex:
    atom = 1j * p.delta_0 + p.gamma / 2
    cav = 1j * p.delta_c + p.kappa / 2 + p.kappa_s / 2
    denom = atom * cav + p.g**2
    if denom == 0:
        raise SingularParametersError(f"zero denominator for {p}")
    return complex(1 - p.kappa * atom / denom)


def reflection_empty(p: CavityParams) -> complex:
    num = 1j * p.delta_c - p.kappa / 2 + p.kappa_s / 2
    den = 1j * p.delta_c + p.kappa / 2 + p.kappa_s / 2
    return complex(num / den)


def resonant_pair(g_over_sqrt_kg: float, ks_over_k: float) -> ReflectionPair:
    """Real (r, r0) on resonance in the dimensionless coordinates g/sqrt(kappa*gamma), kappa_s/kappa."""
    x, ks = g_over_sqrt_kg, ks_over_k
    if x < 0 or ks < 0 or not (math.isfinite(x) and math.isfinite(ks)):
        raise ValueError(f"need finite non-negative arguments, got ({x}, {ks})")
    r = ((ks - 1) + 4 * x * x) / ((ks + 1) + 4 * x * x)
    r0 = (ks - 1) / (ks + 1)
    return ReflectionPair(r, r0)


def scattering_operator(pair: ReflectionPair) -> LocalOperator:
    """Diagonal on (pol, spin): (R,+) -> r, (R,-) -> r0, (L,+) -> r0, (L,-) -> r."""
    r, r0 = pair.r, pair.r0
    return LocalOperator(np.diag([r, r0, r0, r]), "scatter")
