"""Closed-form energy levels and PT-regime classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .canonical import diagonalize
from .model import CriticalCouplingError, ModelParams, RegimeError

CRITICAL_BAND = 1e-12


class Regime(enum.Enum):
    UNBROKEN = "unbroken"
    CRITICAL = "critical"
    BROKEN = "broken"


@dataclass(frozen=True)
class EnergyLevel:
    n1: int
    n2: int
    value: complex

    @property
    def sort_key(self) -> tuple[float, float]:
        return (self.value.real, self.value.imag)


def classify_regime(epsilon: float, band: float = CRITICAL_BAND) -> Regime:
    """Unbroken for |eps| < 1, critical at |eps| = 1 (within ``band``), broken beyond."""
    if not math.isfinite(epsilon):
        raise ValueError(f"epsilon must be finite, got {epsilon!r}")
    distance = abs(epsilon) - 1
    if abs(distance) <= band:
        return Regime.CRITICAL
    return Regime.UNBROKEN if distance < 0 else Regime.BROKEN


def require_regime(params: ModelParams, *allowed: Regime, band: float = CRITICAL_BAND) -> Regime:
    regime = classify_regime(float(params.epsilon), band)
    if regime is Regime.CRITICAL and Regime.CRITICAL not in allowed:
        raise CriticalCouplingError(params.epsilon)
    if regime not in allowed:
        raise RegimeError(f"operation requires regime in {[r.value for r in allowed]}, "
                          f"epsilon={params.epsilon!r} is {regime.value}")
    return regime


def energy(params: ModelParams, n1: int, n2: int) -> EnergyLevel:
    if n1 < 0 or n2 < 0:
        raise ValueError("quantum numbers must be non-negative")
    require_regime(params, Regime.UNBROKEN, Regime.BROKEN)
    form = diagonalize(params)
    value = form.omega1 * (2 * n1 + 1) + form.omega2 * (2 * n2 + 1) + form.const_shift
    return EnergyLevel(n1, n2, complex(value))


def level_indices(max_total: int) -> list[tuple[int, int]]:
    return [(n1, total - n1) for total in range(max_total + 1) for n1 in range(total, -1, -1)]


def spectrum_table(params: ModelParams, max_total: int) -> list[EnergyLevel]:
    """All levels with ``n1 + n2 <= max_total``, sorted by (real, imag)."""
    if max_total < 0:
        raise ValueError("max_total must be >= 0")
    levels = [energy(params, n1, n2) for n1, n2 in level_indices(max_total)]
    return sorted(levels, key=lambda lv: (lv.sort_key, lv.n1, lv.n2))


def max_abs_imag(params: ModelParams, max_total: int) -> float:
    return max(abs(lv.value.imag) for lv in spectrum_table(params, max_total))
