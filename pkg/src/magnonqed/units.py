"""Physical constants and elementary conversions.

Frequencies and decay rates are ordinary frequencies in Hz everywhere in the
package; angular frequencies only appear inside formulas.
"""

from dataclasses import dataclass
import math

import numpy as np


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-2018 values in SI units."""

    mu_B: float = 9.2740100783e-24  # J/T
    h: float = 6.62607015e-34  # J s, exact
    k_B: float = 1.380649e-23  # J/K, exact
    mu_0: float = 1.25663706212e-6  # T m/A
    c_0: float = 299792458.0  # m/s, exact

    @property
    def hbar(self):
        return self.h / (2 * math.pi)


CONSTANTS = PhysicalConstants()

MU_B = CONSTANTS.mu_B
H = CONSTANTS.h
HBAR = CONSTANTS.hbar
K_B = CONSTANTS.k_B
MU_0 = CONSTANTS.mu_0
C_0 = CONSTANTS.c_0

GHz = 1e9
MHz = 1e6
kHz = 1e3


def gyromagnetic_ratio(g_factor):
    """Return gamma/2pi = g mu_B / h in Hz/T."""
    g_factor = float(g_factor)
    if not math.isfinite(g_factor) or g_factor <= 0:
        raise ValueError(f"g_factor must be positive and finite, got {g_factor}")
    return g_factor * MU_B / H


def thermal_occupancy(f, T):
    """Bose-Einstein occupancy of a mode at frequency ``f`` (Hz) and temperature ``T`` (K).

    Accepts scalars or arrays for ``T``. Zero temperature gives exactly 0.
    """
    f = float(f)
    if not math.isfinite(f) or f <= 0:
        raise ValueError(f"frequency must be positive, got {f}")
    T = np.asarray(T, dtype=float)
    if np.any(T < 0):
        raise ValueError("temperature must be non-negative")
    with np.errstate(divide="ignore", over="ignore"):
        x = np.where(T > 0, H * f / (K_B * np.where(T > 0, T, 1.0)), np.inf)
        n = 1.0 / np.expm1(x)
    n = np.where(T > 0, n, 0.0)
    return float(n) if n.ndim == 0 else n
