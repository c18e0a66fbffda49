"""Linearized Landau-Lifshitz response of a magnetized sphere.

Time dependence is exp(+i omega t). Fields are in tesla, drive fields ``h``
in A/m, and the returned transverse magnetization ``m`` in tesla (mu_0 M).
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import SingularityError
from .units import H, K_B, MU_0, MU_B, gyromagnetic_ratio

YIG_SPIN_DENSITY = 2.1e22 * 1e6  # mu_B per m^3 (2.1e22 per cm^3)
POLE_RTOL = 1e-9


@dataclass(frozen=True)
class MagnetMaterial:
    """Ferromagnetic insulator. ``M_s`` defaults to spin_density * mu_B."""

    spin_density: float = YIG_SPIN_DENSITY
    g_factor: float = 2.0
    M_s: float = field(default=None)

    def __post_init__(self):
        if self.M_s is None:
            object.__setattr__(self, "M_s", self.spin_density * MU_B)
        for name in ("spin_density", "g_factor", "M_s"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")


YIG = MagnetMaterial()


@dataclass(frozen=True)
class Susceptibility:
    kappa: float
    nu: float


@dataclass(frozen=True)
class LinewidthModelParams:
    """TLS-limited zero-temperature width plus a temperature-independent floor (Hz)."""

    gamma_TLS: float
    gamma_0: float

    def __post_init__(self):
        if self.gamma_TLS < 0 or self.gamma_0 < 0:
            raise ValueError("linewidth contributions must be non-negative")


def _field_frequency(f, B_z, mat):
    """omega / gamma expressed as a field in tesla, with the pole check."""
    if not B_z > 0:
        raise ValueError(f"static field must be positive, got {B_z}")
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise ValueError("frequency must be non-negative")
    pole = gyromagnetic_ratio(mat.g_factor) * B_z
    if np.any(np.abs(f - pole) <= POLE_RTOL * pole):
        raise SingularityError(
            f"susceptibility evaluated at the resonance pole f = {pole:.9g} Hz", pole=pole
        )
    return f / gyromagnetic_ratio(mat.g_factor)


def susceptibility(f, B_z, mat=YIG):
    """Diagonal and off-diagonal Polder susceptibility components (kappa, nu)."""
    w = _field_frequency(f, B_z, mat)
    denom = B_z**2 - w**2
    kappa = MU_0 * mat.M_s * B_z / denom
    nu = MU_0 * mat.M_s * w / denom
    if np.ndim(kappa) == 0:
        return Susceptibility(float(kappa), float(nu))
    return Susceptibility(kappa, nu)


def transverse_magnetization(h, f, B_z, mat=YIG):
    """Steady-state (m_x, m_y) for a transverse drive ``h = (h_x, h_y)``.

    Valid only in the linear regime |h| << B_z / mu_0, which is not checked.
    """
    h_x, h_y = np.asarray(h, dtype=complex)
    w = _field_frequency(f, B_z, mat)
    pref = MU_0 * mat.M_s / (B_z**2 - w**2)
    m_x = pref * (B_z * h_x - 1j * w * h_y)
    m_y = pref * (1j * w * h_x + B_z * h_y)
    return np.array([m_x, m_y])


def kittel_frequency(B_eff, g_factor=2.0):
    """Uniform-precession frequency gamma B_eff / 2 pi of a sphere (Hz).

    Shape anisotropy cancels for a sphere; crystalline anisotropy and any
    field offsets are assumed to be folded into ``B_eff``.
    """
    B_eff = np.asarray(B_eff, dtype=float)
    if np.any(~(B_eff > 0)):
        raise ValueError("effective field must be positive")
    out = gyromagnetic_ratio(g_factor) * B_eff
    return float(out) if out.ndim == 0 else out


def linewidth_vs_temperature(T, f_m, params):
    """gamma_m(T) = gamma_TLS tanh(h f_m / 2 k_B T) + gamma_0."""
    if not f_m > 0:
        raise ValueError("Kittel frequency must be positive")
    T = np.asarray(T, dtype=float)
    if np.any(T < 0):
        raise ValueError("temperature must be non-negative")
    with np.errstate(divide="ignore"):
        x = H * f_m / (2 * K_B * T)
    out = params.gamma_TLS * np.tanh(x) + params.gamma_0
    return float(out) if out.ndim == 0 else out
