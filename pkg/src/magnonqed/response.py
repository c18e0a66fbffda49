"""Frequency-domain observables of the cavity-magnon and qubit-magnon systems.

Input-output expressions are written with ordinary frequencies throughout:
with every frequency and rate divided by 2 pi the transmission is unchanged.
The cavity linewidth ``kappa_in + kappa_out + kappa_int`` is the full width of
the bare cavity line, while ``gamma_m`` enters the magnon propagator unhalved.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .dispersive import chi, chi_level, dispersive_report
from .errors import ConfigurationError

PEAK_THRESHOLD = 0.05


@dataclass(frozen=True)
class CoilCalibration:
    """Kittel frequency versus coil current, f_m = f_m0 + slope * I."""

    f_m0: float
    slope: float

    def __post_init__(self):
        if not (math.isfinite(self.slope) and self.slope != 0):
            raise ValueError("coil slope must be finite and nonzero")

    def kittel(self, current):
        return self.f_m0 + self.slope * np.asarray(current, dtype=float)

    def current_for(self, f_m):
        return (f_m - self.f_m0) / self.slope


@dataclass
class Spectrum:
    """Complex response on a strictly increasing frequency grid."""

    frequencies: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.frequencies.shape != self.values.shape or self.frequencies.ndim != 1:
            raise ValueError("frequencies and values must be 1D arrays of equal length")
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("response values must be finite")

    def __len__(self):
        return len(self.frequencies)


def s21(f, f_c, f_m, g_m, kappa_in, kappa_out, kappa_int, gamma_m):
    """Two-port transmission through a cavity mode coupled to the Kittel mode."""
    f = np.asarray(f, dtype=float)
    kappa = kappa_in + kappa_out + kappa_int
    # cleared of the magnon denominator so a lossless magnon at f = f_m stays finite
    magnon = 1j * (f - f_m) - gamma_m
    cavity = 1j * (f - f_c) - kappa / 2
    g2 = abs(g_m) ** 2
    if g2 == 0:
        return np.sqrt(kappa_in * kappa_out) / cavity
    return np.sqrt(kappa_in * kappa_out) * magnon / (cavity * magnon + g2)


def s21_system(f, sys, p=None):
    """:func:`s21` for mode ``p`` (first mode by default) of a hybrid system."""
    mode = sys.modes[0] if p is None else sys.mode(p)
    return s21(
        f,
        mode.f_c,
        sys.magnon.f_m,
        mode.g_m,
        mode.kappa_in,
        mode.kappa_out,
        mode.kappa_int,
        sys.magnon.gamma_m,
    )


def reflection(f, f_r, kappa_ext, kappa_int):
    """One-port reflection 1 + kappa_ext / (i (f - f_r) - (kappa_ext + kappa_int) / 2)."""
    f = np.asarray(f, dtype=float)
    return 1 + kappa_ext / (1j * (f - f_r) - (kappa_ext + kappa_int) / 2)


def s11_qubit_readout(f, sys, qubit_state=0):
    """Reflection off the readout mode with its resonance pulled by the qubit state.

    The readout mode sits at f_c + chi (qubit in |0>) or f_c + chi^(1) (qubit
    in |1>); its input port is the external coupling.
    """
    if sys.readout_mode is None:
        raise ConfigurationError("no readout mode designated")
    if sys.qubit is None:
        raise ConfigurationError("readout requires a qubit")
    if qubit_state not in (0, 1):
        raise ValueError("qubit_state must be 0 or 1")
    mode = sys.mode(sys.readout_mode)
    q = sys.qubit
    delta = mode.f_c - q.f_q
    if qubit_state == 0:
        shift = chi(mode.g_q, delta)
    else:
        shift = chi_level(mode.g_q, delta, q.alpha, 1)
    return reflection(f, mode.f_c + shift, mode.kappa_ext, mode.kappa_int)


def normal_modes(f_c, kappa_total, f_m, gamma_m, g_m):
    """Complex eigenfrequencies of the damped cavity-magnon pair, sorted by real part.

    Eigenvalues of [[f_c - i kappa/2, g], [g, f_m - i gamma_m]]; the imaginary
    parts are minus the amplitude decay rates in the same convention as :func:`s21`.
    """
    if g_m < 0:
        raise ValueError("coupling must be non-negative")
    mat = np.array(
        [[f_c - 0.5j * kappa_total, g_m], [g_m, f_m - 1j * gamma_m]], dtype=complex
    )
    mean = np.trace(mat) / 2
    half_diff = (mat[0, 0] - mat[1, 1]) / 2
    root = np.sqrt(half_diff**2 + g_m**2)
    ev = np.array([mean - root, mean + root])
    return ev[np.argsort(ev.real)]


def find_peaks(f, y, threshold=PEAK_THRESHOLD):
    """Local maxima of ``y`` refined by three-point parabolic interpolation.

    Maxima lower than ``threshold`` times the global maximum are dropped.
    Returns (positions, heights) sorted by position.
    """
    f = np.asarray(f, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(y) < 3:
        return np.array([]), np.array([])
    floor = threshold * np.max(y)
    inner = np.arange(1, len(y) - 1)
    is_peak = (y[inner] > y[inner - 1]) & (y[inner] >= y[inner + 1]) & (y[inner] >= floor)
    positions, heights = [], []
    for i in inner[is_peak]:
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        curv = y0 - 2 * y1 + y2
        offset = 0.5 * (y0 - y2) / curv if curv != 0 else 0.0
        step = f[i + 1] - f[i] if offset >= 0 else f[i] - f[i - 1]
        positions.append(f[i] + offset * step)
        heights.append(y1 - 0.25 * (y0 - y2) * offset)
    return np.array(positions), np.array(heights)


def peak_separation(f, y, threshold=PEAK_THRESHOLD):
    """Distance between the two highest peaks."""
    pos, h = find_peaks(f, y, threshold)
    if len(pos) < 2:
        raise ValueError(f"found {len(pos)} peak(s), need two")
    top = np.sort(pos[np.argsort(h)[-2:]])
    return top[1] - top[0]


def anticrossing_sweep(frequencies, currents, sys, cal, p=None):
    """Transmission spectra with the Kittel mode tuned by the coil current."""
    frequencies = np.asarray(frequencies, dtype=float)
    out = []
    for current in np.asarray(currents, dtype=float):
        tuned = sys.with_magnon_frequency(float(cal.kittel(current)))
        out.append(
            Spectrum(frequencies, s21_system(frequencies, tuned, p), {"current_A": float(current)})
        )
    return out


def qubit_magnon_branches(f_q, f_m, g_qm):
    """Upper and lower branch frequencies of the exchange-coupled qubit and magnon."""
    if g_qm < 0:
        raise ValueError("coupling must be non-negative")
    mean = (f_q + f_m) / 2
    root = np.hypot(g_qm, (f_q - f_m) / 2)
    return mean + root, mean - root


def qubit_fractions(f_q, f_m, g_qm):
    """Qubit weight of the upper and lower branch; they sum to one."""
    half = (f_q - f_m) / 2
    root = np.hypot(g_qm, half)
    if root == 0:
        return 0.5, 0.5
    upper = 0.5 * (1 + half / root)
    return upper, 1 - upper


def lorentzian(f, center, hwhm):
    return hwhm**2 / ((f - center) ** 2 + hwhm**2)


def qubit_spectrum(f, f_q, f_m, g_qm, gamma_q, gamma_m):
    """Phenomenological qubit-excitation response of the hybridized branches.

    Each branch is a Lorentzian of half width interpolated between ``gamma_q``
    and ``gamma_m`` and peak height equal to its qubit fraction. This is a
    line-shape model only; no readout physics is included.
    """
    f = np.asarray(f, dtype=float)
    upper, lower = qubit_magnon_branches(f_q, f_m, g_qm)
    x_up, x_lo = qubit_fractions(f_q, f_m, g_qm)
    total = np.zeros_like(f)
    for center, x in ((upper, x_up), (lower, x_lo)):
        width = x * gamma_q + (1 - x) * gamma_m
        total += x * lorentzian(f, center, width)
    return total


def qubit_spectrum_sweep(frequencies, currents, sys, cal, g_qm=None, f_q=None):
    """Qubit-excitation spectra versus coil current.

    ``g_qm`` defaults to the cavity-mediated coupling of the dispersive
    report, and ``f_q`` to the dressed qubit frequency.
    """
    if sys.readout_mode is None:
        raise ConfigurationError("no readout mode designated")
    if sys.qubit is None:
        raise ConfigurationError("qubit spectroscopy requires a qubit")
    if g_qm is None or f_q is None:
        rep = dispersive_report(sys)
        g_qm = abs(rep.g_qm) if g_qm is None else g_qm
        f_q = rep.dressed_qubit_frequency if f_q is None else f_q
    frequencies = np.asarray(frequencies, dtype=float)
    out = []
    for current in np.asarray(currents, dtype=float):
        f_m = float(cal.kittel(current))
        values = qubit_spectrum(
            frequencies, f_q, f_m, g_qm, sys.qubit.gamma_q, sys.magnon.gamma_m
        )
        out.append(Spectrum(frequencies, values.astype(complex), {"current_A": float(current)}))
    return out
