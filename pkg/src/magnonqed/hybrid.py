"""Parameter model of the cavity / transmon / Kittel-mode hybrid system.

All frequencies, couplings and rates are ordinary frequencies in Hz.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .magnetostatics import YIG, MagnetMaterial
from .units import C_0, gyromagnetic_ratio

# |g/Delta| above this is flagged as outside the comfortable perturbative range
PERTURBATIVE_THRESHOLD = 0.3
# relative mismatch between measured and ideal-box cavity frequency worth a warning
GEOMETRY_TOLERANCE = 0.02
G_M_RTOL = 1e-9


@dataclass(frozen=True)
class CavityGeometry:
    """Rectangular cavity; only width and length set the TE10p frequencies."""

    width: float
    length: float
    height: float = None
    mode_indices: tuple = (1,)

    def __post_init__(self):
        if not (self.width > 0 and self.length > 0):
            raise ValueError("cavity width and length must be positive")
        indices = tuple(int(p) for p in self.mode_indices)
        if any(p < 1 for p in indices):
            raise ValueError("mode indices must be >= 1")
        object.__setattr__(self, "mode_indices", indices)


def te10p_frequency(geom, p):
    """Ideal TE10p resonance, f = (c0 / 2) sqrt((1/W)^2 + (p/L)^2), in Hz.

    The prefactor is chosen for ordinary frequency; a (pi/2) c0 prefactor
    reproduces neither the ordinary nor the angular frequency of measured
    box cavities.
    """
    p = np.asarray(p)
    if np.any(p < 1):
        raise ValueError("mode index p must be >= 1")
    f = 0.5 * C_0 * np.sqrt((1 / geom.width) ** 2 + (p / geom.length) ** 2)
    return float(f) if f.ndim == 0 else f


@dataclass(frozen=True)
class SphereSample:
    diameter: float
    material: MagnetMaterial = YIG

    def __post_init__(self):
        if self.diameter < 0:
            raise ValueError("diameter must be non-negative")

    @property
    def volume(self):
        return math.pi / 6 * self.diameter**3

    @property
    def N_net(self):
        return net_spin_count(self)


def net_spin_count(sample):
    """Number of net spins 2sN: spin density times sphere volume."""
    return sample.material.spin_density * sample.volume


def single_spin_coupling(B0, g_factor=2.0):
    """Single-spin coupling g0 / 2 pi in Hz for a single-photon field ``B0`` (T).

    Uses g0 / 2 pi = (gamma / 2 pi) B0 / 4: a linearly polarized field
    contributes half its amplitude to the co-rotating component, on top of
    the 1/2 of the spin matrix element.
    """
    B0 = np.asarray(B0, dtype=float)
    if np.any(B0 < 0):
        raise ValueError("field amplitude must be non-negative")
    out = gyromagnetic_ratio(g_factor) * B0 / 4
    return float(out) if out.ndim == 0 else out


def ensemble_coupling(g0, N_net):
    """Collective coupling g0 sqrt(N_net)."""
    N_net = np.asarray(N_net, dtype=float)
    if np.any(N_net < 0):
        raise ValueError("spin count must be non-negative")
    out = g0 * np.sqrt(N_net)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CavityMode:
    p: int
    f_c: float
    kappa_in: float = 0.0
    kappa_out: float = 0.0
    kappa_int: float = 0.0
    g_q: float = 0.0
    g_m: float = 0.0
    B0_at_sample: float = None

    @property
    def kappa_ext(self):
        return self.kappa_in + self.kappa_out

    @property
    def kappa_total(self):
        return self.kappa_in + self.kappa_out + self.kappa_int

    def with_sample(self, sample, g_factor=None):
        """Copy with ``g_m`` recomputed from ``B0_at_sample`` and the sample spin count."""
        if self.B0_at_sample is None:
            return self
        g_factor = sample.material.g_factor if g_factor is None else g_factor
        g0 = single_spin_coupling(self.B0_at_sample, g_factor)
        return replace(self, g_m=ensemble_coupling(g0, net_spin_count(sample)))


@dataclass(frozen=True)
class QubitParams:
    f_q: float
    alpha: float
    gamma_q: float = 0.0
    levels: int = 3


@dataclass(frozen=True)
class MagnonMode:
    f_m: float
    gamma_m: float = 0.0


@dataclass(frozen=True)
class HybridSystem:
    """Cavity modes coupled to one transmon and the Kittel mode of one sphere.

    Frequencies given here are taken as measured/bare values; a geometry, if
    present, is only used as a cross-check.
    """

    modes: tuple
    magnon: MagnonMode
    qubit: QubitParams = None
    sample: SphereSample = None
    geometry: CavityGeometry = None
    readout_mode: int = None

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))

    def mode(self, p):
        for m in self.modes:
            if m.p == p:
                return m
        raise KeyError(f"no cavity mode with index p={p}")

    def with_magnon_frequency(self, f_m):
        return replace(self, magnon=replace(self.magnon, f_m=f_m))


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    regimes: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_system(sys):
    """Check invariants and classify coupling regimes; never raises."""
    report = ValidationReport()
    v, w = report.violations, report.warnings

    if not sys.modes:
        v.append("no cavity modes")
    ps = [m.p for m in sys.modes]
    if len(set(ps)) != len(ps):
        v.append(f"duplicate mode indices {ps}")
    for m in sys.modes:
        if m.p < 1:
            v.append(f"mode p={m.p}: index must be >= 1")
        if not (math.isfinite(m.f_c) and m.f_c > 0):
            v.append(f"mode p={m.p}: frequency must be positive")
        for name in ("kappa_in", "kappa_out", "kappa_int"):
            value = getattr(m, name)
            if not (math.isfinite(value) and value >= 0):
                v.append(f"mode p={m.p}: {name} must be non-negative, got {value}")
    ordered = sorted(sys.modes, key=lambda m: m.p)
    for a, b in zip(ordered, ordered[1:]):
        if not b.f_c > a.f_c:
            v.append(
                f"mode frequencies not increasing with p: f(p={a.p})={a.f_c:g} Hz, "
                f"f(p={b.p})={b.f_c:g} Hz"
            )
    if list(sys.modes) != ordered:
        v.append("modes are not listed in increasing p")

    if sys.magnon.f_m <= 0:
        v.append("Kittel frequency must be positive")
    if sys.magnon.gamma_m < 0:
        v.append("gamma_m must be non-negative")

    q = sys.qubit
    if q is not None:
        if not q.alpha < 0:
            v.append(f"anharmonicity must be negative, got {q.alpha}")
        if not 2 <= q.levels <= 5:
            v.append(f"qubit levels must lie in [2, 5], got {q.levels}")
        if q.gamma_q < 0:
            v.append("gamma_q must be non-negative")
        if q.f_q <= 0:
            v.append("qubit frequency must be positive")

    if sys.readout_mode is not None and sys.readout_mode not in ps:
        v.append(f"readout mode p={sys.readout_mode} not among modes {ps}")

    if sys.sample is not None:
        for m in sys.modes:
            if m.B0_at_sample is None:
                continue
            expected = m.with_sample(sys.sample).g_m
            if not math.isclose(m.g_m, expected, rel_tol=G_M_RTOL, abs_tol=0.0):
                v.append(
                    f"mode p={m.p}: g_m={m.g_m:g} Hz inconsistent with B0 and spin "
                    f"count ({expected:g} Hz)"
                )

    if sys.geometry is not None:
        for m in sys.modes:
            f_geo = te10p_frequency(sys.geometry, m.p)
            if abs(m.f_c - f_geo) > GEOMETRY_TOLERANCE * m.f_c:
                w.append(
                    f"mode p={m.p}: measured {m.f_c / 1e9:.4f} GHz differs from ideal "
                    f"TE10{m.p} {f_geo / 1e9:.4f} GHz by more than "
                    f"{GEOMETRY_TOLERANCE:.0%}; measured value used"
                )

    for m in sys.modes:
        if q is not None and m.g_q:
            delta = m.f_c - q.f_q
            ratio = abs(m.g_q / delta) if delta else math.inf
            report.regimes[f"qubit_p{m.p}_g_over_delta"] = ratio
            if ratio > PERTURBATIVE_THRESHOLD:
                w.append(
                    f"mode p={m.p}: |g_q/Delta| = {ratio:.2f} exceeds the perturbative "
                    f"comfort threshold {PERTURBATIVE_THRESHOLD}"
                )
        if m.g_m:
            strong = m.g_m > m.kappa_total and m.g_m > sys.magnon.gamma_m
            report.regimes[f"magnon_p{m.p}_strong_coupling"] = strong
            delta_m = m.f_c - sys.magnon.f_m
            if delta_m:
                report.regimes[f"magnon_p{m.p}_g_over_delta"] = abs(m.g_m / delta_m)
    return report
