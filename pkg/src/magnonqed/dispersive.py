"""Dispersive shifts and cavity-mediated couplings of the multimode system.

Every detuning is ``f_cavity - f_qubit`` (or ``f_cavity - f_magnon``) built
from *bare* frequencies, so chi > 0 when the cavity sits above the qubit.
Use :func:`bare_qubit_frequency` to convert a measured (dressed) qubit
frequency first.
"""

from collections import namedtuple
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConfigurationError, ConvergenceError, SingularityError


def _nonzero(delta, what):
    if delta == 0:
        raise SingularityError(f"{what} is zero", pole=0.0)


def chi(g, delta):
    """Dispersive shift g^2 / Delta."""
    _nonzero(delta, "qubit-cavity detuning")
    return g**2 / delta


def lamb_shift(g, delta, alpha, l):
    """Shift of qubit level ``l``: l g^2 / (Delta - (l - 1) alpha)."""
    denom = delta - (l - 1) * alpha
    _nonzero(denom, f"denominator Delta - (l-1) alpha for level {l}")
    return l * g**2 / denom


def chi_level(g, delta, alpha, l):
    """Cavity pull with the qubit in level ``l``.

    g^2 [(l + 1) / (Delta - l alpha) - l / (Delta - (l - 1) alpha)]; l = 0 gives chi.
    """
    upper = delta - l * alpha
    _nonzero(upper, f"denominator Delta - l alpha for level {l}")
    if l == 0:
        return g**2 / upper
    lower = delta - (l - 1) * alpha
    _nonzero(lower, f"denominator Delta - (l-1) alpha for level {l}")
    return g**2 * ((l + 1) / upper - l / lower)


def readout_shift(g, delta, alpha):
    """Qubit-state-dependent cavity shift chi^(1) - chi."""
    return chi_level(g, delta, alpha, 1) - chi(g, delta)


MagnonPull = namedtuple("MagnonPull", ["magnon", "cavity"])


def magnon_pull(g_m, delta_m):
    """Kittel-mode shift -g_m^2 / Delta_m and the matching cavity shift +g_m^2 / Delta_m."""
    _nonzero(delta_m, "cavity-magnon detuning")
    shift = g_m**2 / delta_m
    return MagnonPull(magnon=-shift, cavity=shift)


def cross_kerr(g_m, delta_m, N_net):
    """Photon-number-dependent Kittel shift -(1/N) 2 g_m^2 / Delta_m."""
    if not N_net > 0:
        raise ValueError("spin count must be positive")
    _nonzero(delta_m, "cavity-magnon detuning")
    return -2 * g_m**2 / (N_net * delta_m)


def effective_qubit_magnon_coupling(modes, f_q):
    """Sum over modes of g_m g_q / (f_c - f_q); ``modes`` yields (g_q, g_m, f_c)."""
    total = 0.0
    for g_q, g_m, f_c in modes:
        if f_c == f_q:
            raise SingularityError(
                f"cavity mode at {f_c:g} Hz is resonant with the qubit", pole=f_c
            )
        total += g_m * g_q / (f_c - f_q)
    return total


def purcell_rate(modes):
    """Purcell decay rate sum chi kappa / Delta in Hz; ``modes`` yields (chi, kappa_total, Delta)."""
    rate = 0.0
    for chi_p, kappa, delta in modes:
        if kappa < 0:
            raise ConfigurationError(f"negative total cavity rate {kappa}")
        _nonzero(delta, "qubit-cavity detuning")
        rate += chi_p * kappa / delta
    if rate < 0:
        raise ConfigurationError(
            "Purcell rate is negative; chi and detuning signs are inconsistent"
        )
    return rate


def purcell_t1(modes):
    """Purcell-limited T1 in seconds; ``math.inf`` when every mode is lossless."""
    rate = purcell_rate(modes)
    if rate == 0:
        return math.inf
    return 1 / (2 * math.pi * rate)


def dressed_qubit_frequency(f_q_bare, modes):
    """Bare qubit frequency minus the first-level Lamb shifts; ``modes`` yields (g_q, f_c)."""
    return f_q_bare - sum(chi(g, f_c - f_q_bare) for g, f_c in modes)


def bare_qubit_frequency(f_q_dressed, modes, tol=1.0, max_iter=100):
    """Invert :func:`dressed_qubit_frequency` by fixed-point iteration (``tol`` in Hz)."""
    modes = list(modes)
    f = f_q_dressed
    for _ in range(max_iter):
        f_new = f_q_dressed + sum(chi(g, f_c - f) for g, f_c in modes)
        if abs(f_new - f) < tol:
            return f_new
        f = f_new
    raise ConvergenceError(
        f"bare qubit frequency did not converge in {max_iter} iterations"
    )


def qubit_state_dependent_kittel_shift(*args, **kwargs):
    """Third-order qubit-state-dependent Kittel shift: no closed form is available."""
    raise NotImplementedError(
        "the third-order qubit-state-dependent Kittel shift is not modelled"
    )


@dataclass
class DispersiveReport:
    """Perturbative shifts of a :class:`~magnonqed.hybrid.HybridSystem`, keyed by mode index."""

    chi: dict = field(default_factory=dict)
    lamb_shift: dict = field(default_factory=dict)
    chi_level: dict = field(default_factory=dict)
    cavity_pull: dict = field(default_factory=dict)
    magnon_pull: dict = field(default_factory=dict)
    cross_kerr: dict = field(default_factory=dict)
    readout_shift: float = None
    g_qm: float = None
    g_qm_dressed_detuning: float = None
    dressed_qubit_frequency: float = None
    purcell_T1: float = None

    def rows(self):
        """Flatten into (quantity, mode, level, value, unit) rows."""
        out = []
        for p, value in self.chi.items():
            out.append(("chi", p, "", value, "Hz"))
        for p, levels in self.lamb_shift.items():
            for l, value in levels.items():
                out.append(("lamb_shift", p, l, value, "Hz"))
        for p, levels in self.chi_level.items():
            for l, value in levels.items():
                out.append(("chi_level", p, l, value, "Hz"))
        for name in ("cavity_pull", "magnon_pull", "cross_kerr"):
            for p, value in getattr(self, name).items():
                out.append((name, p, "", value, "Hz"))
        for name, unit in (
            ("readout_shift", "Hz"),
            ("g_qm", "Hz"),
            ("g_qm_dressed_detuning", "Hz"),
            ("dressed_qubit_frequency", "Hz"),
            ("purcell_T1", "s"),
        ):
            value = getattr(self, name)
            if value is not None:
                out.append((name, "", "", value, unit))
        return out


def dispersive_report(sys):
    """Evaluate every shift for ``sys`` using its bare qubit and Kittel frequencies."""
    rep = DispersiveReport()
    q = sys.qubit
    f_m = sys.magnon.f_m
    n_net = sys.sample.N_net if sys.sample is not None else None
    for m in sys.modes:
        if q is not None:
            delta = m.f_c - q.f_q
            if m.g_q:
                rep.chi[m.p] = chi(m.g_q, delta)
                rep.lamb_shift[m.p] = {
                    l: lamb_shift(m.g_q, delta, q.alpha, l) for l in range(1, q.levels)
                }
                rep.chi_level[m.p] = {
                    l: chi_level(m.g_q, delta, q.alpha, l)
                    for l in range(1, max(2, q.levels - 1))
                }
            else:
                rep.chi[m.p] = 0.0
        if m.g_m:
            pull = magnon_pull(m.g_m, m.f_c - f_m)
            rep.cavity_pull[m.p] = pull.cavity
            rep.magnon_pull[m.p] = pull.magnon
            if n_net:
                rep.cross_kerr[m.p] = cross_kerr(m.g_m, m.f_c - f_m, n_net)
        else:
            rep.cavity_pull[m.p] = rep.magnon_pull[m.p] = 0.0
    if q is None:
        return rep
    coupled = [m for m in sys.modes if m.g_q]
    rep.dressed_qubit_frequency = dressed_qubit_frequency(
        q.f_q, [(m.g_q, m.f_c) for m in coupled]
    )
    triples = [(m.g_q, m.g_m, m.f_c) for m in coupled if m.g_m]
    rep.g_qm = effective_qubit_magnon_coupling(triples, q.f_q)
    rep.g_qm_dressed_detuning = effective_qubit_magnon_coupling(
        triples, rep.dressed_qubit_frequency
    )
    rep.purcell_T1 = purcell_t1(
        [(rep.chi[m.p], m.kappa_total, m.f_c - q.f_q) for m in coupled]
    )
    if sys.readout_mode is not None:
        ro = sys.mode(sys.readout_mode)
        rep.readout_shift = readout_shift(ro.g_q, ro.f_c - q.f_q, q.alpha)
    return rep


# -- brute-force check of the perturbative formulas ---------------------------


def _ladder(n):
    return np.diag(np.sqrt(np.arange(1, n)), k=1)


def truncated_hamiltonian(
    f_c, f_q, alpha, f_m, g_q, g_m, qubit_levels=3, n_photons=3, magnon_levels=2
):
    """One cavity mode, a transmon and the Kittel mode, truncated; ordering (cavity, qubit, magnon).

    Returns the matrix in Hz together with the excitation number of each basis state.
    """
    dims = (n_photons + 1, qubit_levels, magnon_levels)
    a, b, c = (_ladder(n) for n in dims)
    eye = [np.eye(n) for n in dims]

    def embed(op, slot):
        mats = list(eye)
        mats[slot] = op
        return np.kron(np.kron(mats[0], mats[1]), mats[2])

    A, B, C = embed(a, 0), embed(b, 1), embed(c, 2)
    n_a, n_b, n_c = A.T @ A, B.T @ B, C.T @ C
    ham = (
        f_c * n_a
        + (f_q - alpha / 2) * n_b
        + (alpha / 2) * n_b @ n_b
        + f_m * n_c
        + g_q * (B.T @ A + A.T @ B)
        + g_m * (C.T @ A + A.T @ C)
    )
    excitations = np.rint(np.diag(n_a + n_b + n_c)).astype(int)
    return ham, excitations


def _basis_index(dims, n_a, n_b, n_c):
    return int(np.ravel_multi_index((n_a, n_b, n_c), dims))


def exact_cavity_pull(f_c, f_q, alpha, g_q, qubit_state=0, qubit_levels=3, n_photons=3):
    """Exact shift of the one-photon transition of the cavity for a given qubit level.

    Compares with :func:`chi_level` (``chi`` for level 0). The magnon is left
    uncoupled.
    """
    ham, _ = truncated_hamiltonian(
        f_c, f_q, alpha, 0.0, g_q, 0.0, qubit_levels, n_photons, magnon_levels=1
    )
    dims = (n_photons + 1, qubit_levels, 1)
    energies, vecs = np.linalg.eigh(ham)
    weights = np.abs(vecs) ** 2

    def dressed(n_a, n_b):
        return energies[np.argmax(weights[_basis_index(dims, n_a, n_b, 0)])]

    return dressed(1, qubit_state) - dressed(0, qubit_state) - f_c


def exact_qubit_magnon_splitting(
    f_c, f_q, alpha, g_q, g_m, qubit_levels=3, n_photons=3, magnon_levels=2
):
    """Minimum gap between the two qubit/magnon-like single-excitation states.

    The Kittel frequency is scanned through the qubit; the avoided-crossing
    gap is ``2 |g_qm|`` to leading order.
    """
    dims = (n_photons + 1, qubit_levels, magnon_levels)
    i_cav = _basis_index(dims, 1, 0, 0)

    def gap(f_m):
        ham, exc = truncated_hamiltonian(
            f_c, f_q, alpha, f_m, g_q, g_m, qubit_levels, n_photons, magnon_levels
        )
        block = np.flatnonzero(exc == 1)
        energies, vecs = np.linalg.eigh(ham[np.ix_(block, block)])
        cav_row = list(block).index(i_cav)
        keep = np.argsort(np.abs(vecs[cav_row]) ** 2)[:2]
        e = np.sort(energies[keep])
        return e[1] - e[0]

    estimate = abs(g_q * g_m / (f_c - f_q)) + 1.0
    res = minimize_scalar(
        gap,
        bounds=(f_q - 20 * estimate, f_q + 20 * estimate),
        method="bounded",
        options={"xatol": 1e-6 * estimate},
    )
    return float(res.fun)
