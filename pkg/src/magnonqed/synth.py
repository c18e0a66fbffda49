"""Seeded synthetic data for round-trip checks.

Every random draw comes from a Philox counter-based generator keyed by the
run seed and a stream name, so adding a new stream never perturbs an
existing one.
"""

import zlib

import numpy as np

from .magnetostatics import linewidth_vs_temperature
from .response import Spectrum, anticrossing_sweep, s21

DEFAULT_SEED = 0


def stream(seed, name):
    """Independent generator for the named stream under ``seed``."""
    key = np.random.SeedSequence([int(seed), zlib.crc32(name.encode())])
    return np.random.Generator(np.random.Philox(key))


def complex_noise(rng, shape, sigma):
    """Additive complex Gaussian noise with standard deviation ``sigma`` per quadrature."""
    return sigma * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def synth_s21(frequencies, params, noise=0.0, seed=DEFAULT_SEED, meta=None):
    """Transmission spectrum from :func:`~magnonqed.response.s21` plus noise.

    ``noise`` is relative to the maximum of |S21| on the grid.
    """
    f = np.asarray(frequencies, dtype=float)
    clean = s21(f, **params)
    sigma = noise * np.max(np.abs(clean))
    values = clean + complex_noise(stream(seed, "s21"), f.shape, sigma)
    return Spectrum(f, values, dict(meta or {}))


def synth_linewidth(T, f_m, params, noise=0.0, seed=DEFAULT_SEED):
    """Kittel linewidths versus temperature with relative Gaussian noise."""
    T = np.asarray(T, dtype=float)
    clean = linewidth_vs_temperature(T, f_m, params)
    rng = stream(seed, "linewidth")
    return clean * (1 + noise * rng.standard_normal(T.shape))


def synth_anticrossing(frequencies, currents, sys, cal, noise=0.0, seed=DEFAULT_SEED, p=None):
    """Anticrossing sweep with noise relative to the sweep-wide maximum of |S21|."""
    spectra = anticrossing_sweep(frequencies, currents, sys, cal, p)
    peak = max(np.max(np.abs(s.values)) for s in spectra)
    rng = stream(seed, "anticross")
    out = []
    for s in spectra:
        values = s.values + complex_noise(rng, s.values.shape, noise * peak)
        out.append(Spectrum(s.frequencies, values, s.meta))
    return out
