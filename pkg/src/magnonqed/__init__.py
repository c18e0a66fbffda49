"""Cavity quantum magnonics toolkit.

Spin-wave dispersion, Kittel-mode response, cavity/qubit/magnon coupling
chains, transmission spectra, dispersive shifts and fitting, all in
ordinary frequency units (Hz).
"""

__version__ = "0.1.0"
