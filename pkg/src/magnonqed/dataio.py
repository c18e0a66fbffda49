"""CSV data files and INI run configuration.

CSV dialect: comma separated, ``.`` decimal point, mandatory header, lines
starting with ``#`` are comments. Floats are written with ``repr`` so that a
file read back and written again is byte-identical.
"""

import configparser
import csv
import io
import os
import tempfile
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, SchemaError
from .hybrid import (
    CavityGeometry,
    CavityMode,
    HybridSystem,
    MagnonMode,
    QubitParams,
    SphereSample,
)
from .magnetostatics import YIG_SPIN_DENSITY, LinewidthModelParams, MagnetMaterial
from .response import CoilCalibration, Spectrum
from .spinwave import SpinLattice
from .units import GHz, MHz

META_COLUMNS = ("current_A", "temperature_K", "power_dBm")
MEV = 1.602176634e-22  # J


# -- CSV -------------------------------------------------------------------------


def _read_table(path):
    with open(path, newline="") as fh:
        lines = [(n, line) for n, line in enumerate(fh, start=1)
                 if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        raise SchemaError(f"{path}: no header row")
    reader = csv.reader([line for _, line in lines])
    header = [h.strip() for h in next(reader)]
    rows = []
    for (lineno, _), row in zip(lines[1:], reader):
        if len(row) != len(header):
            raise SchemaError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            rows.append((lineno, [float(v) for v in row]))
        except ValueError as exc:
            raise SchemaError(f"{path}:{lineno}: {exc}") from None
    return header, rows


def _require(header, columns, path):
    for col in columns:
        if col not in header:
            raise SchemaError(f"{path}: missing column {col!r}")


def _columns(header, rows):
    data = np.array([r for _, r in rows], dtype=float).reshape(len(rows), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}, np.array([n for n, _ in rows])


def _spectrum_from(cols, freq, path, lines):
    order = np.argsort(freq, kind="stable")
    f_sorted = freq[order]
    dup = np.flatnonzero(np.diff(f_sorted) == 0)
    if dup.size:
        offenders = sorted({int(lines[order[i]]) for i in dup} | {int(lines[order[i + 1]]) for i in dup})
        raise SchemaError(f"{path}: duplicate frequencies on lines {offenders}")
    re = cols["re"][order]
    im = cols["im"][order] if "im" in cols else np.zeros_like(re)
    meta = {}
    for name in META_COLUMNS:
        if name in cols:
            values = np.unique(cols[name])
            if values.size != 1:
                raise SchemaError(f"{path}: column {name!r} is not constant; load it as a sweep")
            meta[name] = float(values[0])
    return Spectrum(f_sorted, re + 1j * im, meta)


def load_spectrum_csv(path):
    """Read one spectrum (columns frequency_Hz, re, optional im and meta columns)."""
    header, rows = _read_table(path)
    _require(header, ("frequency_Hz", "re"), path)
    cols, lines = _columns(header, rows)
    return _spectrum_from(cols, cols["frequency_Hz"], path, lines)


def load_sweep_csv(path, key="current_A"):
    """Read long-format sweep data, one :class:`Spectrum` per value of ``key``."""
    header, rows = _read_table(path)
    _require(header, (key, "frequency_Hz", "re"), path)
    cols, lines = _columns(header, rows)
    out = []
    for value in np.unique(cols[key]):
        sel = cols[key] == value
        sub = {k: v[sel] for k, v in cols.items()}
        out.append(_spectrum_from(sub, sub["frequency_Hz"], path, lines[sel]))
    return out


def load_linewidth_csv(path, t_max=1.0):
    """Read (temperature_K, gamma_m_Hz) pairs sorted by temperature."""
    header, rows = _read_table(path)
    _require(header, ("temperature_K", "gamma_m_Hz"), path)
    i_t, i_g = header.index("temperature_K"), header.index("gamma_m_Hz")
    pairs = []
    for lineno, row in rows:
        if row[i_g] < 0:
            raise SchemaError(f"{path}:{lineno}: negative linewidth {row[i_g]}")
        if row[i_t] < 0:
            raise SchemaError(f"{path}:{lineno}: negative temperature {row[i_t]}")
        pairs.append((row[i_t], row[i_g]))
    pairs.sort()
    if any(t > t_max for t, _ in pairs):
        warnings.warn(
            f"{path}: temperatures above {t_max} K are outside the TLS linewidth model",
            stacklevel=2,
        )
    return pairs


def format_value(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(header, rows, comments=()):
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def spectra_rows(spectra):
    """Header and long-format rows for one or more spectra."""
    meta_cols = [c for c in META_COLUMNS if any(c in s.meta for s in spectra)]
    header = meta_cols + ["frequency_Hz", "re", "im"]
    rows = []
    for s in spectra:
        prefix = [s.meta.get(c, float("nan")) for c in meta_cols]
        for f, v in zip(s.frequencies, s.values):
            rows.append(prefix + [float(f), float(v.real), float(v.imag)])
    return header, rows


def write_spectra_csv(path, spectra):
    header, rows = spectra_rows(spectra)
    atomic_write(path, csv_text(header, rows))


def write_linewidth_csv(path, T, gamma):
    rows = [(float(t), float(g)) for t, g in zip(T, gamma)]
    atomic_write(path, csv_text(["temperature_K", "gamma_m_Hz"], rows))


# -- configuration -----------------------------------------------------------------


@dataclass
class RunConfig:
    """Parsed INI configuration; sections are kept as plain string maps."""

    sections: dict = field(default_factory=dict)
    seed: int = 0
    output: str = None
    format: str = "csv"

    def section(self, name):
        return self.sections.get(name, {})

    def get(self, section, key, default=None, cast=float):
        value = self.section(section).get(key)
        if value is None:
            return default
        try:
            return cast(value)
        except ValueError:
            raise ConfigurationError(f"[{section}] {key} = {value!r} is not valid") from None

    def require(self, section, key, cast=float):
        value = self.get(section, key, cast=cast)
        if value is None:
            raise ConfigurationError(f"missing [{section}] {key}")
        return value

    def set(self, dotted, value):
        section, _, key = dotted.rpartition(".")
        if not section:
            raise ConfigurationError(f"override {dotted!r} must look like section.key")
        self.sections.setdefault(section, {})[key] = value


def load_config(path=None, text=None):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    if path is not None:
        if not os.path.exists(path):
            raise ConfigurationError(f"config file {path} does not exist")
        parser.read(path)
    if text is not None:
        parser.read_string(text)
    sections = {s: dict(parser.items(s)) for s in parser.sections()}
    cfg = RunConfig(sections=sections)
    run = sections.get("run", {})
    cfg.seed = int(run.get("seed", 0))
    cfg.output = run.get("output")
    cfg.format = run.get("format", "csv")
    return cfg


def as_bool(value):
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(value)


def int_list(value):
    return tuple(int(x) for x in str(value).replace(" ", "").split(",") if x)


def _mode_from(cfg, section, p):
    get = lambda key, scale=1.0, default=0.0: cfg.get(section, key, default) * scale  # noqa: E731
    B0 = cfg.get(section, "B0_pT")
    return CavityMode(
        p=p,
        f_c=cfg.require(section, "f_c_GHz") * GHz,
        kappa_in=get("kappa_in_MHz", MHz),
        kappa_out=get("kappa_out_MHz", MHz),
        kappa_int=get("kappa_int_MHz", MHz),
        g_q=get("g_q_MHz", MHz),
        g_m=get("g_m_MHz", MHz),
        B0_at_sample=None if B0 is None else B0 * 1e-12,
    )


def system_from_config(cfg):
    """Build a :class:`HybridSystem` from [cavity], [mode.N], [qubit], [magnon], [sample]."""
    geometry = None
    if "W_mm" in cfg.section("cavity") and "L_mm" in cfg.section("cavity"):
        geometry = CavityGeometry(
            width=cfg.require("cavity", "W_mm") * 1e-3,
            length=cfg.require("cavity", "L_mm") * 1e-3,
            height=cfg.get("cavity", "height_mm", 0.0) * 1e-3 or None,
            mode_indices=cfg.get("cavity", "mode_indices", (1,), cast=int_list),
        )
    sample = None
    if cfg.section("sample"):
        material = MagnetMaterial(
            spin_density=cfg.get("sample", "spin_density_per_cm3", YIG_SPIN_DENSITY / 1e6) * 1e6,
            g_factor=cfg.get("sample", "g_factor", 2.0),
            M_s=cfg.get("sample", "M_s_A_per_m"),
        )
        sample = SphereSample(diameter=cfg.require("sample", "diameter_mm") * 1e-3, material=material)

    mode_sections = sorted(
        (int(name.split(".", 1)[1]), name) for name in cfg.sections if name.startswith("mode.")
    )
    if mode_sections:
        modes = [_mode_from(cfg, name, p) for p, name in mode_sections]
    elif "f_c_GHz" in cfg.section("cavity"):
        modes = [_mode_from(cfg, "cavity", cfg.get("cavity", "p", 1, cast=int))]
    else:
        raise ConfigurationError("no cavity mode configured ([cavity] f_c_GHz or [mode.N])")
    if sample is not None:
        modes = [m.with_sample(sample) for m in modes]

    qubit = None
    if cfg.section("qubit"):
        qubit = QubitParams(
            f_q=cfg.require("qubit", "f_q_GHz") * GHz,
            alpha=cfg.require("qubit", "alpha_MHz") * MHz,
            gamma_q=cfg.get("qubit", "gamma_q_MHz", 0.0) * MHz,
            levels=cfg.get("qubit", "levels", 3, cast=int),
        )
    f_m = cfg.get("magnon", "f_m_GHz")
    if f_m is None:
        f_m = cfg.get("magnon", "f_m0_GHz")
    if f_m is None:
        raise ConfigurationError("missing [magnon] f_m_GHz")
    magnon = MagnonMode(f_m=f_m * GHz, gamma_m=cfg.get("magnon", "gamma_m_MHz", 0.0) * MHz)
    return HybridSystem(
        modes=tuple(modes),
        magnon=magnon,
        qubit=qubit,
        sample=sample,
        geometry=geometry,
        readout_mode=cfg.get("cavity", "readout_mode", None, cast=int),
    )


def calibration_from_config(cfg, sys=None):
    f_m0 = cfg.get("magnon", "f_m0_GHz")
    if f_m0 is None:
        if sys is None:
            raise ConfigurationError("missing [magnon] f_m0_GHz")
        f_m0 = sys.magnon.f_m / GHz
    slope = cfg.require("magnon", "slope_MHz_per_mA")
    return CoilCalibration(f_m0=f_m0 * GHz, slope=slope * MHz / 1e-3)


def linewidth_params_from_config(cfg):
    return LinewidthModelParams(
        gamma_TLS=cfg.require("linewidth", "gamma_TLS_MHz") * MHz,
        gamma_0=cfg.require("linewidth", "gamma_0_MHz") * MHz,
    )


def lattice_from_config(cfg):
    return SpinLattice(
        extent=cfg.require("lattice", "extent", cast=int_list),
        J=cfg.require("lattice", "J_meV") * MEV,
        s=cfg.get("lattice", "s", 0.5),
        a0=cfg.get("lattice", "a0_nm", 1.0) * 1e-9,
        g_factor=cfg.get("lattice", "g_factor", 2.0),
        B_z=cfg.get("lattice", "B_z_T", 0.0),
        periodic=cfg.get("lattice", "periodic", True, cast=as_bool),
    )


def frequency_grid(cfg, center=None):
    start = cfg.get("sweep", "f_start_GHz")
    stop = cfg.get("sweep", "f_stop_GHz")
    n = cfg.get("sweep", "n_freq", 2001, cast=int)
    if start is None or stop is None:
        if center is None:
            raise ConfigurationError("missing [sweep] f_start_GHz / f_stop_GHz")
        span = cfg.get("sweep", "span_MHz", 300.0) * MHz
        return np.linspace(center - span / 2, center + span / 2, n)
    return np.linspace(start * GHz, stop * GHz, n)


def current_grid(cfg):
    return np.linspace(
        cfg.get("sweep", "I_start_mA", -4.0) * 1e-3,
        cfg.get("sweep", "I_stop_mA", 4.0) * 1e-3,
        cfg.get("sweep", "n_current", 33, cast=int),
    )


def temperature_grid(cfg):
    return np.linspace(
        cfg.get("sweep", "T_start_K", 0.01),
        cfg.get("sweep", "T_stop_K", 1.0),
        cfg.get("sweep", "n_temp", 8, cast=int),
    )
