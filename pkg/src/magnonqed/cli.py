"""Command-line entry point.

Exit codes: 0 success, 1 validation/configuration error, 2 fit did not
converge, 64 usage error.
"""

import argparse
import os
import sys
import warnings

import numpy as np

from . import dataio
from .dispersive import dispersive_report
from .errors import MagnonQEDError
from .fit import (
    S21_UNITS,
    extract_peaks,
    fit_anticrossing,
    fit_linewidth_temperature,
    fit_s21,
)
from .hybrid import CavityGeometry, te10p_frequency, validate_system
from .magnetostatics import linewidth_vs_temperature
from .response import Spectrum, anticrossing_sweep, qubit_spectrum_sweep, s21_system
from .spinwave import brillouin_zone, dispersion, structure_factor
from .synth import synth_anticrossing, synth_linewidth, synth_s21
from .units import GHz, MHz

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2
EXIT_USAGE = 64

COMMANDS = ("dispersion", "modes", "s21", "anticross", "qubit-spec", "report",
            "linewidth", "fit", "synth")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--out", metavar="PATH", help="output file (stdout if omitted)")
    common.add_argument("--format", choices=("csv", "text"))
    common.add_argument("--seed", type=int)
    common.add_argument(
        "--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
        help="override a config value, e.g. --set qubit.f_q_GHz=8.3",
    )
    parser = _Parser(prog="magnonqed", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.add_parser("dispersion", parents=[common], help="spin-wave dispersion on the Brillouin-zone grid")
    sub.add_parser("modes", parents=[common], help="TE10p frequencies of the box cavity")
    sub.add_parser("s21", parents=[common], help="single transmission spectrum")
    sub.add_parser("anticross", parents=[common], help="transmission versus frequency and coil current")
    sub.add_parser("qubit-spec", parents=[common], help="qubit-excitation spectra versus coil current")
    sub.add_parser("report", parents=[common], help="dispersive shifts and couplings")
    sub.add_parser("linewidth", parents=[common], help="Kittel linewidth versus temperature")
    fit = sub.add_parser("fit", parents=[common], help="fit measured or synthetic data")
    fit.add_argument("target", choices=("s21", "linewidth", "anticross"))
    fit.add_argument("--data", required=True, metavar="PATH")
    synth = sub.add_parser("synth", parents=[common], help="seeded synthetic data")
    synth.add_argument("kind", nargs="?", choices=("s21", "linewidth", "anticross"))
    synth.add_argument("--noise", type=float)
    return parser


# -- commands ------------------------------------------------------------------------


def cmd_dispersion(cfg, args):
    lat = dataio.lattice_from_config(cfg)
    ks = brillouin_zone(lat)
    header = [f"k{i}_per_m" for i in range(lat.dimensionality)] + ["gamma_k", "frequency_Hz"]
    rows = [list(k) + [float(structure_factor(k, lat)), float(dispersion(k, lat))] for k in ks]
    return header, rows, []


def cmd_modes(cfg, args):
    system = None
    try:
        system = dataio.system_from_config(cfg)
    except MagnonQEDError:
        pass
    if system is not None and system.geometry is not None:
        geom = system.geometry
    else:
        geom = CavityGeometry(
            width=cfg.require("cavity", "W_mm") * 1e-3,
            length=cfg.require("cavity", "L_mm") * 1e-3,
            mode_indices=cfg.get("cavity", "mode_indices", (1, 2, 3), cast=dataio.int_list),
        )
    measured = {m.p: m.f_c for m in system.modes} if system is not None else {}
    rows = []
    for p in geom.mode_indices:
        f = te10p_frequency(geom, p)
        f_meas = measured.get(p, float("nan"))
        rows.append([p, f, f_meas, (f - f_meas) / f_meas])
    return ["p", "f_ideal_Hz", "f_measured_Hz", "relative_difference"], rows, []


def cmd_s21(cfg, args):
    system = dataio.system_from_config(cfg)
    p = cfg.get("sweep", "p", None, cast=int)
    mode = system.modes[0] if p is None else system.mode(p)
    f = dataio.frequency_grid(cfg, center=mode.f_c)
    header, rows = dataio.spectra_rows([Spectrum(f, s21_system(f, system, p))])
    return header, rows, []


def cmd_anticross(cfg, args):
    system = dataio.system_from_config(cfg)
    cal = dataio.calibration_from_config(cfg, system)
    p = cfg.get("sweep", "p", None, cast=int)
    mode = system.modes[0] if p is None else system.mode(p)
    spectra = anticrossing_sweep(
        dataio.frequency_grid(cfg, center=mode.f_c), dataio.current_grid(cfg), system, cal, p
    )
    header, rows = dataio.spectra_rows(spectra)
    return header, rows, []


def cmd_qubit_spec(cfg, args):
    system = dataio.system_from_config(cfg)
    cal = dataio.calibration_from_config(cfg, system)
    g_qm = cfg.get("magnon", "g_qm_MHz")
    f_q = cfg.get("qubit", "f_q_dressed_GHz")
    rep = dispersive_report(system)
    center = f_q * GHz if f_q is not None else rep.dressed_qubit_frequency
    spectra = qubit_spectrum_sweep(
        dataio.frequency_grid(cfg, center=center),
        dataio.current_grid(cfg),
        system,
        cal,
        g_qm=None if g_qm is None else g_qm * MHz,
        f_q=None if f_q is None else f_q * GHz,
    )
    header, rows = dataio.spectra_rows(spectra)
    return header, rows, []


def cmd_report(cfg, args):
    system = dataio.system_from_config(cfg)
    check = validate_system(system)
    if not check.ok:
        raise MagnonQEDError("invalid system: " + "; ".join(check.violations))
    rep = dispersive_report(system)
    return ["quantity", "mode", "level", "value", "unit"], rep.rows(), check.warnings


def cmd_linewidth(cfg, args):
    params = dataio.linewidth_params_from_config(cfg)
    f_m = cfg.require("linewidth", "f_m_GHz") * GHz
    T = dataio.temperature_grid(cfg)
    gamma = linewidth_vs_temperature(T, f_m, params)
    return ["temperature_K", "gamma_m_Hz"], [[t, g] for t, g in zip(T, gamma)], []


def _s21_guess(cfg, system):
    mode = system.modes[0]
    fit = lambda key, default: cfg.get("fit", key, default)  # noqa: E731
    return {
        "f_c": fit("guess_f_c_GHz", mode.f_c / GHz) * GHz,
        "f_m": fit("guess_f_m_GHz", system.magnon.f_m / GHz) * GHz,
        "g_m": fit("guess_g_m_MHz", mode.g_m / MHz) * MHz,
        "kappa_in": fit("guess_kappa_in_MHz", mode.kappa_in / MHz) * MHz,
        "kappa_out": fit("guess_kappa_out_MHz", mode.kappa_out / MHz) * MHz,
        "kappa_int": fit("guess_kappa_int_MHz", mode.kappa_int / MHz) * MHz,
        "gamma_m": fit("guess_gamma_m_MHz", system.magnon.gamma_m / MHz) * MHz,
    }


def cmd_fit(cfg, args):
    notes = []
    if args.target == "s21":
        data = dataio.load_spectrum_csv(args.data)
        system = dataio.system_from_config(cfg)
        result = fit_s21(
            data,
            _s21_guess(cfg, system),
            symmetric_ports=cfg.get("fit", "symmetric_ports", True, cast=dataio.as_bool),
            part=cfg.get("fit", "quantity", "auto", cast=str),
        )
        rows = result.table(S21_UNITS)
        rows.append(("kappa_total", result.meta["kappa_total"], float("nan"), "Hz"))
        notes.append(f"fitted quantity: {result.meta['quantity']}")
    elif args.target == "linewidth":
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            pairs = dataio.load_linewidth_csv(args.data)
            T, gamma = np.array(pairs).T
            f_m = cfg.require("linewidth", "f_m_GHz") * GHz
            result = fit_linewidth_temperature(T, gamma, f_m)
        notes += [str(w.message) for w in caught]
        rows = result.table({"gamma_TLS": "Hz", "gamma_0": "Hz"})
    else:
        spectra = dataio.load_sweep_csv(args.data)
        system = dataio.system_from_config(cfg)
        cal = dataio.calibration_from_config(cfg, system)
        mode = system.modes[0]
        guess = {
            "f_c": cfg.get("fit", "guess_f_c_GHz", mode.f_c / GHz) * GHz,
            "f_m0": cfg.get("fit", "guess_f_m0_GHz", cal.f_m0 / GHz) * GHz,
            "slope": cfg.get("fit", "guess_slope_MHz_per_mA", cal.slope * 1e-3 / MHz) * MHz / 1e-3,
            "g_m": cfg.get("fit", "guess_g_m_MHz", mode.g_m / MHz) * MHz,
            "kappa_total": mode.kappa_total,
            "gamma_m": system.magnon.gamma_m,
        }
        result = fit_anticrossing(extract_peaks(spectra), guess)
        rows = result.table({"f_c": "Hz", "f_m0": "Hz", "slope": "Hz/A", "g_m": "Hz"})
        notes += result.meta["warnings"]
    notes.append(
        f"converged={result.converged} iterations={result.iterations} "
        f"residual_norm={result.residual_norm:.6g}"
    )
    args._converged = result.converged
    return ["name", "value", "uncertainty", "unit"], rows, notes


def cmd_synth(cfg, args):
    kind = args.kind or cfg.get("synth", "kind", None, cast=str)
    if kind is None:
        raise UsageError("synth needs a kind: s21, linewidth or anticross")
    noise = args.noise if args.noise is not None else cfg.get("synth", "noise", 0.0)
    if kind == "linewidth":
        params = dataio.linewidth_params_from_config(cfg)
        f_m = cfg.require("linewidth", "f_m_GHz") * GHz
        T = dataio.temperature_grid(cfg)
        gamma = synth_linewidth(T, f_m, params, noise, cfg.seed)
        return ["temperature_K", "gamma_m_Hz"], [[t, g] for t, g in zip(T, gamma)], []
    system = dataio.system_from_config(cfg)
    mode = system.modes[0]
    f = dataio.frequency_grid(cfg, center=mode.f_c)
    if kind == "s21":
        params = dict(
            f_c=mode.f_c, f_m=system.magnon.f_m, g_m=mode.g_m, kappa_in=mode.kappa_in,
            kappa_out=mode.kappa_out, kappa_int=mode.kappa_int, gamma_m=system.magnon.gamma_m,
        )
        spectra = [synth_s21(f, params, noise, cfg.seed)]
    else:
        cal = dataio.calibration_from_config(cfg, system)
        spectra = synth_anticrossing(f, dataio.current_grid(cfg), system, cal, noise, cfg.seed)
    header, rows = dataio.spectra_rows(spectra)
    return header, rows, []


HANDLERS = {
    "dispersion": cmd_dispersion,
    "modes": cmd_modes,
    "s21": cmd_s21,
    "anticross": cmd_anticross,
    "qubit-spec": cmd_qubit_spec,
    "report": cmd_report,
    "linewidth": cmd_linewidth,
    "fit": cmd_fit,
    "synth": cmd_synth,
}


def render_text(header, rows, notes):
    cells = [[dataio.format_value(v) for v in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in cells]
    lines += [f"# {n}" for n in notes]
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None, stderr=None):
    """Parse ``argv``, execute one command and return the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage() + "magnonqed: error: missing command")
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    try:
        cfg = dataio.load_config(args.config)
        for item in args.set:
            key, sep, value = item.partition("=")
            if not sep:
                raise UsageError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
            cfg.set(key.strip(), value.strip())
        if args.seed is not None:
            cfg.seed = args.seed
        fmt = args.format or cfg.format
        out = args.out or cfg.output
        if getattr(args, "data", None) is not None:
            if not os.path.exists(args.data):
                raise MagnonQEDError(f"data file {args.data} does not exist")
        header, rows, notes = HANDLERS[args.command](cfg, args)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except (MagnonQEDError, ValueError, KeyError) as exc:
        stderr.write(f"magnonqed: error: {exc}\n")
        return EXIT_INVALID

    if fmt == "text":
        text = render_text(header, rows, notes)
    else:
        text = dataio.csv_text(header, rows)
        for n in notes:
            stderr.write(f"# {n}\n")
    if out:
        dataio.atomic_write(out, text)
    else:
        stdout.write(text)
    if getattr(args, "_converged", True) is False:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))
