import csv
import io

import numpy as np
import pytest

from magnonqed.cli import EXIT_INVALID, EXIT_OK, EXIT_USAGE, run
from magnonqed.dataio import load_spectrum_csv, load_sweep_csv

from test_dataio import CONFIGS

CAVITY = str(CONFIGS / "magnon_cavity.ini")
QUBIT = str(CONFIGS / "qubit_magnon.ini")
CHAIN = str(CONFIGS / "spin_chain.ini")


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def table(text):
    return [line.split() for line in text.splitlines() if line and not line.startswith("#")]


def test_usage_errors():
    assert call()[0] == EXIT_USAGE
    assert call("bogus")[0] == EXIT_USAGE
    assert call("fit", "s21")[0] == EXIT_USAGE
    assert call("synth", "--config", CAVITY)[0] == EXIT_USAGE
    assert call("report", "--set", "novalue", "--config", QUBIT)[0] == EXIT_USAGE


def test_validation_errors():
    assert call("report", "--config", "/nonexistent.ini")[0] == EXIT_INVALID
    code, _, err = call("report", "--config", QUBIT, "--set", "qubit.alpha_MHz=100")
    assert code == EXIT_INVALID
    assert "anharmonicity" in err
    assert call("fit", "s21", "--config", CAVITY, "--data", "/missing.csv")[0] == EXIT_INVALID


def test_report_values():
    code, out, err = call("report", "--config", QUBIT)
    assert code == EXIT_OK
    rows = {(r[0], r[1], r[2]): float(r[3]) for r in csv.reader(out.splitlines()[1:])}
    assert rows[("g_qm", "", "")] == pytest.approx(13.426e6, rel=1e-4)
    assert rows[("chi", "2", "")] == pytest.approx(74.803e6, rel=1e-4)
    assert rows[("lamb_shift", "3", "1")] == rows[("chi", "3", "")]
    assert "perturbative" in err


def test_modes_lists_ideal_and_measured():
    code, out, _ = call("modes", "--config", QUBIT)
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "p,f_ideal_Hz,f_measured_Hz,relative_difference"
    assert len(lines) == 4
    ideal = float(lines[3].split(",")[1])
    assert ideal == pytest.approx(10.389e9, rel=1e-3)


def test_dispersion_command():
    code, out, _ = call("dispersion", "--config", CHAIN)
    assert code == EXIT_OK
    assert len(out.strip().splitlines()) == 9


def test_s21_to_file(tmp_path):
    path = tmp_path / "s21.csv"
    code, out, _ = call("s21", "--config", CAVITY, "--out", str(path))
    assert code == EXIT_OK and out == ""
    spec = load_spectrum_csv(str(path))
    assert len(spec) == 2001
    assert np.max(np.abs(spec.values)) <= 1


def test_anticross_and_qubit_spectrum_are_long_format(tmp_path):
    path = tmp_path / "ac.csv"
    call("anticross", "--config", CAVITY, "--out", str(path), "--set", "sweep.n_freq=101")
    assert len(load_sweep_csv(str(path))) == 33
    path = tmp_path / "qs.csv"
    assert call("qubit-spec", "--config", QUBIT, "--out", str(path))[0] == EXIT_OK
    assert len(load_sweep_csv(str(path))) == 25


def test_synth_is_deterministic_and_seeded():
    a = call("synth", "s21", "--config", CAVITY)[1]
    b = call("synth", "s21", "--config", CAVITY)[1]
    c = call("synth", "s21", "--config", CAVITY, "--seed", "1")[1]
    assert a == b
    assert a != c


@pytest.mark.parametrize("kind", ["s21", "linewidth", "anticross"])
def test_synth_then_fit_round_trip(tmp_path, kind):
    data = tmp_path / f"{kind}.csv"
    assert call("synth", kind, "--config", CAVITY, "--out", str(data))[0] == EXIT_OK
    code, out, _ = call("fit", kind, "--config", CAVITY, "--data", str(data), "--format", "text")
    assert code == EXIT_OK
    values = {r[0]: float(r[1]) for r in table(out)[1:]}
    if kind == "linewidth":
        assert values["gamma_TLS"] == pytest.approx(0.63e6, rel=0.15)
    else:
        assert values["g_m"] == pytest.approx(47e6, rel=0.02)
    assert "converged=True" in out


def test_linewidth_command():
    code, out, _ = call("linewidth", "--config", CAVITY)
    assert code == EXIT_OK
    rows = out.strip().splitlines()[1:]
    gam = [float(r.split(",")[1]) for r in rows]
    assert gam == sorted(gam, reverse=True)


def test_non_convergence_exit_code(tmp_path):
    data = tmp_path / "s21.csv"
    call("synth", "s21", "--config", CAVITY, "--out", str(data))
    from magnonqed import cli

    original = cli.fit_s21
    cli.fit_s21 = lambda *a, **k: original(*a, max_iter=3, **k)
    try:
        code = call("fit", "s21", "--config", CAVITY, "--data", str(data))[0]
    finally:
        cli.fit_s21 = original
    assert code == 2
