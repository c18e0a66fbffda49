"""Deterministic least-squares fitting with a Nelder-Mead simplex.

The search runs in scaled coordinates ``u`` with ``x = x0 + scale * u`` and
starts from the simplex ``{0, e_1, ..., e_n}``, so each parameter is first
perturbed by its own characteristic scale. No randomness is involved.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .errors import DegenerateFitError, InsufficientDataError, NonFiniteResidualError
from .magnetostatics import LinewidthModelParams, linewidth_vs_temperature
from .response import CoilCalibration, find_peaks, normal_modes, s21

XATOL = 1e-10
MAX_ITER = 5000
MAX_RESTARTS = 20
LINEWIDTH_T_MAX = 1.0


@dataclass
class FitProblem:
    residual: object
    x0: np.ndarray
    scale: np.ndarray = None
    bounds: list = None
    names: tuple = None

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        n = len(self.x0)
        if self.scale is None:
            self.scale = np.where(self.x0 != 0, np.abs(self.x0) * 0.1, 1.0)
        self.scale = np.asarray(self.scale, dtype=float)
        if self.scale.shape != (n,) or np.any(~(self.scale > 0)):
            raise ValueError("scale must hold one positive entry per parameter")
        if self.bounds is not None:
            lo, hi = np.asarray(self.bounds, dtype=float).T
            if np.any(self.x0 < lo) or np.any(self.x0 > hi):
                raise ValueError("initial guess outside bounds")
        if self.names is None:
            self.names = tuple(f"p{i}" for i in range(n))


@dataclass
class FitResult:
    parameters: np.ndarray
    names: tuple
    residual_norm: float
    iterations: int
    converged: bool
    jacobian_condition: float
    uncertainty: np.ndarray
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.parameters[self.names.index(name)]

    def sigma(self, name):
        return self.uncertainty[self.names.index(name)]

    def as_dict(self):
        return dict(zip(self.names, self.parameters))

    def table(self, units=None):
        """Rows of (name, value, uncertainty proxy, unit)."""
        units = units or {}
        return [
            (n, float(v), float(s), units.get(n, ""))
            for n, v, s in zip(self.names, self.parameters, self.uncertainty)
        ]


def _uncertainty(residual, x, scale, n_data, cost, rcond=1e-12):
    """Gauss-Newton curvature at the optimum, from a central-difference Jacobian.

    Returns (sigma, condition). Directions without curvature get sigma = inf.
    This is a proxy, not a rigorous covariance.
    """
    n = len(x)
    h = 1e-6
    jac = np.empty((n_data, n))
    for i in range(n):
        step = np.zeros(n)
        step[i] = h * scale[i]
        jac[:, i] = (residual(x + step) - residual(x - step)) / (2 * h)
    dof = n_data - n
    s2 = cost / dof if dof > 0 else math.nan
    lam, vecs = np.linalg.eigh(jac.T @ jac)
    lam_max = lam.max() if lam.size else 0.0
    good = lam > rcond * lam_max if lam_max > 0 else np.zeros_like(lam, dtype=bool)
    inv = np.where(good, 1 / np.where(good, lam, 1.0), np.inf)
    weights = vecs**2
    with np.errstate(invalid="ignore"):
        var_u = np.where(weights > 1e-24, weights * inv, 0.0).sum(axis=1)
        sigma = np.sqrt(s2 * var_u) * scale
    sigma = np.where(np.isnan(sigma) & np.isinf(var_u), np.inf, sigma)
    sv = np.linalg.svd(jac, compute_uv=False)
    cond = sv[0] / sv[-1] if sv.size and sv[-1] > 0 else math.inf
    return sigma, float(cond)


def minimize(problem, xatol=XATOL, max_iter=MAX_ITER, max_restarts=MAX_RESTARTS):
    """Minimize the squared residual norm of ``problem``.

    Restarts the simplex from the best point until a restart no longer
    improves the cost, bounded by ``max_iter`` iterations in total. Hitting
    the cap yields ``converged=False`` rather than an error.
    """
    x0, scale = problem.x0, problem.scale
    n = len(x0)

    def to_x(u):
        return x0 + scale * u

    r0 = np.asarray(problem.residual(x0), dtype=float)
    if not np.all(np.isfinite(r0)):
        raise ValueError("residual is not finite at the initial guess")
    n_data = r0.size

    def cost(u):
        x = to_x(u)
        r = np.asarray(problem.residual(x), dtype=float)
        if not np.all(np.isfinite(r)):
            raise NonFiniteResidualError(f"non-finite residual at {x!r}", point=x)
        return float(r @ r)

    bounds_u = None
    if problem.bounds is not None:
        lo, hi = np.asarray(problem.bounds, dtype=float).T
        bounds_u = list(zip((lo - x0) / scale, (hi - x0) / scale))

    def simplex(center):
        sim = np.tile(center, (n + 1, 1))
        for i in range(n):
            sim[i + 1, i] += 1.0
            if bounds_u is not None and sim[i + 1, i] > bounds_u[i][1]:
                sim[i + 1, i] = center[i] - 1.0
        return sim

    u = np.zeros(n)
    best = cost(u)
    fatol = 1e-15 * max(best, np.finfo(float).tiny)
    iterations = 0
    converged = False
    for _ in range(max_restarts + 1):
        remaining = max_iter - iterations
        if remaining <= 0:
            break
        res = _scipy_minimize(
            cost,
            u,
            method="Nelder-Mead",
            bounds=bounds_u,
            options={
                "initial_simplex": simplex(u),
                "xatol": xatol,
                "fatol": fatol,
                "maxiter": remaining,
                "maxfev": 50 * remaining,
            },
        )
        iterations += res.nit
        improved = best - res.fun > 1e-12 * max(best, np.finfo(float).tiny)
        step = np.max(np.abs(res.x - u))
        if res.fun <= best:
            u, best = res.x, float(res.fun)
        if res.status == 0 and (not improved or step <= xatol):
            converged = True
            break

    x = to_x(u)
    sigma, cond = _uncertainty(problem.residual, x, scale, n_data, best)
    return FitResult(
        parameters=x,
        names=tuple(problem.names),
        residual_norm=math.sqrt(best),
        iterations=iterations,
        converged=converged,
        jacobian_condition=cond,
        uncertainty=sigma,
    )


# -- S21 ---------------------------------------------------------------------

S21_UNITS = dict.fromkeys(
    ["f_c", "f_m", "g_m", "kappa_in", "kappa_out", "kappa_int", "gamma_m"], "Hz"
)


def _resolve_part(values, part):
    if part == "auto":
        return "real" if np.all(values.imag == 0) else "complex"
    if part not in ("complex", "real", "magnitude"):
        raise ValueError(f"unknown fit quantity {part!r}")
    return part


def fit_s21(data, guess, symmetric_ports=True, part="auto", **options):
    """Fit the cavity-magnon transmission model to a measured spectrum.

    ``guess`` maps f_c, f_m, g_m, kappa_in, kappa_out, kappa_int, gamma_m to
    starting values (Hz). With ``symmetric_ports`` the two port rates are
    tied together. ``part`` selects complex, real-part or magnitude residuals;
    ``auto`` fits the real part when the data carry no imaginary part.
    """
    f = data.frequencies
    values = data.values
    part = _resolve_part(values, part)
    names = ["f_c", "f_m", "g_m", "kappa_in"]
    if not symmetric_ports:
        names.append("kappa_out")
    names += ["kappa_int", "gamma_m"]

    def unpack(x):
        p = dict(zip(names, x))
        if symmetric_ports:
            p["kappa_out"] = p["kappa_in"]
        return p

    def model(x):
        p = unpack(x)
        return s21(f, p["f_c"], p["f_m"], p["g_m"], p["kappa_in"], p["kappa_out"],
                   p["kappa_int"], p["gamma_m"])

    def residual(x):
        diff = model(x) - values
        if part == "complex":
            return np.concatenate([diff.real, diff.imag])
        if part == "real":
            return diff.real
        return np.abs(model(x)) - np.abs(values)

    g = dict(guess)
    if symmetric_ports:
        g["kappa_in"] = 0.5 * (g["kappa_in"] + g.get("kappa_out", g["kappa_in"]))
    x0 = np.array([g[n] for n in names], dtype=float)
    if not np.any(np.abs(model(x0)) > 0):
        raise DegenerateFitError("model is identically zero for the initial guess")

    width = g["kappa_in"] * (1 if symmetric_ports else 0) + g.get("kappa_out", 0) + g["kappa_int"]
    width = max(width, g["gamma_m"], 1e-6 * abs(g["f_c"]))
    span = max(abs(g["g_m"]), width)
    scale_of = {"f_c": 0.1 * span, "f_m": 0.1 * span, "g_m": 0.1 * span}
    for n in ("kappa_in", "kappa_out", "kappa_int", "gamma_m"):
        scale_of[n] = 0.5 * max(abs(g.get(n, 0.0)), 0.1 * width)
    scale = np.array([scale_of[n] for n in names])
    bounds = [
        (-np.inf, np.inf) if n in ("f_c", "f_m") else (0.0, np.inf) for n in names
    ]
    problem = FitProblem(residual, x0, scale=scale, bounds=bounds, names=tuple(names))
    result = minimize(problem, **options)
    result.meta["quantity"] = part
    result.meta["symmetric_ports"] = symmetric_ports
    p = unpack(result.parameters)
    result.meta["kappa_total"] = p["kappa_in"] + p["kappa_out"] + p["kappa_int"]
    return result


# -- linewidth versus temperature ----------------------------------------------


def fit_linewidth_temperature(T, gamma, f_m, **options):
    """Fit gamma_TLS tanh(h f_m / 2 k_B T) + gamma_0 with ``f_m`` held fixed."""
    T = np.asarray(T, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if T.shape != gamma.shape or T.ndim != 1:
        raise ValueError("temperatures and linewidths must be 1D arrays of equal length")
    if len(T) < 3:
        raise InsufficientDataError(f"need at least 3 temperature points, got {len(T)}")
    if np.any(T > LINEWIDTH_T_MAX):
        warnings.warn(
            f"points above {LINEWIDTH_T_MAX} K are outside the TLS model's range",
            stacklevel=2,
        )

    def residual(x):
        return linewidth_vs_temperature(T, f_m, LinewidthModelParams(*np.maximum(x, 0))) - gamma

    basis = np.stack([linewidth_vs_temperature(T, f_m, LinewidthModelParams(1.0, 0.0)),
                      np.ones_like(T)], axis=1)
    start, *_ = np.linalg.lstsq(basis, gamma, rcond=None)
    start = np.maximum(start, 0.0)
    level = max(float(np.max(np.abs(gamma))), np.finfo(float).tiny)
    scale = np.maximum(0.1 * start, 0.01 * level)
    problem = FitProblem(
        residual, start, scale=scale, bounds=[(0, np.inf), (0, np.inf)],
        names=("gamma_TLS", "gamma_0"),
    )
    result = minimize(problem, **options)
    result.meta["params"] = LinewidthModelParams(*result.parameters)
    result.meta["f_m"] = f_m
    return result


# -- anticrossing peak positions -------------------------------------------------


def normal_mode_branches(f_c, kappa_total, f_m, gamma_m, g_m):
    """Real parts of :func:`normal_modes` for an array of Kittel frequencies, shape (n, 2)."""
    f_m = np.asarray(f_m, dtype=float)
    a = f_c - 0.5j * kappa_total
    d = f_m - 1j * gamma_m
    root = np.sqrt(((a - d) / 2) ** 2 + g_m**2)
    mean = (a + d) / 2
    return np.sort(np.stack([(mean - root).real, (mean + root).real], axis=-1), axis=-1)


def extract_peaks(spectra, quantity="magnitude", threshold=0.05, max_peaks=2):
    """(current, peak frequencies) for each spectrum of a sweep.

    Only the ``max_peaks`` highest maxima are kept, which discards noise
    ripple once the two hybridized branches are found.
    """
    out = []
    for spec in spectra:
        y = np.abs(spec.values) if quantity == "magnitude" else spec.values.real
        pos, heights = find_peaks(spec.frequencies, y, threshold)
        if max_peaks is not None and len(pos) > max_peaks:
            pos = np.sort(pos[np.argsort(heights)[-max_peaks:]])
        out.append((spec.meta.get("current_A"), pos))
    return out


def fit_anticrossing(peaks, guess, **options):
    """Fit peak positions versus coil current to the normal-mode frequencies.

    ``peaks`` is a list of (current, peak frequencies). ``guess`` holds f_c,
    f_m0, slope and g_m; optional kappa_total and gamma_m are held fixed.
    Each observed peak is compared with the nearest normal-mode frequency.
    """
    rows = [(float(i), np.atleast_1d(np.asarray(p, dtype=float))) for i, p in peaks]
    rows = [(i, p) for i, p in rows if p.size]
    if not rows:
        raise InsufficientDataError("no peaks to fit")
    kappa = guess.get("kappa_total", 0.0)
    gamma_m = guess.get("gamma_m", 0.0)
    currents = np.array([i for i, _ in rows])
    peak_current = np.concatenate([np.full(p.size, i) for i, p in rows])
    peak_freq = np.concatenate([p for _, p in rows])
    names = ("f_c", "f_m0", "slope", "g_m")

    def residual(x):
        f_c, f_m0, slope, g_m = x
        branches = normal_mode_branches(f_c, kappa, f_m0 + slope * peak_current, gamma_m, abs(g_m))
        return np.min(np.abs(peak_freq[:, None] - branches), axis=1)

    x0 = np.array([guess[n] for n in names], dtype=float)
    freq_scale = max(abs(guess["g_m"]), kappa, gamma_m, 1e-6 * abs(guess["f_c"]))
    span = np.ptp(currents) if currents.size > 1 else 1.0
    slope_scale = max(abs(guess["slope"]), freq_scale / span) * 0.5

    def run(start):
        problem = FitProblem(
            residual,
            start,
            scale=np.array([0.1 * freq_scale, 0.1 * freq_scale, slope_scale, 0.1 * freq_scale]),
            names=names,
        )
        return minimize(problem, **options)

    # the slope sign is identifiable from data; try both signs of the guess
    flipped = x0.copy()
    flipped[2] = -flipped[2]
    candidates = [run(x0), run(flipped)]
    result = min(candidates, key=lambda r: r.residual_norm)
    result.parameters[3] = abs(result.parameters[3])
    f_c, f_m0, slope, g_m = result.parameters
    result.meta["f_c"] = f_c
    result.meta["g_m"] = g_m
    result.meta["warnings"] = []
    if slope != 0:
        result.meta["calibration"] = CoilCalibration(f_m0, slope)
        crossing = (f_c - f_m0) / slope
        if not currents.min() < crossing < currents.max():
            result.meta["warnings"].append(
                "peak data lie on one side of the crossing; fit is ill-conditioned"
            )
    return result
