"""Derivative analysis of measure-vs-lambda curves: critical-point estimates,
factorization-point detection and distance profiles."""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, FlatCurve, GridTooSmall, NonUniformGrid, NotFound
from .measures import MeasureKind, concurrence_branches, evaluate
from .xymodel import ModelParams, g_sequence, reduced_state

DEFAULT_WINDOW = (0.5, 1.5)
DEFAULT_STEP = 1e-3
FLAT_TOL = 1e-12
UNIFORM_TOL = 1e-12
DIVERGENCE_GROWTH = 1.05


@dataclass(frozen=True)
class MeasureCurve:
    gamma: float
    kT: float
    r: int
    measure: MeasureKind
    lambdas: np.ndarray
    values: np.ndarray
    order: int = 0

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if lam.shape != vals.shape or lam.ndim != 1:
            raise ValueError("lambdas and values must be 1-d arrays of equal length")
        if lam.size > 1 and np.any(np.diff(lam) <= 0):
            raise ValueError("lambda grid must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise ValueError("curve values must be finite")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "values", vals)

    @property
    def step(self):
        return float(self.lambdas[1] - self.lambdas[0])


@dataclass(frozen=True)
class CpEstimate:
    lambda_hat: float
    deriv_order: int
    extremum_value: float
    window: tuple
    curve: MeasureCurve = field(repr=False, compare=False, default=None)


def lambda_grid(lo, hi, step):
    """Uniform grid from lo to hi inclusive, built from integer multiples of step."""
    n = int(round((hi - lo) / step))
    if n < 0:
        raise DomainError(f"empty lambda range [{lo}, {hi}]")
    return lo + step * np.arange(n + 1)


def measure_curves(gamma, kT, r, measures, lambdas):
    """Evaluate several measures on shared reduced states; returns {kind: MeasureCurve}."""
    kinds = [MeasureKind(m) for m in measures]
    lambdas = np.asarray(lambdas, dtype=float)
    table = np.empty((len(kinds), lambdas.size))
    for n, lam in enumerate(lambdas):
        s = reduced_state(ModelParams(gamma, lam, kT), r)
        for m, kind in enumerate(kinds):
            table[m, n] = evaluate(kind, s)
    return {k: MeasureCurve(gamma, kT, r, k, lambdas, table[m]) for m, k in enumerate(kinds)}


def measure_curve(gamma, kT, r, measure, lambdas):
    kind = MeasureKind(measure)
    return measure_curves(gamma, kT, r, [kind], lambdas)[kind]


def numeric_derivative(c, order=1):
    """Second-order finite differences on a uniform grid, same grid out."""
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order}")
    lam, f = c.lambdas, c.values
    if lam.size < 5:
        raise GridTooSmall(f"need at least 5 grid points, got {lam.size}")
    steps = np.diff(lam)
    h = steps.mean()
    if np.max(np.abs(steps - h)) > UNIFORM_TOL * max(1.0, abs(lam).max()):
        raise NonUniformGrid(f"grid spacing varies by {np.ptp(steps):.3e}")
    d = np.empty_like(f)
    if order == 1:
        d[1:-1] = (f[2:] - f[:-2]) / (2 * h)
        d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
        d[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    else:
        d[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
        # one-sided stencils, second-order accurate
        d[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h**2
        d[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h**2
    return MeasureCurve(c.gamma, c.kT, c.r, c.measure, lam, d, c.order + order)


def _parabolic_peak(x, y, i):
    """Vertex of the parabola through samples i-1, i, i+1 (kept inside that bracket)."""
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2 * y1 + y2
    h = x[i + 1] - x[i]
    if denom == 0:
        return x[i], y1
    shift = 0.5 * (y0 - y2) / denom
    shift = float(np.clip(shift, -1.0, 1.0))
    return x[i] + shift * h, y1 - 0.25 * (y0 - y2) * shift


def locate_extremum(deriv, window):
    """Largest local maximum of |derivative| on the grid, parabolically refined.

    Only strict interior peaks qualify: a |derivative| that keeps growing into
    the window edge has no extremum inside the window.
    """
    a = np.abs(deriv.values)
    if a.max() < FLAT_TOL:
        raise FlatCurve(
            f"{deriv.measure.value} derivative below {FLAT_TOL:g} everywhere "
            f"(gamma={deriv.gamma}, kT={deriv.kT}, r={deriv.r})"
        )
    inner = a[1:-1]
    peaks = np.nonzero((inner >= a[:-2]) & (inner >= a[2:]) & ((inner > a[:-2]) | (inner > a[2:])))[0]
    if peaks.size == 0:
        raise NotFound(
            f"|d{deriv.measure.value}/dlambda| has no interior extremum in "
            f"[{deriv.lambdas[0]:.4g}, {deriv.lambdas[-1]:.4g}]"
        )
    i = 1 + int(peaks[np.argmax(inner[peaks])])
    lam_hat, peak = _parabolic_peak(deriv.lambdas, a, i)
    sign = np.sign(deriv.values[i]) or 1.0
    return CpEstimate(float(lam_hat), deriv.order, float(sign * peak), tuple(window), deriv)


@lru_cache(maxsize=256)
def select_order(gamma, r, measure, window=DEFAULT_WINDOW, step=DEFAULT_STEP):
    """Derivative order suited to a measure's ground-state behaviour.

    A first derivative that diverges at kT=0 turns into a finite peak at low
    temperature, so the first derivative is scanned. When it only jumps (or has
    a cusp) the peak shows up in the second derivative instead. Divergence is
    diagnosed from max|d1| of the kT=0 curve growing when the step is quartered.
    """
    peaks = []
    for h in (step, step / 4):
        c = measure_curve(gamma, 0.0, r, measure, lambda_grid(window[0], window[1], h))
        peaks.append(np.max(np.abs(numeric_derivative(c, 1).values)))
    return 1 if peaks[1] > DIVERGENCE_GROWTH * peaks[0] else 2


def estimate_cp(gamma, kT, r, measure, window=DEFAULT_WINDOW, step=DEFAULT_STEP, order=1,
                curve=None):
    """Critical-point estimate from the extremum of a measure's lambda-derivative.

    ``order`` is 1, 2 or "auto" (see ``select_order``). A precomputed ``curve``
    on the requested grid may be supplied to skip the model evaluations.
    """
    measure = measure if isinstance(measure, MeasureKind) else MeasureKind.parse(measure)
    if order == "auto":
        order = select_order(gamma, r, measure, tuple(window), step)
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1, 2 or 'auto', got {order!r}")
    if curve is None:
        curve = measure_curve(gamma, kT, r, measure, lambda_grid(window[0], window[1], step))
    return locate_extremum(numeric_derivative(curve, order), window)


def factorization_lambda(gamma):
    """Field strength of the factorized ground state, gamma^2 + 1/lambda^2 = 1."""
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"no finite non-trivial factorization point for gamma = {gamma}")
    return 1.0 / np.sqrt(1.0 - gamma**2)


@dataclass(frozen=True)
class FactorizationResult:
    expected: float
    concurrence_zero: float
    wysim_feature: float


def _branch_gap(gamma, r):
    def f(lam):
        a, b = concurrence_branches(reduced_state(ModelParams(gamma, lam, 0.0), r))
        return a - b

    return f


def _concurrence_zero(gamma, r, lambdas, target):
    # The two X-state concurrence branches exchange roles at the factorized
    # point, where both vanish: the concurrence touches zero without a sign change.
    f = _branch_gap(gamma, r)
    gap = np.array([f(lam) for lam in lambdas])
    flips = np.nonzero(np.sign(gap[:-1]) * np.sign(gap[1:]) < 0)[0]
    if flips.size == 0:
        raise NotFound(f"no concurrence zero in [{lambdas[0]:.4g}, {lambdas[-1]:.4g}]")
    k = flips[np.argmin(np.abs(lambdas[flips] - target))]
    return float(brentq(f, lambdas[k], lambdas[k + 1], xtol=1e-12))


def detect_factorization(gamma, kT=0.0, r=1, window=None, step=DEFAULT_STEP, cp_exclusion=0.02):
    """Locate the factorized ground state from concurrence and from WYSIM.

    Returns a FactorizationResult with the zero of the concurrence curve and
    the non-analytic point of WYSIM (extremum of its second lambda-derivative,
    where the first derivative jumps), both nearest the analytic line.
    """
    if kT != 0:
        raise DomainError("the factorized ground state is a kT = 0 property")
    target = factorization_lambda(gamma)
    if window is None:
        window = (0.5, max(3.0, 2 * target))
    lambdas = lambda_grid(window[0], window[1], step)
    if lambdas.size < 5:
        raise GridTooSmall("window too narrow for the requested step")
    c_zero = _concurrence_zero(gamma, r, lambdas, target)

    wy = measure_curve(gamma, 0.0, r, MeasureKind.WYSIM, lambdas)
    d2 = np.abs(numeric_derivative(wy, 2).values)
    interior = np.zeros(lambdas.size, dtype=bool)
    interior[2:-2] = True
    interior &= np.abs(lambdas - 1.0) > cp_exclusion
    peaks = np.nonzero(
        interior
        & (d2 >= np.roll(d2, 1))
        & (d2 >= np.roll(d2, -1))
        & (d2 > 10 * np.median(d2))
    )[0]
    if peaks.size == 0:
        raise NotFound(f"no WYSIM non-analyticity in [{window[0]}, {window[1]}]")
    i = peaks[np.argmin(np.abs(lambdas[peaks] - target))]
    w_feat, _ = _parabolic_peak(lambdas, d2, i)
    return FactorizationResult(target, c_zero, float(w_feat))


def long_range_profile(gamma, kT, lam, measures, r_max):
    """{kind: array of measure values at r = 1..r_max}."""
    if r_max < 2:
        raise DomainError(f"r_max must be >= 2, got {r_max}")
    p = ModelParams(gamma, lam, kT)
    kinds = [MeasureKind(m) for m in measures]
    g = g_sequence(p, r_max)
    out = {k: np.empty(r_max) for k in kinds}
    for r in range(1, r_max + 1):
        s = reduced_state(p, r, g)
        for k in kinds:
            out[k][r - 1] = evaluate(k, s)
    return out
