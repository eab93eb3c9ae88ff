"""
Zero-noise extrapolation and noise-informed fits.

Noise-agnostic ZNE fits (eta, B_est) ensembles and reads the curve at
eta = 0. Noise-informed fits work on raw (m, p_hat) or (t_j, p_hat) data and
fit the closed-form p1 with the damping rate as a second free parameter.
Solver failures never raise: they come back as ``converged=False``.
"""

from dataclasses import dataclass, field
import logging
import math

from django.conf import settings
from django.db import models
import numpy as np
from scipy.interpolate import BarycentricInterpolator
from scipy.optimize import least_squares

from .analytic import p1_local_ad, p1_local_pd
from .channels import NoiseKind
from .circuits import Detection

logger = logging.getLogger(__name__)

# Relative singular-value floor below which a fit Jacobian counts as rank deficient
DEGENERACY_THRESHOLD = 1e-8


class FitKind(models.TextChoices):
    LINEAR = 'linear', 'Linear'
    RICHARDSON = 'richardson', 'Richardson'
    EXPONENTIAL = 'exponential', 'Exponential'
    INFORMED_PD = 'informed_pd', 'Noise-informed (phase damping)'
    INFORMED_AD = 'informed_ad', 'Noise-informed (amplitude damping)'
    RAMSEY_FRINGE_PD = 'ramsey_fringe_pd', 'Ramsey fringe (phase damping)'
    RAMSEY_FRINGE_AD = 'ramsey_fringe_ad', 'Ramsey fringe (amplitude damping)'


EXTRAPOLATION_KINDS = (FitKind.LINEAR, FitKind.RICHARDSON, FitKind.EXPONENTIAL)
INFORMED_FITS = {
    NoiseKind.PHASE_DAMPING: FitKind.INFORMED_PD,
    NoiseKind.AMPLITUDE_DAMPING: FitKind.INFORMED_AD,
}
FRINGE_FITS = {
    NoiseKind.PHASE_DAMPING: FitKind.RAMSEY_FRINGE_PD,
    NoiseKind.AMPLITUDE_DAMPING: FitKind.RAMSEY_FRINGE_AD,
}


@dataclass(frozen=True)
class FitResult:
    value_at_zero: float
    params: dict = field(default_factory=dict)
    converged: bool = True
    residual_norm: float = 0.0
    degenerate: bool = False


def _as_xy(points, minimum):
    points = list(points)
    if len(points) < minimum:
        raise ValueError(f"Need at least {minimum} points, got {len(points)}")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    return x, y


def _require_distinct(x):
    if len(np.unique(x)) != len(x):
        raise ValueError(f"Abscissae must be distinct, got {x.tolist()}")


def fit_linear(points):
    """Least-squares line; value at x = 0 is the intercept."""
    x, y = _as_xy(points, 2)
    _require_distinct(x)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (intercept + slope * x)
    return FitResult(
        value_at_zero=float(intercept),
        params={'intercept': float(intercept), 'slope': float(slope)},
        residual_norm=float(np.linalg.norm(residual)),
    )


def fit_richardson(points):
    """Interpolating polynomial of degree len(points) - 1, evaluated at 0."""
    x, y = _as_xy(points, 2)
    _require_distinct(x)
    value = float(BarycentricInterpolator(x, y)(0.0))
    return FitResult(value_at_zero=value, params={'degree': float(len(x) - 1)})


def _exponential_guess(x, y, rate_bound):
    """Exact three-point solve when the abscissae are equally spaced."""
    fallback = np.array([y[-1], y[0] - y[-1], 0.1])
    if len(x) != 3:
        return fallback
    step = x[1] - x[0]
    if not math.isclose(x[2] - x[1], step) or y[1] == y[0]:
        return fallback
    ratio = (y[2] - y[1]) / (y[1] - y[0])
    if ratio <= 0 or ratio == 1:
        return fallback
    c = min(max(-math.log(ratio) / step, -rate_bound), rate_bound)
    denominator = math.exp(-c * x[1]) - math.exp(-c * x[0])
    if denominator == 0:
        return fallback
    b = (y[1] - y[0]) / denominator
    a = y[0] - b * math.exp(-c * x[0])
    return np.array([a, b, c])


def fit_exponential(points, init=None):
    """
    Fit y = a + b exp(-c x) and return a + b.

    ``c`` is box-bounded to +/- ZNE_EXPONENTIAL_RATE_BOUND. When the solver
    fails or produces a non-finite value the linear intercept is returned with
    ``converged=False``.
    """
    x, y = _as_xy(points, 3)
    bound = settings.ZNE_EXPONENTIAL_RATE_BOUND
    guess = np.array(init, dtype=float) if init is not None else _exponential_guess(x, y, bound)
    guess[2] = min(max(guess[2], -bound), bound)

    def residual(params):
        a, b, c = params
        return a + b * np.exp(-c * x) - y

    try:
        res = least_squares(
            residual,
            guess,
            method='trf',
            bounds=([-np.inf, -np.inf, -bound], [np.inf, np.inf, bound]),
            xtol=1e-12,
            max_nfev=settings.ZNE_FIT_MAX_EVALUATIONS,
        )
    except (ValueError, FloatingPointError) as e:
        logger.warning(f"Exponential fit failed, falling back to linear: {e}")
        return _linear_fallback(points)

    a, b, c = res.x
    value = a + b
    if not res.success or not np.isfinite(value):
        logger.debug(f"Exponential fit did not converge ({res.message}); falling back to linear")
        return _linear_fallback(points)
    return FitResult(
        value_at_zero=float(value),
        params={'a': float(a), 'b': float(b), 'c': float(c)},
        residual_norm=float(np.linalg.norm(res.fun)),
    )


def _linear_fallback(points):
    linear = fit_linear(points)
    return FitResult(
        value_at_zero=linear.value_at_zero,
        params=linear.params,
        converged=False,
        residual_norm=linear.residual_norm,
    )


def fit_ensemble(ensemble, kind, init=None):
    if kind == FitKind.LINEAR:
        return fit_linear(ensemble)
    if kind == FitKind.RICHARDSON:
        return fit_richardson(ensemble)
    if kind == FitKind.EXPONENTIAL:
        return fit_exponential(ensemble, init)
    raise ValueError(f"{kind!r} is not an extrapolation fit; use one of {[k.value for k in EXTRAPOLATION_KINDS]}")


def extrapolate(ensemble, kind, init=None):
    """B_ZNE: the fitted curve over eta read at eta = 0."""
    return fit_ensemble(ensemble, kind, init).value_at_zero


# -----------------------------
# NOISE-INFORMED FITS
# -----------------------------
def _two_parameter_fit(model, x, y, init, label):
    """Least squares over (B, rate) with the rate confined to [0, 1]."""
    x0 = np.array([init[0], min(max(init[1], 0.0), 1.0)], dtype=float)
    try:
        res = least_squares(
            lambda params: model(x, params[0], params[1]) - y,
            x0,
            jac='3-point',
            method='trf',
            bounds=([-np.inf, 0.0], [np.inf, 1.0]),
            xtol=1e-10,
            ftol=1e-14,
            gtol=1e-14,
            max_nfev=settings.ZNE_FIT_MAX_EVALUATIONS,
        )
    except (ValueError, FloatingPointError) as e:
        logger.warning(f"{label} fit failed: {e}")
        return FitResult(value_at_zero=float(x0[0]), params={'field': float(x0[0]), 'rate': float(x0[1])}, converged=False)

    singular_values = np.linalg.svd(res.jac, compute_uv=False)
    degenerate = bool(singular_values[-1] <= DEGENERACY_THRESHOLD * singular_values[0])
    if degenerate:
        logger.warning(f"{label} fit is degenerate: field and rate are not separately identifiable")
    field_est, rate_est = (float(v) for v in res.x)
    finite = math.isfinite(field_est) and math.isfinite(rate_est)
    return FitResult(
        value_at_zero=field_est,
        params={'field': field_est, 'rate': rate_est},
        converged=bool(res.success) and finite and not degenerate,
        residual_norm=float(np.linalg.norm(res.fun)),
        degenerate=degenerate,
    )


def _clip_rate(rate):
    return min(max(rate, 0.0), 1.0)


def fit_informed_pd(data, duration, init, detection=Detection.VARIANCE):
    """Fit p(m) = 1/2 [1 - (1-lambda)^((2m+1)/2) cos(Bt)] for (B, lambda)."""
    m, p = _as_xy(data, 2)
    if len(np.unique(m)) < 2:
        raise ValueError("Need at least two distinct fold counts")

    def model(folds, field, rate):
        return p1_local_pd(_clip_rate(rate), field, duration, folds, detection)

    return _two_parameter_fit(model, m, p, init, 'Phase-damping informed')


def fit_informed_ad(data, duration, init, detection=Detection.VARIANCE):
    """Same as ``fit_informed_pd`` with the amplitude-damping closed form (n = m)."""
    m, p = _as_xy(data, 2)
    if len(np.unique(m)) < 2:
        raise ValueError("Need at least two distinct fold counts")

    def model(folds, field, rate):
        return p1_local_ad(_clip_rate(rate), field, duration, folds, folds, detection)

    return _two_parameter_fit(model, m, p, init, 'Amplitude-damping informed')


def fit_informed(data, duration, init, kind, detection=Detection.VARIANCE):
    """Noise-informed fit for channel ``kind``."""
    return fit_noise_model(data, INFORMED_FITS[NoiseKind(kind)], init, duration, detection)


def fringe_time_grid(n_times, total_time):
    """
    M equally spaced times t_j = j t_R whose sum equals M t_Z.

    Spending the same total sensing time as M ZNE circuits of duration t_Z
    gives t_R = 2 t_Z / (M + 1).
    """
    if n_times < 1 or total_time <= 0:
        raise ValueError(f"Need n_times >= 1 and total_time > 0, got {n_times}, {total_time}")
    step = 2.0 * total_time / (n_times + 1)
    return [step * j for j in range(1, n_times + 1)]


def fit_ramsey_fringes(data, kind, init, detection=Detection.VARIANCE):
    """Fit the unfolded noisy fringe p(t_j) of channel ``kind`` for (B, rate)."""
    return fit_noise_model(data, FRINGE_FITS[NoiseKind(kind)], init, detection=detection)


def _fit_fringes(data, kind, init, detection):
    t, p = _as_xy(data, 2)
    if len(np.unique(t)) < 2:
        raise ValueError("Need at least two distinct sensing times")

    if kind == NoiseKind.PHASE_DAMPING:
        def model(times, field, rate):
            return p1_local_pd(_clip_rate(rate), field, times, 0, detection)
    else:
        def model(times, field, rate):
            return p1_local_ad(_clip_rate(rate), field, times, 0, 0, detection)

    return _two_parameter_fit(model, t, p, init, 'Ramsey fringe')


def fit_noise_model(data, kind, init, duration=None, detection=Detection.VARIANCE):
    """
    (B, rate) fit selected by a noise-model ``FitKind``.

    Informed kinds take (m, p_hat) data at sensing time ``duration``; fringe
    kinds take (t_j, p_hat) data and ignore it.
    """
    if kind in (FitKind.INFORMED_PD, FitKind.INFORMED_AD) and duration is None:
        raise ValueError(f"{kind} fits need the sensing duration")
    if kind == FitKind.INFORMED_PD:
        return fit_informed_pd(data, duration, init, detection)
    if kind == FitKind.INFORMED_AD:
        return fit_informed_ad(data, duration, init, detection)
    if kind == FitKind.RAMSEY_FRINGE_PD:
        return _fit_fringes(data, NoiseKind.PHASE_DAMPING, init, detection)
    if kind == FitKind.RAMSEY_FRINGE_AD:
        return _fit_fringes(data, NoiseKind.AMPLITUDE_DAMPING, init, detection)
    raise ValueError(f"{kind!r} is not a noise-model fit; use fit_ensemble for extrapolation kinds")
