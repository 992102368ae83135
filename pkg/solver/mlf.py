"""Mittag-Leffler and Gamma function evaluation on the real line.

E_{alpha,beta}(z) is evaluated by regime, keyed on the cancellation index
c = |z|**(1/alpha), which controls how large the series terms get relative
to the result:

- ``z == 0``: the constant term 1/Gamma(beta).
- ``z > 0`` or ``c <= SERIES_CANCEL_LIMIT``: float64 power series summed
  with ``math.fsum``.
- ``alpha < 1`` and ``|z| < ASYMPTOTIC_THRESHOLD``: the integral along the
  collapsed Hankel contour, integrated with ``scipy.integrate.quad``.
- ``alpha < 1`` and ``|z| >= ASYMPTOTIC_THRESHOLD``: the algebraic
  asymptotic expansion truncated at its smallest term.
- ``alpha >= 1``: mpmath power series with enough digits to absorb the
  cancellation.
"""
import logging
import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import mpmath
import numpy as np
from scipy import integrate, special

from solver.errors import DomainError, RangeError

if TYPE_CHECKING:
    from solver.fracops import FractionalOrder

logger = logging.getLogger(__name__)

SERIES_CANCEL_LIMIT = 3.0
ASYMPTOTIC_THRESHOLD = 50.0
Z_MAX_POSITIVE = 20.0
Z_MAX_NEGATIVE = 1.0e12
EXTENDED_CANCEL_LIMIT = 200.0
POSITIVE_GROWTH_LIMIT = 600.0
MAX_SERIES_TERMS = 20000
QUAD_RELTOL = 1.0e-13
QUAD_LIMIT = 500
NEAR_POLE_SIN = 0.15
NEAR_POLE_WIDTHS = 100.0


@dataclass(frozen=True)
class MlfParams:
    """Parameters (alpha, beta) of E_{alpha,beta}."""
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise DomainError(f"Mittag-Leffler parameter {name} must be positive, got {value}")


def gamma(x: float) -> float:
    """Gamma function for positive real arguments.

    Args:
        x: Argument, must be > 0

    Returns:
        Gamma(x)
    """
    x = float(x)
    if not np.isfinite(x) or x <= 0:
        raise DomainError(f"gamma is defined here for x > 0 only, got {x}")
    value = float(special.gamma(x))
    if not np.isfinite(value):
        raise RangeError(f"gamma({x}) overflows float64")
    return value


def _series(alpha: float, beta: float, z: float) -> float:
    log_abs = math.log(abs(z))
    peak = abs(z) ** (1.0 / alpha) / alpha
    terms = [float(special.rgamma(beta))]
    for k in range(1, MAX_SERIES_TERMS):
        magnitude = math.exp(k * log_abs - special.gammaln(alpha * k + beta))
        term = magnitude if (z > 0 or k % 2 == 0) else -magnitude
        terms.append(term)
        if k > peak and magnitude < 1e-18 * abs(math.fsum(terms)):
            break
    else:
        logger.warning("Mittag-Leffler series hit %d terms at z=%g", MAX_SERIES_TERMS, z)
    return math.fsum(terms)


def _extended_series(alpha: float, beta: float, z: float) -> float:
    cancel = abs(z) ** (1.0 / alpha)
    digits = 25 + int(cancel / math.log(10.0)) + 5
    peak = cancel / alpha
    with mpmath.workdps(digits):
        zm, a, b = mpmath.mpf(z), mpmath.mpf(alpha), mpmath.mpf(beta)
        total = mpmath.rgamma(b)
        power = mpmath.mpf(1)
        tol = mpmath.mpf(10) ** (-22)
        for k in range(1, MAX_SERIES_TERMS):
            power *= zm
            # the Gamma argument must carry the working precision
            term = power * mpmath.rgamma(a * k + b)
            total += term
            if k > peak and abs(term) < tol * abs(total):
                break
        return float(total)


def _collapsed_contour(alpha: float, beta: float, w: float) -> float:
    """E_{alpha,beta}(-w) for 0 < alpha < 1 and beta < 1 + alpha.

    With x = r**alpha the denominator is (x - x0)**2 + h**2 where
    x0 = w cos(pi (1 - alpha)) and h = w sin(pi (1 - alpha)). As alpha -> 1
    this is a Lorentzian of width h sitting at x0; a window of
    NEAR_POLE_WIDTHS half-widths around it is integrated in the variable
    theta with x = x0 + h tan(theta), which absorbs the peak exactly.
    """
    sin_b = float(mpmath.sinpi(beta))
    sin_ba = float(mpmath.sinpi(beta - alpha))
    sin_a = float(mpmath.sinpi(1.0 - alpha))
    cos_a = float(mpmath.cospi(1.0 - alpha))
    x0, h = w * cos_a, w * sin_a

    def smooth(r):
        ra = r ** alpha
        return math.exp(-r) * (ra * sin_b + w * sin_ba) / ((ra - x0) ** 2 + h * h)

    def full(r):
        return r ** (alpha - beta) * smooth(r)

    def window(theta):
        x = x0 + h * math.tan(theta)
        r = x ** (1.0 / alpha)
        return r ** (alpha - beta) * math.exp(-r) * (x * sin_b + w * sin_ba) * r / (alpha * x * h)

    options = dict(epsabs=0.0, epsrel=QUAD_RELTOL, limit=QUAD_LIMIT)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if x0 > 0 and sin_a < NEAR_POLE_SIN:
            delta = min(0.5 * x0, NEAR_POLE_WIDTHS * h)
            r_lo = (x0 - delta) ** (1.0 / alpha)
            r_hi = (x0 + delta) ** (1.0 / alpha)
            split = min(1.0, 0.5 * r_lo)
            theta = math.atan(delta / h)
            total, _ = integrate.quad(smooth, 0.0, split, weight="alg", wvar=(alpha - beta, 0.0), **options)
            total += integrate.quad(full, split, r_lo, **options)[0]
            total += integrate.quad(window, -theta, theta, **options)[0]
            total += integrate.quad(full, r_hi, np.inf, **options)[0]
            return total / math.pi

        r_peak = w ** (1.0 / alpha)
        split = min(1.0, 0.5 * r_peak)
        total, _ = integrate.quad(smooth, 0.0, split, weight="alg", wvar=(alpha - beta, 0.0), **options)
        if r_peak < 700.0:
            total += integrate.quad(full, split, r_peak, **options)[0]
            total += integrate.quad(full, r_peak, np.inf, **options)[0]
        else:
            total += integrate.quad(full, split, np.inf, **options)[0]
    return total / math.pi


def _contour(alpha: float, beta: float, z: float) -> float:
    if beta >= 1.0 + alpha:
        # E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z
        lower = beta - alpha
        return (_contour(alpha, lower, z) - float(special.rgamma(lower))) / z
    return _collapsed_contour(alpha, beta, -z)


def _asymptotic(alpha: float, beta: float, z: float) -> float:
    total = 0.0
    last = math.inf
    for k in range(1, 200):
        term = -float(special.rgamma(beta - alpha * k)) * z ** (-k)
        if term == 0.0:
            continue
        if abs(term) > last:
            break
        total += term
        last = abs(term)
        if last < 1e-17 * abs(total):
            break
    return total


def mlf_eval(p: MlfParams, z: float) -> float:
    """Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for real z.

    Args:
        p: Series parameters
        z: Real argument

    Returns:
        E_{alpha,beta}(z) to about 1e-10 relative accuracy
    """
    z = float(z)
    if not np.isfinite(z):
        raise RangeError(f"Mittag-Leffler argument must be finite, got {z}")
    alpha, beta = p.alpha, p.beta
    if z == 0.0:
        return float(special.rgamma(beta))

    cancel = abs(z) ** (1.0 / alpha)
    if z > 0:
        if z > Z_MAX_POSITIVE or cancel > POSITIVE_GROWTH_LIMIT:
            raise RangeError(f"E_{{{alpha},{beta}}}({z}) is outside the certified positive range")
        return _series(alpha, beta, z)

    if cancel <= SERIES_CANCEL_LIMIT:
        return _series(alpha, beta, z)
    if alpha < 1.0:
        if -z > Z_MAX_NEGATIVE:
            raise RangeError(f"|z| = {-z} exceeds {Z_MAX_NEGATIVE}")
        if -z >= ASYMPTOTIC_THRESHOLD:
            return _asymptotic(alpha, beta, z)
        return _contour(alpha, beta, z)
    if cancel > EXTENDED_CANCEL_LIMIT:
        raise RangeError(
            f"E_{{{alpha},{beta}}}({z}) needs more than {EXTENDED_CANCEL_LIMIT} cancellation units"
        )
    return _extended_series(alpha, beta, z)


def mlf_array(alpha: float, beta: float, z) -> np.ndarray:
    """Evaluate E_{alpha,beta} elementwise over an array of arguments."""
    params = MlfParams(alpha, beta)
    values = np.asarray(z, dtype=float)
    out = np.empty(values.shape)
    for index, value in np.ndenumerate(values):
        out[index] = mlf_eval(params, value)
    return out


def mlf_kernel(order: "FractionalOrder", s: float) -> float:
    """ABC memory kernel value E_{alpha,alpha}(-gamma * s**alpha), s >= 0."""
    s = float(s)
    if not s >= 0:
        raise DomainError(f"kernel lag must be nonnegative, got {s}")
    return mlf_eval(MlfParams(order.alpha, order.alpha), -order.gamma * s ** order.alpha)


def mlf_reference(alpha: float, beta: float, z: float, terms: int = 200, digits: int = 60) -> float:
    """Truncated series in extended precision, used as an accuracy oracle."""
    with mpmath.workdps(digits):
        zm, a, b = mpmath.mpf(z), mpmath.mpf(alpha), mpmath.mpf(beta)
        total = mpmath.mpf(0)
        for k in range(terms):
            total += zm ** k * mpmath.rgamma(a * k + b)
        return float(total)
