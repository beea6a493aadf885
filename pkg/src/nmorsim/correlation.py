"""Normalized intensity cross-correlation: estimator and closed form.

The estimator works on two detector traces sharing one uniform time grid:
fluctuations are extracted with a sliding forward window, and the
normalized cross-correlation

    G2(tau) = <dS1(t) dS2(t+tau)> / sqrt(<dS1(t)^2> <dS2(t+tau)^2>)

is evaluated at integer sample shifts, with the second moments taken over
the same overlap as the numerator so the result is a true cosine
similarity (|G2| <= 1 by Cauchy-Schwarz, exactly +-1 for proportional
channels).

The closed form expresses G2(0) through the moments of the circular-mode
fluctuation sum ``x = i+ + i-`` and difference ``s = i+ - i-`` and the
rotation angle ``phi``.  Two numerator variants are provided:

* ``"paper"``:    <x^2> cos^2(phi) + V sin^2(phi)
* ``"derived"``:  <x^2> cos^2(phi) - V sin^2(phi)

with ``V = (<s^4> - <s^2>^2) / (16 I0^2)``.  Expanding
``<dI1 dI2>`` directly from the channel fluctuations gives the
``"derived"`` sign; the ``"paper"`` variant reproduces the published
expression.  Both share the denominator
``sqrt((<x^2> cos^2 + V sin^2)^2 + 4 <x^2> V sin^4)``, which equals
``sqrt(<dI1^2><dI2^2>)`` exactly.  They agree at ``phi = 0`` (both give
1); at ``<x^2> = 0`` the derived variant gives -1 (the channels are then
perfectly anti-correlated) where the paper variant gives +1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateMoments,
    InvalidParams,
    NoPeak,
    WindowTooShort,
    ZeroVariance,
)

VARIANTS = ("paper", "derived")


@dataclass(frozen=True)
class FieldTracePair:
    """Two detector-signal traces on one uniform grid."""

    t0: float
    dt: float
    ch1: np.ndarray
    ch2: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.ch1, dtype=float)
        b = np.asarray(self.ch2, dtype=float)
        if a.ndim != 1 or b.ndim != 1 or a.size != b.size:
            raise InvalidParams("channels must be 1-D arrays of equal length")
        if a.size < 2:
            raise InvalidParams("need at least two samples")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InvalidParams("traces contain non-finite samples")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise InvalidParams("dt must be positive")
        object.__setattr__(self, "ch1", a)
        object.__setattr__(self, "ch2", b)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.ch1.size)


@dataclass(frozen=True)
class CorrelationFunction:
    """G2 values over a delay grid."""

    taus: np.ndarray
    values: np.ndarray
    window: float

    def __post_init__(self):
        taus = np.asarray(self.taus, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if taus.shape != vals.shape or taus.ndim != 1:
            raise InvalidParams("taus and values must be matching 1-D arrays")
        if np.any(np.abs(vals) > 1.0 + 1e-9):
            raise InvalidParams("|G2| exceeds 1; not a normalized correlation")
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "values", vals)

    def at_zero(self) -> float:
        k = int(np.argmin(np.abs(self.taus)))
        return float(self.values[k])


@dataclass(frozen=True)
class FluctuationMoments:
    """Moments of the circular-mode fluctuations entering the closed form."""

    I0: float
    var_x: float
    var_s: float
    fourth_s: float

    def __post_init__(self):
        if self.var_x < 0 or self.var_s < 0:
            raise InvalidParams("second moments must be >= 0")
        if self.fourth_s < self.var_s ** 2 * (1.0 - 1e-9):
            raise InvalidParams("<s^4> >= <s^2>^2 violated")
        if not self.I0 > 0:
            raise InvalidParams("I0 must be positive")

    @property
    def excess(self) -> float:
        """V = (<s^4> - <s^2>^2) / (16 I0^2)."""
        return (self.fourth_s - self.var_s ** 2) / (16.0 * self.I0 ** 2)


def moments_from_samples(i_plus, i_minus, I0) -> FluctuationMoments:
    """Estimate the closed-form moments from sampled fluctuations."""
    x = np.asarray(i_plus) + np.asarray(i_minus)
    s = np.asarray(i_plus) - np.asarray(i_minus)
    s2 = s * s
    return FluctuationMoments(I0=float(I0), var_x=float(np.mean(x * x)),
                              var_s=float(np.mean(s2)),
                              fourth_s=float(np.mean(s2 * s2)))


def extract_fluctuations(values, dt: float, window: float) -> np.ndarray:
    """Subtract the sliding forward-window mean.

    ``dS(t) = S(t) - mean(S over [t, t + window])``.  Trailing samples
    without a full window are dropped; a window covering the whole trace
    degenerates to subtracting the global mean (full length).
    """
    values = np.asarray(values, dtype=float)
    if window < 2.0 * dt:
        raise WindowTooShort(f"window {window:g} s is below two samples")
    n = values.size
    w = int(round(window / dt))
    if w >= n:
        return values - np.mean(values)
    means = np.convolve(values, np.full(w, 1.0 / w), mode="valid")
    return values[: n - w + 1] - means


def cross_correlation(pair: FieldTracePair, tau_min: float, tau_max: float,
                      window: float) -> CorrelationFunction:
    """Normalized cross-correlation over an integer-shift delay grid.

    Delays are rounded to sample multiples; each delay uses the full
    overlap of the two fluctuation traces for both the numerator and the
    normalizing second moments.
    """
    if tau_max < tau_min:
        raise InvalidParams("tau_max must be >= tau_min")
    d1 = extract_fluctuations(pair.ch1, pair.dt, window)
    d2 = extract_fluctuations(pair.ch2, pair.dt, window)
    m = d1.size
    if not np.any(d1 != 0.0) or not np.any(d2 != 0.0):
        raise ZeroVariance("a channel has no fluctuation power inside the window")
    k_min = int(round(tau_min / pair.dt))
    k_max = int(round(tau_max / pair.dt))
    if k_max - (-m + 2) < 0 or k_min > m - 2:
        raise InvalidParams("delay range lies outside the trace")
    k_min = max(k_min, -(m - 2))
    k_max = min(k_max, m - 2)
    ks = np.arange(k_min, k_max + 1)
    vals = np.empty(ks.size)
    for j, k in enumerate(ks):
        if k >= 0:
            u = d1[: m - k]
            v = d2[k:]
        else:
            u = d1[-k:]
            v = d2[: m + k]
        p11 = float(np.dot(u, u)) / u.size
        p22 = float(np.dot(v, v)) / v.size
        if p11 == 0.0 or p22 == 0.0:
            raise ZeroVariance(f"zero fluctuation power in the overlap at "
                               f"delay {k * pair.dt:g} s")
        vals[j] = (float(np.dot(u, v)) / u.size) / np.sqrt(p11 * p22)
    return CorrelationFunction(taus=ks * pair.dt, values=vals, window=window)


def analytic_correlation(m: FluctuationMoments, phi: float,
                         variant: str = "derived") -> float:
    """Closed-form G2(0) from fluctuation moments and the rotation angle.

    See the module docstring for the two numerator variants.  Raises
    :class:`DegenerateMoments` when both ``<x^2>`` and the difference-mode
    excess ``V`` vanish.
    """
    if variant not in VARIANTS:
        raise InvalidParams(f"variant must be one of {VARIANTS}")
    v = m.excess
    sin2 = np.sin(phi) ** 2
    cos2 = np.cos(phi) ** 2
    base = m.var_x * cos2 + v * sin2
    denom = np.sqrt(base ** 2 + 4.0 * m.var_x * v * sin2 ** 2)
    if denom == 0.0:
        raise DegenerateMoments("all fluctuation moments vanish")
    if variant == "paper":
        num = base
    else:
        num = m.var_x * cos2 - v * sin2
    out = float(num / denom)
    return float(np.clip(out, -1.0, 1.0))


def delta_channels(x, s, s2_mean: float, I0: float, phi: float):
    """Channel fluctuations from mode-sum/difference fluctuations.

    ``dI_{1,2} = x (1 +/- sin phi) -/+ (s^2 - <s^2>) sin(phi) / (4 I0)``,
    the second-order expansion of the analyzer outputs around the mean
    intensity ``I0``.
    """
    if not I0 > 0:
        raise InvalidParams("I0 must be positive")
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    sp = np.sin(phi)
    quad = (s * s - s2_mean) / (4.0 * I0) * sp
    return x * (1.0 + sp) - quad, x * (1.0 - sp) + quad


def correlation_peak_width(cf: CorrelationFunction) -> float:
    """Full width at half maximum of ``|G2|`` around its global extremum.

    Crossing positions are linearly interpolated between grid points; if
    either side never falls below half of the peak inside the delay grid,
    :class:`NoPeak` is raised.
    """
    y = np.abs(np.asarray(cf.values, dtype=float))
    taus = np.asarray(cf.taus, dtype=float)
    if y.size < 3:
        raise NoPeak("delay grid too short to resolve a peak")
    k = int(np.argmax(y))
    half = y[k] / 2.0
    if y[k] == 0.0:
        raise NoPeak("correlation is identically zero")

    def crossing(indices):
        prev = k
        for i in indices:
            if y[i] < half:
                # interpolate between i and prev
                t0, t1 = taus[i], taus[prev]
                y0, y1 = y[i], y[prev]
                return t0 + (half - y0) * (t1 - t0) / (y1 - y0)
            prev = i
        return None

    left = crossing(range(k - 1, -1, -1))
    right = crossing(range(k + 1, y.size))
    if left is None or right is None:
        raise NoPeak("no half-maximum crossing inside the delay grid")
    return float(right - left)
