"""Stochastic instantaneous-frequency traces for a phase-diffusing laser.

The frequency deviation is modeled as a stationary Ornstein-Uhlenbeck
process.  Its stationary variance is tied to the laser linewidth so that
the integrated phase performs diffusion with that linewidth in the
white-noise limit: ``var = linewidth / (2 * correlation_time)`` (linewidth
as an angular FWHM).  The update uses the exact conditional distribution,
so single-time statistics carry no step-size bias.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import InvalidParams, ParseError


@dataclass(frozen=True)
class NoiseParams:
    """Parameters of one frequency-noise realization.

    linewidth : angular FWHM of the laser line [rad/s]; zero means a
        noiseless laser.
    correlation_time : relaxation time of the frequency noise [s].
    seed : 64-bit seed; identical seeds give identical traces.
    dt : sample interval [s]; must resolve the process (< tau / 5).
    n_samples : trace length.
    """

    linewidth: float
    correlation_time: float
    seed: int
    dt: float
    n_samples: int

    def __post_init__(self):
        if not (np.isfinite(self.linewidth) and self.linewidth >= 0.0):
            raise InvalidParams("linewidth must be finite and >= 0")
        if not (np.isfinite(self.correlation_time) and self.correlation_time > 0.0):
            raise InvalidParams("correlation_time must be positive")
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise InvalidParams("dt must be positive")
        if self.dt >= self.correlation_time / 5.0:
            raise InvalidParams("dt must be below correlation_time/5 to resolve "
                                "the frequency noise")
        if int(self.n_samples) < 1:
            raise InvalidParams("n_samples must be >= 1")

    @property
    def stationary_variance(self) -> float:
        """Stationary variance of the frequency deviation [rad^2/s^2]."""
        return self.linewidth / (2.0 * self.correlation_time)


@dataclass(frozen=True)
class FrequencyTrace:
    """Uniformly sampled instantaneous frequency deviations [rad/s]."""

    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise InvalidParams("values must be a 1-D array")
        if not np.all(np.isfinite(vals)):
            raise InvalidParams("trace contains non-finite samples")
        object.__setattr__(self, "values", vals)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.size)


def generate_frequency_trace(p: NoiseParams) -> FrequencyTrace:
    """Draw one stationary OU realization.

    The first sample comes from the stationary distribution and each
    update is the exact one-step conditional, so halving ``dt`` changes
    statistics only through sampling noise.
    """
    n = int(p.n_samples)
    sigma = np.sqrt(p.stationary_variance)
    if sigma == 0.0:
        return FrequencyTrace(t0=0.0, dt=p.dt, values=np.zeros(n))
    rng = np.random.default_rng(p.seed)
    alpha = np.exp(-p.dt / p.correlation_time)
    x0 = sigma * rng.standard_normal()
    kicks = sigma * np.sqrt(1.0 - alpha * alpha) * rng.standard_normal(n - 1)
    # x[k] = alpha x[k-1] + kick[k]: an AR(1) filter over the kick stream
    driven = lfilter([1.0], [1.0, -alpha], kicks) if n > 1 else np.zeros(0)
    values = np.empty(n)
    values[0] = x0
    if n > 1:
        values[1:] = driven + x0 * alpha ** np.arange(1, n)
    return FrequencyTrace(t0=0.0, dt=p.dt, values=values)


def trace_to_csv(trace: FrequencyTrace, path) -> None:
    """Write a (t, delta_nu) two-column CSV; full float round-trip."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,delta_nu\n")
        for t, v in zip(trace.times, trace.values):
            fh.write(f"{t!r},{v!r}\n")


def trace_from_csv(path) -> FrequencyTrace:
    """Read a trace written by :func:`trace_to_csv`."""
    times = []
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if lineno == 1 and line.lower().replace(" ", "") == "t,delta_nu":
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ParseError("expected two comma-separated columns", line=lineno)
            try:
                times.append(float(parts[0]))
                values.append(float(parts[1]))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from exc
    if len(values) < 1:
        raise ParseError("no samples found")
    times = np.asarray(times)
    if len(times) > 1:
        steps = np.diff(times)
        dt = steps[0]
        if dt <= 0 or np.any(np.abs(steps - dt) > 1e-6 * abs(dt)):
            raise ParseError("time column is not a uniform increasing grid")
    else:
        dt = 1.0
    return FrequencyTrace(t0=float(times[0]), dt=float(dt),
                          values=np.asarray(values))
