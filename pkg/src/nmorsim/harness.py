"""Orchestration: magnetic-field sweeps, time traces, external data.

The simulation chain per time sample: instantaneous laser frequency from
the noise trace -> quasi-static steady state -> propagation through the
cell -> analyzer channels.  All samples of all noise realizations of one
field point are propagated in a single vectorized call.

Noise realizations are drawn once per run from seed-derived child
streams and reused across field points; sweep outputs are therefore
deterministic for a given (config, seed), exactly symmetric under
B -> -B, and independent of worker scheduling.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .atom import DetuningSet, FieldAmplitudes, apply_zeeman, zeeman_splitting
from .cell import propagate
from .config import MHZ, US, ExperimentConfig
from .correlation import (
    CorrelationFunction,
    FieldTracePair,
    analytic_correlation,
    cross_correlation,
    moments_from_samples,
)
from .errors import NmorError, NonuniformGrid, ParseError, ZeroVariance
from .noise import generate_frequency_trace
from .polarimetry import IntensityPair, detection_channels, rotation_angle, rotation_from_fields


@dataclass(frozen=True)
class SweepRow:
    """Aggregated observables at one magnetic-field value."""

    b_gauss: float
    omega_cb_mhz: float
    transmission: float
    rotation: float
    g2_zero: float
    g2_zero_stderr: float
    g2_analytic: float


def _noise_bank(cfg: ExperimentConfig, seed: int, realizations: int) -> np.ndarray:
    """(realizations, n_samples) frequency deviations from child seeds."""
    children = np.random.SeedSequence(seed).spawn(realizations)
    bank = np.empty((realizations, cfg.n_samples))
    for r, child in enumerate(children):
        params = cfg.noise_params(seed=child.generate_state(2)[0])
        bank[r] = generate_frequency_trace(params).values
    return bank


def _propagate_block(cfg: ExperimentConfig, omega_cb: float,
                     dnu: np.ndarray):
    """Run the full chain for a block of frequency-deviation samples.

    Returns per-sample analyzer intensities (I1, I2), circular-mode
    intensities and rotation angles, all shaped like ``dnu``.
    """
    atom = apply_zeeman(cfg.atom_params(), omega_cb)
    carrier_nu = -cfg.carrier_detuning  # line center sits at offset 0
    nu = carrier_nu + np.ravel(dnu)
    det = DetuningSet.for_laser(atom, nu, carrier_nu=carrier_nu)
    fields_in = FieldAmplitudes(omega_minus=complex(cfg.rabi),
                                omega_plus=complex(cfg.rabi))
    result = propagate(fields_in, atom, det, cfg.cell_params(),
                       adaptive=cfg.cell.adaptive_slabs)
    i_plus = np.abs(result.omega_plus_out) ** 2
    i_minus = np.abs(result.omega_minus_out) ** 2
    phi = rotation_from_fields(result, fields_in) + cfg.output.phi_offset_rad
    i1, i2 = detection_channels(IntensityPair(I_plus=i_plus, I_minus=i_minus,
                                              phi=phi))
    shape = np.shape(dnu)
    return (i1.reshape(shape), i2.reshape(shape),
            i_plus.reshape(shape), i_minus.reshape(shape), phi.reshape(shape))


def _sweep_point(cfg: ExperimentConfig, b_gauss: float, bank: np.ndarray,
                 variant: str) -> SweepRow:
    omega_cb = float(zeeman_splitting(b_gauss))
    i1, i2, i_plus, i_minus, phi = _propagate_block(cfg, omega_cb, bank)
    input_total = 2.0 * cfg.rabi ** 2
    realizations = bank.shape[0]
    g2 = np.empty(realizations)
    g2_an = np.empty(realizations)
    t_mean = np.empty(realizations)
    phi_mean = np.empty(realizations)
    for r in range(realizations):
        pair = FieldTracePair(t0=0.0, dt=cfg.dt, ch1=i1[r], ch2=i2[r])
        g2[r] = cross_correlation(pair, 0.0, 0.0, cfg.window).values[0]
        t_mean[r] = (np.mean(i1[r]) + np.mean(i2[r])) / input_total
        phi_mean[r] = rotation_angle(np.mean(i1[r]), np.mean(i2[r]))
        mp = i_plus[r] - np.mean(i_plus[r])
        mm = i_minus[r] - np.mean(i_minus[r])
        i0 = 0.5 * (np.mean(i_plus[r]) + np.mean(i_minus[r]))
        g2_an[r] = analytic_correlation(moments_from_samples(mp, mm, i0),
                                        float(np.mean(phi[r])), variant)
    stderr = float(np.std(g2, ddof=1) / np.sqrt(realizations)) if realizations > 1 else 0.0
    return SweepRow(b_gauss=float(b_gauss), omega_cb_mhz=omega_cb / MHZ,
                    transmission=float(np.mean(t_mean)),
                    rotation=float(np.mean(phi_mean)),
                    g2_zero=float(np.mean(g2)), g2_zero_stderr=stderr,
                    g2_analytic=float(np.mean(g2_an)))


def iter_field_sweep(cfg: ExperimentConfig, *, seed: int | None = None,
                     realizations: int | None = None, variant: str | None = None,
                     jobs: int = 1):
    """Yield one :class:`SweepRow` per field value, in field order.

    Worker errors are re-raised annotated with the offending field value;
    rows produced before the failure have already been yielded, so a
    caller that writes incrementally keeps the partial sweep.
    """
    seed = cfg.seed if seed is None else seed
    realizations = cfg.noise.realizations if realizations is None else realizations
    variant = cfg.output.variant if variant is None else variant
    bank = _noise_bank(cfg, seed, realizations)
    bs = cfg.b_grid()

    def work(b):
        try:
            return _sweep_point(cfg, b, bank, variant)
        except NmorError as exc:
            raise type(exc)(f"at B = {b:+.4f} G: {exc}") from exc

    if jobs <= 1:
        for b in bs:
            yield work(b)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            yield from pool.map(work, bs)


def run_field_sweep(cfg: ExperimentConfig, **kwargs) -> list[SweepRow]:
    return list(iter_field_sweep(cfg, **kwargs))


def run_time_trace(cfg: ExperimentConfig, b_gauss: float, *,
                   seed: int | None = None, variant: str | None = None):
    """Simulate one detector-trace pair and its delay-resolved G2.

    Returns ``(pair, correlation, summary)``.  With a noiseless laser the
    correlation is undefined (flat traces); that surfaces as
    ``correlation = None`` plus a diagnostic entry in the summary rather
    than an exception.
    """
    seed = cfg.seed if seed is None else seed
    variant = cfg.output.variant if variant is None else variant
    bank = _noise_bank(cfg, seed, 1)
    omega_cb = float(zeeman_splitting(b_gauss))
    i1, i2, i_plus, i_minus, phi = _propagate_block(cfg, omega_cb, bank)
    pair = FieldTracePair(t0=0.0, dt=cfg.dt, ch1=i1[0], ch2=i2[0])
    tau_max = cfg.trace.tau_max_us * US
    summary = {
        "b_gauss": float(b_gauss),
        "omega_cb_mhz": omega_cb / MHZ,
        "transmission": float((np.mean(i1) + np.mean(i2)) / (2.0 * cfg.rabi ** 2)),
        "rotation_rad": float(rotation_angle(np.mean(i1), np.mean(i2))),
    }
    try:
        corr = cross_correlation(pair, -tau_max, tau_max, cfg.window)
        summary["g2_zero"] = corr.at_zero()
    except ZeroVariance as exc:
        corr = None
        summary["diagnostic"] = f"no fluctuation power: {exc}"
    mp = i_plus[0] - np.mean(i_plus[0])
    mm = i_minus[0] - np.mean(i_minus[0])
    i0 = 0.5 * float(np.mean(i_plus[0]) + np.mean(i_minus[0]))
    summary["g2_analytic"] = analytic_correlation(
        moments_from_samples(mp, mm, i0), float(np.mean(phi)), variant)
    return pair, corr, summary


# ---- external data ------------------------------------------------------


def read_trace_pair(path) -> FieldTracePair:
    """Read a two-channel CSV (t, S1, S2) into a trace pair.

    Accepts an optional header line; requires a uniform time grid within
    a relative jitter of 1e-6.
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 3:
                raise ParseError("expected three comma-separated columns "
                                 "(t, S1, S2)", line=lineno)
            try:
                rows.append((float(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError:
                if lineno == 1:
                    continue  # header
                raise ParseError(f"cannot parse row {parts!r}", line=lineno)
    if len(rows) < 2:
        raise ParseError("need at least two samples")
    data = np.asarray(rows)
    t = data[:, 0]
    steps = np.diff(t)
    dt = float(np.mean(steps))
    if dt <= 0 or np.any(np.abs(steps - dt) > 1e-6 * abs(dt)):
        raise NonuniformGrid("time column is not a uniform grid "
                             "(relative jitter above 1e-6)")
    return FieldTracePair(t0=float(t[0]), dt=dt, ch1=data[:, 1], ch2=data[:, 2])


def analyze_external(path, window: float, tau_min: float, tau_max: float,
                     refs: tuple[float, float] | None = None):
    """Correlate an externally recorded trace pair.

    Same statistics pipeline as the simulated traces.  ``refs`` are the
    no-absorption reference levels (S01, S02); when given, the summary
    also carries the transmission.
    """
    pair = read_trace_pair(path)
    corr = cross_correlation(pair, tau_min, tau_max, window)
    summary = {
        "n_samples": int(pair.ch1.size),
        "dt": pair.dt,
        "g2_zero": corr.at_zero(),
        "rotation_rad": float(rotation_angle(np.mean(pair.ch1), np.mean(pair.ch2))),
    }
    if refs is not None:
        s01, s02 = refs
        summary["transmission"] = float(
            (np.mean(pair.ch1) + np.mean(pair.ch2)) / (s01 + s02))
    return pair, corr, summary


# ---- output files --------------------------------------------------------


def _fmt(x) -> str:
    return f"{x:.12g}"


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("b_gauss,omega_cb_mhz,transmission,rotation_rad,"
                 "g2_zero,g2_zero_stderr,g2_analytic\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in (
                row.b_gauss, row.omega_cb_mhz, row.transmission, row.rotation,
                row.g2_zero, row.g2_zero_stderr, row.g2_analytic)) + "\n")
            fh.flush()


def write_trace_csv(pair: FieldTracePair, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,S1,S2\n")
        for t, a, b in zip(pair.times, pair.ch1, pair.ch2):
            fh.write(f"{_fmt(t)},{_fmt(a)},{_fmt(b)}\n")


def write_correlation_csv(corr: CorrelationFunction, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("tau,g2\n")
        for tau, g in zip(corr.taus, corr.values):
            fh.write(f"{_fmt(tau)},{_fmt(g)}\n")


def write_manifest(cfg: ExperimentConfig, path, *, seed: int,
                   realizations: int, variant: str, files: list[str]) -> None:
    """Machine-readable run record; deterministic for identical inputs."""
    manifest = {
        "config": cfg.to_dict(),
        "config_sha256": cfg.sha256(),
        "seed": seed,
        "realizations": realizations,
        "variant": variant,
        "files": sorted(files),
        "versions": {
            "nmorsim": __version__,
            "numpy": np.__version__,
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def ensure_outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out
