"""Brute-force time integration of the full density-matrix equation.

Independent cross-check for the closed-form solver: the 3x3 density matrix
is evolved in the rotating frame with a fixed-step fourth-order
Runge-Kutta map.  Because the generator is linear and trace-preserving,
the RK4 map shares its fixed point with the exact flow, so long-time
stepping converges to the exact steady state; a built-in step-doubling
comparison guards the step size.

This module is a test oracle.  It handles arbitrary (also unbalanced and
complex) drive amplitudes and asymmetric decoherence rates, but it is not
meant for the propagation hot path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atom import DetuningSet, FieldAmplitudes, LambdaAtomParams, SteadyStateSolution
from .errors import InvalidParams, NotConverged

# basis order (a, b, c)
_A, _B, _C = 0, 1, 2


def _as_scalar(x, name):
    arr = np.asarray(x)
    if arr.ndim != 0:
        raise InvalidParams(f"{name} must be scalar for the integrator")
    return complex(arr)


def build_generator(params: LambdaAtomParams, det: DetuningSet,
                    fields: FieldAmplitudes) -> np.ndarray:
    """9x9 complex generator L with d vec(rho)/dt = L vec(rho).

    Rotating frame at the two laser frequencies; row-major vectorization.
    Relaxation: total decay ``gamma_a`` out of the excited state feeding
    each ground sublevel at ``gamma_a/2``, plus the three independent
    coherence decay rates.
    """
    om = _as_scalar(fields.omega_minus, "omega_minus")
    op = _as_scalar(fields.omega_plus, "omega_plus")
    d_ab = params.omega_ab - float(np.asarray(det.nu_minus))
    d_ac = params.omega_ac - float(np.asarray(det.nu_plus))
    h = np.array([[0.0, om, op],
                  [np.conj(om), -d_ab, 0.0],
                  [np.conj(op), 0.0, -d_ac]], dtype=complex)
    eye = np.eye(3, dtype=complex)
    gen = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    idx = lambda i, j: 3 * i + j
    gen[idx(_A, _A), idx(_A, _A)] += -params.gamma_a
    gen[idx(_B, _B), idx(_A, _A)] += params.gamma_a / 2.0
    gen[idx(_C, _C), idx(_A, _A)] += params.gamma_a / 2.0
    for i, j, g in ((_A, _B, params.gamma_ab), (_B, _A, params.gamma_ab),
                    (_C, _A, params.gamma_ca), (_A, _C, params.gamma_ca),
                    (_C, _B, params.gamma_cb), (_B, _C, params.gamma_cb)):
        gen[idx(i, j), idx(i, j)] += -g
    return gen


def default_initial_state() -> np.ndarray:
    """Thermal ground-state preparation: equal ground populations, no
    coherences."""
    rho = np.zeros((3, 3), dtype=complex)
    rho[_B, _B] = 0.5
    rho[_C, _C] = 0.5
    return rho


def _rk4_map(gen: np.ndarray, dt: float) -> np.ndarray:
    """One-step propagator of classical RK4 on a linear system."""
    m = np.eye(gen.shape[0], dtype=complex)
    term = np.eye(gen.shape[0], dtype=complex)
    for k in range(1, 5):
        term = term @ gen * (dt / k)
        m = m + term
    return m


def _matrix_power_apply(m: np.ndarray, vec: np.ndarray, n: int) -> np.ndarray:
    """m^n @ vec via binary decomposition of n."""
    out = vec
    base = m
    while n > 0:
        if n & 1:
            out = base @ out
        n >>= 1
        if n:
            base = base @ base
    return out


def _solution_from_rho(rho: np.ndarray) -> SteadyStateSolution:
    return SteadyStateSolution(
        n_a=rho[_A, _A].real, n_b=rho[_B, _B].real, n_c=rho[_C, _C].real,
        n_ab=rho[_A, _A].real - rho[_B, _B].real,
        n_ca=rho[_C, _C].real - rho[_A, _A].real,
        n_cb=rho[_C, _C].real - rho[_B, _B].real,
        rho_ab=rho[_A, _B], rho_ca=rho[_C, _A], rho_cb=rho[_C, _B])


@dataclass(frozen=True)
class OracleReport:
    """Diagnostics of one oracle run."""

    t_end: float
    dt: float
    n_steps: int
    residual: float
    step_doubling_diff: float


def steady_state(params: LambdaAtomParams, det: DetuningSet,
                 fields: FieldAmplitudes, t_end: float | None = None,
                 dt: float | None = None, rho0: np.ndarray | None = None,
                 *, residual_tol: float = 1e-9, doubling_tol: float = 1e-8,
                 return_report: bool = False):
    """Integrate to ``t_end`` and return the final state.

    ``dt`` defaults to a safe fraction of the fastest generator scale;
    ``t_end`` defaults to many lifetimes of the slowest decaying mode.
    The integration is repeated at ``dt/2`` and the two endpoints must
    agree to ``doubling_tol``; the residual ``||L rho||`` at the end must
    be below ``residual_tol`` (relative to the generator scale), otherwise
    :class:`NotConverged` is raised.
    """
    gen = build_generator(params, det, fields)
    scale = float(np.max(np.sum(np.abs(gen), axis=1)))
    rho0 = default_initial_state() if rho0 is None else np.asarray(rho0, dtype=complex)
    vec0 = rho0.reshape(-1).copy()
    if scale == 0.0:
        # no dynamics at all
        rho = vec0.reshape(3, 3)
        result = _solution_from_rho(rho)
        report = OracleReport(t_end=0.0, dt=0.0, n_steps=0, residual=0.0,
                              step_doubling_diff=0.0)
        return (result, report) if return_report else result
    if dt is None:
        dt = 2.0 / scale
    if t_end is None:
        eig = np.linalg.eigvals(gen)
        decay = -np.real(eig)
        slow = np.min(decay[decay > 1e-12 * scale]) if np.any(decay > 1e-12 * scale) else 0.0
        if slow <= 0.0:
            # stationary directions beyond the steady state (e.g. no drive):
            # integrate a fixed long stretch and let the residual check decide
            t_end = 100.0 / scale
        else:
            t_end = 45.0 / slow
    n_steps = max(1, int(np.ceil(t_end / dt)))
    coarse = _matrix_power_apply(_rk4_map(gen, t_end / n_steps), vec0, n_steps)
    fine = _matrix_power_apply(_rk4_map(gen, t_end / (2 * n_steps)), vec0, 2 * n_steps)
    diff = float(np.max(np.abs(coarse - fine)))
    if diff > doubling_tol:
        raise NotConverged(
            f"step-doubling check failed: endpoints differ by {diff:.2e} "
            f"(> {doubling_tol:.1e}); reduce dt")
    residual = float(np.max(np.abs(gen @ fine))) / scale
    if residual > residual_tol:
        raise NotConverged(
            f"state still evolving at t_end (residual {residual:.2e} > "
            f"{residual_tol:.1e}); increase t_end")
    rho = fine.reshape(3, 3)
    rho = 0.5 * (rho + rho.conj().T)
    result = _solution_from_rho(rho)
    if return_report:
        return result, OracleReport(t_end=float(t_end), dt=t_end / n_steps,
                                    n_steps=n_steps, residual=residual,
                                    step_doubling_diff=diff)
    return result


def trajectory(params: LambdaAtomParams, det: DetuningSet,
               fields: FieldAmplitudes, t_end: float, dt: float,
               rho0: np.ndarray | None = None):
    """Explicit RK4 stepping, returning every intermediate state.

    For step-level checks (trace preservation, Hermiticity); use
    :func:`steady_state` for endpoints.
    """
    gen = build_generator(params, det, fields)
    rho0 = default_initial_state() if rho0 is None else np.asarray(rho0, dtype=complex)
    n_steps = max(1, int(np.ceil(t_end / dt)))
    step = _rk4_map(gen, t_end / n_steps)
    states = np.empty((n_steps + 1, 3, 3), dtype=complex)
    vec = rho0.reshape(-1).copy()
    states[0] = rho0
    for k in range(1, n_steps + 1):
        vec = step @ vec
        states[k] = vec.reshape(3, 3)
    times = np.linspace(0.0, t_end, n_steps + 1)
    return times, states
