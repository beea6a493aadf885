"""Field propagation through the vapor cell.

The two circular components obey
``d omega_minus / dz = -i eta_b rho_ab`` and
``d omega_plus / dz = -i eta_c rho_ac`` with the atomic coherences taken
from the quasi-static steady state at each position (the frequency noise
is slow compared with the atomic relaxation).  Integration is classic
fourth-order Runge-Kutta over ``n_slabs`` steps, optionally refined by
doubling until two consecutive grids agree.

Physical constants enter only through the coupling constants ``eta``;
they can be built either from an atomic density and an effective dipole
moment, or directly from a resonant optical depth.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .atom import DetuningSet, LambdaAtomParams, steady_state_response
from .errors import InvalidParams, NotConverged, PhysicalityWarning, SolverDiverged

HBAR = 1.054571817e-34   # J s
EPSILON_0 = 8.8541878128e-12  # F/m
C_LIGHT = 299792458.0    # m/s


@dataclass(frozen=True)
class CellParams:
    """Geometry and coupling of the vapor cell.

    ``eta_b``/``eta_c`` are the field-coupling constants of the two
    circular components in rad/(s m) per unit coherence.
    """

    length: float
    density: float
    eta_b: float
    eta_c: float
    n_slabs: int = 64

    def __post_init__(self):
        if not (np.isfinite(self.length) and self.length > 0.0):
            raise InvalidParams("cell length must be positive")
        if not (np.isfinite(self.density) and self.density >= 0.0):
            raise InvalidParams("density must be >= 0")
        if self.eta_b < 0.0 or self.eta_c < 0.0:
            raise InvalidParams("coupling constants must be >= 0")
        if int(self.n_slabs) < 1:
            raise InvalidParams("n_slabs must be >= 1")

    @classmethod
    def from_density(cls, density: float, length: float, dipole_moment: float,
                     nu: float, n_slabs: int = 64) -> "CellParams":
        """Couplings from first principles: ``eta = nu N p^2 / (2 hbar
        eps0 c)`` with equal dipole moments on both arms."""
        eta = nu * density * dipole_moment ** 2 / (2.0 * HBAR * EPSILON_0 * C_LIGHT)
        return cls(length=length, density=density, eta_b=eta, eta_c=eta,
                   n_slabs=n_slabs)

    @classmethod
    def from_optical_depth(cls, optical_depth: float, length: float,
                           gamma: float, density: float = 0.0,
                           n_slabs: int = 64) -> "CellParams":
        """Couplings from a resonant optical depth.

        ``optical_depth`` is the intensity attenuation exponent a weak
        resonant probe would see with the full population in its ground
        state: ``I(L) = I(0) exp(-OD)``, so ``eta = OD * gamma / (2 L)``.
        """
        if optical_depth < 0:
            raise InvalidParams("optical depth must be >= 0")
        eta = optical_depth * gamma / (2.0 * length)
        return cls(length=length, density=density, eta_b=eta, eta_c=eta,
                   n_slabs=n_slabs)


@dataclass(frozen=True)
class PropagationResult:
    """Output amplitudes, used grid size and optional per-slab snapshots."""

    omega_minus_out: object
    omega_plus_out: object
    n_slabs: int
    snapshots: object = None


def _photon_flux(om, op, det: DetuningSet):
    # photon flux is |omega|^2 / nu per mode; nu_minus == nu_plus is
    # enforced (and frequencies here are offsets), so the common frequency
    # factor cancels from the non-increase comparison
    return np.abs(om) ** 2 + np.abs(op) ** 2


def _integrate(fields_in, atom, det, cell, n_slabs, raman, collect):
    om = np.asarray(fields_in.omega_minus, dtype=complex)
    op = np.asarray(fields_in.omega_plus, dtype=complex)
    om, op = np.broadcast_arrays(om, op)
    om, op = om.astype(complex), op.astype(complex)
    in_scale = max(float(np.max(np.abs(om))), float(np.max(np.abs(op))), 0.0)
    h = cell.length / n_slabs
    snaps = [] if collect else None

    def rhs(f_om, f_op):
        sol = steady_state_response(atom, det, f_om, f_op, raman=raman)
        return (-1j * cell.eta_b * sol.rho_ab,
                -1j * cell.eta_c * np.conj(sol.rho_ca))

    for _ in range(n_slabs):
        if collect:
            snaps.append((om.copy(), op.copy()))
        k1m, k1p = rhs(om, op)
        k2m, k2p = rhs(om + 0.5 * h * k1m, op + 0.5 * h * k1p)
        k3m, k3p = rhs(om + 0.5 * h * k2m, op + 0.5 * h * k2p)
        k4m, k4p = rhs(om + h * k3m, op + h * k3p)
        om = om + (h / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
        op = op + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        amp = max(float(np.max(np.abs(om))), float(np.max(np.abs(op))))
        if in_scale > 0 and amp > 10.0 * in_scale:
            raise SolverDiverged(
                f"field amplitude grew beyond 10x the input "
                f"({amp:.3e} vs {in_scale:.3e}); quasi-static propagation "
                f"is not valid for these parameters")
    if collect:
        snaps.append((om.copy(), op.copy()))
    return om, op, snaps


def propagate(fields_in, atom: LambdaAtomParams, det: DetuningSet,
              cell: CellParams, *, raman: bool = True, adaptive: bool = True,
              rel_tol: float = 1e-8, max_doublings: int = 6,
              collect_snapshots: bool = False) -> PropagationResult:
    """Propagate both circular components through the cell.

    With ``adaptive=True`` the slab count starts at ``cell.n_slabs`` and
    doubles until the outputs of two consecutive grids agree to
    ``rel_tol`` (relative to the input amplitude); the finer result is
    returned.  Vacuum (zero coupling) propagation is exact and skipped.
    """
    om_in = np.asarray(fields_in.omega_minus, dtype=complex)
    op_in = np.asarray(fields_in.omega_plus, dtype=complex)
    if cell.eta_b == 0.0 and cell.eta_c == 0.0:
        om0, op0 = np.broadcast_arrays(om_in, op_in)
        return PropagationResult(omega_minus_out=om0.astype(complex),
                                 omega_plus_out=op0.astype(complex),
                                 n_slabs=0)
    n = int(cell.n_slabs)
    om, op, snaps = _integrate(fields_in, atom, det, cell, n, raman,
                               collect_snapshots)
    if adaptive:
        scale = max(float(np.max(np.abs(om_in))), float(np.max(np.abs(op_in))), 1e-300)
        for _ in range(max_doublings):
            om2, op2, snaps2 = _integrate(fields_in, atom, det, cell, 2 * n,
                                          raman, collect_snapshots)
            diff = max(float(np.max(np.abs(om2 - om))),
                       float(np.max(np.abs(op2 - op)))) / scale
            om, op, snaps = om2, op2, snaps2
            n *= 2
            if diff < rel_tol:
                break
        else:
            raise NotConverged(
                f"slab refinement did not reach {rel_tol:.1e} within "
                f"{max_doublings} doublings (last change {diff:.2e})")
    flux_in = _photon_flux(om_in, op_in, det)
    flux_out = _photon_flux(om, op, det)
    tol = 1e-9 * np.maximum(flux_in, np.max(flux_in) if np.size(flux_in) else 0.0)
    if np.any(flux_out > flux_in + tol):
        warnings.warn("total photon flux increased during propagation; "
                      "the balanced-drive approximation is strained here",
                      PhysicalityWarning, stacklevel=2)
    return PropagationResult(omega_minus_out=om, omega_plus_out=op,
                             n_slabs=n, snapshots=snaps)
