"""Steady state of a driven three-level Lambda system.

Level scheme: one excited state ``a`` coupled to two ground sublevels ``b``
and ``c`` by the two circular components of a single laser field, with Rabi
frequencies ``omega_minus`` (a-b) and ``omega_plus`` (a-c).  A longitudinal
magnetic field splits the ground sublevels by ``omega_cb``.

All rates and frequencies are angular (rad/s).  Frequencies may be given
relative to any common reference (only differences enter the equations);
the rest of the package uses offsets from the zero-field line center.

The closed-form solver assumes equal optical decoherence rates
(``gamma_ab == gamma_ca``) and balanced drive strengths; these are the
symmetric conditions of the linearly polarized single-laser configuration.
For anything else use :mod:`nmorsim.liouville`, the brute-force integrator.

Every function broadcasts over numpy arrays, so a whole time series of
instantaneous detunings or field amplitudes can be solved in one call.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateDenominator,
    InvalidParams,
    PhysicalityWarning,
    RegimeViolation,
)

# Delta-m = 2 splitting between the two coupled ground sublevels: twice the
# 0.7 MHz/G single-sublevel shift of the Rb-87 5S_1/2 ground state.
ZEEMAN_HZ_PER_GAUSS = 1.4e6

#: Default absolute threshold below which closed-form denominators are
#: treated as singular.  Deliberately tiny: only truly degenerate limits
#: (for example zero drive at exact two-photon resonance) should trip it.
DEGENERACY_EPS = 1e-300


def zeeman_splitting(b_gauss):
    """Ground-state splitting ``omega_cb`` [rad/s] for a field in gauss.

    The sign of ``b_gauss`` (field direction) carries through to the sign
    of the splitting.
    """
    return 2.0 * np.pi * ZEEMAN_HZ_PER_GAUSS * np.asarray(b_gauss, dtype=float)


def _require(cond, message):
    if not np.all(cond):
        raise InvalidParams(message)


@dataclass(frozen=True)
class LambdaAtomParams:
    """Relaxation rates and transition frequencies of the Lambda system.

    ``gamma_a`` is the *total* population decay rate out of the excited
    state; it branches equally into the two ground sublevels.  The optical
    coherence decay rates must be at least radiative (``gamma_a / 2``).
    """

    gamma_ab: float
    gamma_ca: float
    gamma_cb: float
    gamma_a: float
    omega_ab: float
    omega_ac: float

    def __post_init__(self):
        for name in ("gamma_ab", "gamma_ca", "gamma_cb", "gamma_a"):
            _require(np.isfinite(getattr(self, name)), f"{name} must be finite")
            _require(getattr(self, name) >= 0.0, f"{name} must be >= 0")
        _require(np.isfinite(self.omega_ab) & np.isfinite(self.omega_ac),
                 "transition frequencies must be finite")
        slack = 1.0 - 1e-12
        if self.gamma_ab < slack * self.gamma_a / 2 or self.gamma_ca < slack * self.gamma_a / 2:
            raise InvalidParams(
                "optical coherence decay must be at least gamma_a/2 (radiative floor)")
        if self.gamma_ab > 0 and self.gamma_cb > 0.1 * self.gamma_ab:
            warnings.warn(
                "gamma_cb is not small compared with gamma_ab; the ground-state "
                "coherence outlives nothing in this configuration",
                PhysicalityWarning, stacklevel=2)

    @property
    def line_center(self) -> float:
        """Mean of the two optical transition frequencies."""
        return 0.5 * (self.omega_ab + self.omega_ac)

    @classmethod
    def degenerate(cls, gamma, gamma_cb, gamma_a, line_center=0.0):
        """Zero-field atom: both transitions at ``line_center``, equal
        optical decoherence ``gamma`` on both arms."""
        return cls(gamma_ab=gamma, gamma_ca=gamma, gamma_cb=gamma_cb,
                   gamma_a=gamma_a, omega_ab=line_center, omega_ac=line_center)


def apply_zeeman(atom: LambdaAtomParams, omega_cb) -> LambdaAtomParams:
    """Split the ground sublevels symmetrically about the line center.

    Returns a copy with ``omega_ab - omega_ac == omega_cb`` and the line
    center unchanged.
    """
    center = atom.line_center
    return replace(atom, omega_ab=center + omega_cb / 2.0,
                   omega_ac=center - omega_cb / 2.0)


@dataclass(frozen=True)
class DetuningSet:
    """Laser frequencies and the derived detunings.

    ``delta`` is the symmetrized (line-center) detuning
    ``omega_ab - nu_minus - omega_cb/2``; ``Delta`` is the carrier's
    line-center detuning (``delta`` without the instantaneous frequency
    noise).  Instances are immutable; build them through
    :meth:`for_laser` so ``delta`` can never go stale.
    """

    nu_minus: object
    nu_plus: object
    omega_cb: float
    delta: object
    Delta: float

    def __post_init__(self):
        _require(np.all(np.asarray(self.nu_minus) == np.asarray(self.nu_plus)),
                 "single-laser configuration requires nu_minus == nu_plus")
        for name in ("nu_minus", "nu_plus", "omega_cb", "delta", "Delta"):
            _require(np.all(np.isfinite(getattr(self, name))), f"{name} must be finite")

    @classmethod
    def for_laser(cls, atom: LambdaAtomParams, nu, carrier_nu=None):
        """Detunings of a (possibly time-sampled) laser frequency ``nu``
        against ``atom``.  ``carrier_nu`` defaults to the mean of ``nu``."""
        nu = np.asarray(nu, dtype=float)
        omega_cb = atom.omega_ab - atom.omega_ac
        delta = atom.line_center - nu
        if carrier_nu is None:
            carrier_nu = float(np.mean(nu))
        return cls(nu_minus=nu, nu_plus=nu, omega_cb=float(omega_cb),
                   delta=delta, Delta=float(atom.line_center - carrier_nu))


@dataclass(frozen=True)
class FieldAmplitudes:
    """Complex Rabi frequencies of the two circular components."""

    omega_minus: object
    omega_plus: object

    def __post_init__(self):
        _require(np.all(np.isfinite(self.omega_minus)) and np.all(np.isfinite(self.omega_plus)),
                 "Rabi frequencies must be finite")

    @property
    def drive_squared(self):
        """Geometric-mean squared drive |omega_minus| * |omega_plus|.

        Equals Omega**2 for the balanced configuration the closed form
        assumes; used as its effective drive otherwise.
        """
        return np.abs(self.omega_minus) * np.abs(self.omega_plus)


@dataclass(frozen=True)
class ComplexLinewidths:
    """Complex relaxation rates of the three coherences.

    ``Gamma_ab = gamma_ab + i(omega_ab - nu_minus)``,
    ``Gamma_ca = gamma_ca - i(omega_ac - nu_plus)``,
    ``Gamma_cb = gamma_cb + i(omega_cb - nu_minus + nu_plus)``.

    ``Gamma`` is the shared optical value ``(Gamma_ab + Gamma_ca)/2``; with
    equal decoherence rates the two optical linewidths split exactly as
    ``Gamma_ab = Gamma + i*delta`` and ``Gamma_ca = Gamma - i*delta``.
    """

    Gamma_ab: object
    Gamma_ca: object
    Gamma_cb: object
    Gamma: object


def complex_linewidths(params: LambdaAtomParams, det: DetuningSet) -> ComplexLinewidths:
    """Complex linewidths for the given atom and laser detunings."""
    g_ab = params.gamma_ab + 1j * (params.omega_ab - np.asarray(det.nu_minus))
    g_ca = params.gamma_ca - 1j * (params.omega_ac - np.asarray(det.nu_plus))
    g_cb = params.gamma_cb + 1j * (det.omega_cb - np.asarray(det.nu_minus)
                                   + np.asarray(det.nu_plus))
    return ComplexLinewidths(Gamma_ab=g_ab, Gamma_ca=g_ca, Gamma_cb=g_cb,
                             Gamma=0.5 * (g_ab + g_ca))


@dataclass(frozen=True)
class SaturationCoefficients:
    """Real coefficients of the reduced population equations.

    Built from ``Gamma_tilde = Gamma_cb*(delta**2 + Gamma**2) + 2*Gamma*W``
    with drive ``W = |omega_minus * omega_plus|``:

    ``A = 2 Re(Gamma_cb Gamma / Gamma_tilde) W``
    ``B_coef = 2 Im(Gamma_cb / Gamma_tilde) W``
    ``C = 2 Re(1 / Gamma_tilde) W**2``

    The population equations pair them as ``A_b = A + delta*B_coef`` (the
    coefficient multiplying n_a - n_b) and ``A_c = A - delta*B_coef``; this
    pairing is the one consistent with the population-difference solution
    ``n_cb = 2 g B_coef delta / D`` and is verified against the
    brute-force integrator in the test suite.
    """

    A: object
    B_coef: object
    C: object
    A_b: object
    A_c: object
    gamma_tilde: object
    drive_squared: object
    delta: object


def saturation_coefficients(lw: ComplexLinewidths, fields: FieldAmplitudes,
                            det: DetuningSet, *, eps: float = DEGENERACY_EPS
                            ) -> SaturationCoefficients:
    """Reduce the coherence solutions into the population-equation
    coefficients.

    Assumes balanced drive; for slightly unbalanced amplitudes the
    geometric mean ``|omega_minus*omega_plus|`` is used.  Raises
    :class:`DegenerateDenominator` when ``Gamma_tilde`` vanishes, which
    happens only in the undriven two-photon-resonant limit.
    """
    # symmetric reduction requires equal optical decoherence rates
    re_ab = np.real(lw.Gamma_ab)
    re_ca = np.real(lw.Gamma_ca)
    if not np.allclose(re_ab, re_ca, rtol=1e-9, atol=0.0):
        raise InvalidParams(
            "closed-form reduction requires gamma_ab == gamma_ca; "
            "use the Liouville integrator for the asymmetric case")
    # delta re-derived from the linewidths themselves so a stale value in
    # `det` cannot desynchronize the algebra
    delta = np.real((lw.Gamma_ab - lw.Gamma_ca) / 2j)
    if not np.allclose(delta, det.delta, rtol=1e-9,
                       atol=1e-9 * max(1.0, float(np.max(np.abs(delta))))):
        raise InvalidParams("DetuningSet.delta is stale: rebuild it via "
                            "DetuningSet.for_laser after changing nu or omega_cb")
    w = fields.drive_squared
    gamma_tilde = lw.Gamma_cb * (delta ** 2 + lw.Gamma ** 2) + 2.0 * lw.Gamma * w
    if np.any(np.abs(gamma_tilde) <= eps):
        raise DegenerateDenominator(
            "Gamma_tilde vanished (undriven two-photon-resonant limit); "
            "the closed form does not apply")
    a = 2.0 * np.real(lw.Gamma_cb * lw.Gamma / gamma_tilde) * w
    b = 2.0 * np.imag(lw.Gamma_cb / gamma_tilde) * w
    c = 2.0 * np.real(1.0 / gamma_tilde) * w ** 2
    return SaturationCoefficients(A=a, B_coef=b, C=c,
                                  A_b=a + delta * b, A_c=a - delta * b,
                                  gamma_tilde=gamma_tilde, drive_squared=w,
                                  delta=delta)


@dataclass(frozen=True)
class SteadyStateSolution:
    """Populations, population differences and coherences.

    Population differences follow the convention ``n_xy = n_x - n_y``.
    Hermitian partners of the stored coherences are available as
    properties (``rho_ba``, ...).
    """

    n_a: object
    n_b: object
    n_c: object
    n_ab: object
    n_ca: object
    n_cb: object
    rho_ab: object = 0.0
    rho_ca: object = 0.0
    rho_cb: object = 0.0

    def __post_init__(self):
        total = np.asarray(self.n_a) + self.n_b + self.n_c
        if not np.allclose(total, 1.0, rtol=0.0, atol=1e-9):
            raise InvalidParams("populations do not sum to one")

    @property
    def rho_ba(self):
        return np.conj(self.rho_ab)

    @property
    def rho_ac(self):
        return np.conj(self.rho_ca)

    @property
    def rho_bc(self):
        return np.conj(self.rho_cb)


def steady_state_populations(coeffs: SaturationCoefficients,
                             params: LambdaAtomParams, *,
                             eps: float = DEGENERACY_EPS) -> SteadyStateSolution:
    """Exact steady-state populations of the balanced-drive Lambda system.

    Rational functions of the saturation coefficients and the branch decay
    rate ``g = gamma_a / 2`` (decay into each ground sublevel).  The three
    numerators sum to the denominator, so ``n_a + n_b + n_c == 1``
    identically.
    """
    g = params.gamma_a / 2.0
    a_b, a_c, c = coeffs.A_b, coeffs.A_c, coeffs.C
    d = 3.0 * a_b * a_c + c * (3.0 * a_b + 3.0 * a_c + 4.0 * g) + g * (a_b + a_c)
    if np.any(np.abs(d) <= eps):
        raise DegenerateDenominator(
            "population system is singular (D = 0); no unique steady state")
    n_a = (a_b * a_c + c * (a_b + a_c)) / d
    n_b = (a_b * a_c + c * (a_b + a_c + 2.0 * g) + a_c * g) / d
    n_c = (a_b * a_c + c * (a_b + a_c + 2.0 * g) + a_b * g) / d
    return SteadyStateSolution(
        n_a=n_a, n_b=n_b, n_c=n_c,
        n_ab=-g * (a_c + 2.0 * c) / d,
        n_ca=g * (a_b + 2.0 * c) / d,
        n_cb=g * (a_b - a_c) / d,
    )


def steady_state_coherences(sol: SteadyStateSolution,
                            coeffs: SaturationCoefficients,
                            lw: ComplexLinewidths,
                            fields: FieldAmplitudes,
                            det: DetuningSet, *,
                            eps: float = DEGENERACY_EPS) -> SteadyStateSolution:
    """Fill in the optical and ground-state coherences.

    The optical coherences carry the phase of their own drive component
    (for real, balanced amplitudes this reduces to the symmetric textbook
    form).  The ground-state coherence is recovered from the two-photon
    equation ``Gamma_cb rho_cb = i rho_ca omega_minus - i rho_ab omega_plus*``;
    at ``Gamma_cb == 0`` (perfect two-photon resonance with no ground-state
    relaxation) it falls back to the eliminated closed form, which stays
    regular there.
    """
    w = coeffs.drive_squared
    delta = coeffs.delta
    gt = coeffs.gamma_tilde
    rho_ab = 1j * (lw.Gamma_cb * (lw.Gamma - 1j * delta) * sol.n_ab + sol.n_cb * w) \
        * fields.omega_minus / gt
    rho_ca = 1j * (lw.Gamma_cb * (lw.Gamma + 1j * delta) * sol.n_ca + sol.n_cb * w) \
        * np.conj(fields.omega_plus) / gt
    g_cb = np.asarray(lw.Gamma_cb)
    direct = np.abs(g_cb) > eps
    if np.all(direct):
        rho_cb = (1j * rho_ca * fields.omega_minus
                  - 1j * rho_ab * np.conj(fields.omega_plus)) / g_cb
    else:
        # eliminated form: regular at Gamma_cb = 0
        gen = (lw.Gamma_cb * lw.Gamma_ab * lw.Gamma_ca
               + np.abs(fields.omega_minus) ** 2 * lw.Gamma_ab
               + np.abs(fields.omega_plus) ** 2 * lw.Gamma_ca)
        rho_cb = -(fields.omega_minus * np.conj(fields.omega_plus)
                   * (sol.n_ca * lw.Gamma_ab - sol.n_ab * lw.Gamma_ca)) / gen
    return replace(sol, rho_ab=rho_ab, rho_ca=rho_ca, rho_cb=rho_cb)


def steady_state_response(params: LambdaAtomParams, det: DetuningSet,
                          omega_minus, omega_plus, *, raman: bool = True,
                          eps: float = DEGENERACY_EPS) -> SteadyStateSolution:
    """One-call steady state for given drive amplitudes.

    This is the quasi-static response used along the cell.  Zero-drive
    inputs (either component identically zero) take the unpumped branch:
    an even ground-state mixture with exact linear-response coherences,
    which is the correct weak-probe limit and keeps the vacuum and
    single-mode cases out of the degenerate-denominator regime.

    ``raman=False`` forces the two-photon population difference ``n_cb``
    to zero before the coherences are assembled, which disables the
    cross-mode intensity transfer while keeping plain absorption.
    """
    om = np.asarray(omega_minus, dtype=complex)
    op = np.asarray(omega_plus, dtype=complex)
    lw = complex_linewidths(params, det)
    if np.all(om == 0.0) or np.all(op == 0.0):
        shape = np.broadcast(om, op, np.asarray(det.delta)).shape
        half = np.broadcast_to(0.5, shape)
        zero = np.zeros(shape)
        sol = SteadyStateSolution(n_a=zero, n_b=half, n_c=half,
                                  n_ab=-half, n_ca=half, n_cb=zero)
        rho_ab = 1j * sol.n_ab * om / lw.Gamma_ab
        rho_ca = 1j * sol.n_ca * np.conj(op) / lw.Gamma_ca
        return replace(sol, rho_ab=rho_ab, rho_ca=rho_ca,
                       rho_cb=np.zeros(shape, dtype=complex))
    fields = FieldAmplitudes(omega_minus=om, omega_plus=op)
    coeffs = saturation_coefficients(lw, fields, det, eps=eps)
    sol = steady_state_populations(coeffs, params, eps=eps)
    if not raman:
        mean_bc = 0.5 * (sol.n_b + sol.n_c)
        sol = replace(sol, n_b=mean_bc, n_c=mean_bc,
                      n_ab=sol.n_a - mean_bc, n_ca=mean_bc - sol.n_a,
                      n_cb=np.zeros_like(np.asarray(sol.n_cb)))
    return steady_state_coherences(sol, coeffs, lw, fields, det, eps=eps)


@dataclass(frozen=True)
class ApproximateSolution:
    """Leading-order response inside the transparency window."""

    n_cb: object
    im_rho_ab: object
    im_rho_ac: object
    in_regime: object


def approximate_solution(params: LambdaAtomParams, det: DetuningSet,
                         fields: FieldAmplitudes) -> ApproximateSolution:
    """Small-signal expansion of the exact steady state.

    Valid deep inside the power-broadened transparency window:
    ``|Omega| << gamma``, ``gamma_cb << gamma``, and both the laser
    detuning ``delta`` and the ground-state splitting within
    ``|Omega|**2 / gamma``.  With ``W = 2|Omega|**2 + gamma_cb*gamma``:

    ``n_cb ~ omega_cb * delta / W``
    ``Im rho_ab = Im rho_ac ~ -(|Omega|/2) (gamma_cb W + omega_cb**2 gamma)
    / (W**2 + omega_cb**2 gamma**2)``

    The two modes' absorptive parts coincide at this order; their
    difference (the term that anti-correlates the mode intensities) is
    suppressed by a further ``omega_cb * delta / |Omega|**2``.  A
    :class:`RegimeViolation` warning is emitted when the preconditions are
    missed by more than an order of magnitude; the values are still
    returned.
    """
    gamma = params.gamma_ab
    if not np.isclose(params.gamma_ca, gamma, rtol=1e-9):
        raise InvalidParams("approximation assumes gamma_ab == gamma_ca")
    omega = np.sqrt(np.asarray(FieldAmplitudes(fields.omega_minus,
                                               fields.omega_plus).drive_squared))
    delta = np.asarray(det.delta)
    omega_cb = det.omega_cb
    o2 = omega ** 2
    window = np.where(o2 > 0, o2 / gamma, 0.0)
    w_re = 2.0 * o2 + params.gamma_cb * gamma
    n_cb = np.where(w_re > 0, omega_cb * delta / np.where(w_re > 0, w_re, 1.0), 0.0)
    denom = w_re ** 2 + (omega_cb * gamma) ** 2
    im_rho = np.where(
        denom > 0,
        -(omega / 2.0) * (params.gamma_cb * w_re + omega_cb ** 2 * gamma)
        / np.where(denom > 0, denom, 1.0),
        0.0)
    in_regime = ((omega <= 0.1 * gamma)
                 & (params.gamma_cb <= 1e-2 * gamma)
                 & (np.abs(delta) <= window)
                 & (np.abs(omega_cb) <= window))
    hard = ((omega > gamma)
            | (params.gamma_cb > 0.1 * gamma)
            | (np.abs(delta) > 10.0 * window)
            | (np.abs(omega_cb) > 10.0 * window))
    if np.any(hard):
        warnings.warn("approximate_solution evaluated far outside the "
                      "transparency-window regime", RegimeViolation, stacklevel=2)
    return ApproximateSolution(n_cb=n_cb, im_rho_ab=im_rho, im_rho_ac=im_rho,
                               in_regime=in_regime)
