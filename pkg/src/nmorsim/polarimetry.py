"""Detection geometry: circular-mode intensities to analyzer channels.

The analyzer is balanced: at zero rotation both linear channels receive
half the total power (the half-wave-plate bias of the physical setup is
absorbed into the channel definition).  All functions broadcast over
arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, InvalidReference, InvalidSignals, ZeroField


@dataclass(frozen=True)
class DetectionRecord:
    """Measured channel signals plus no-absorption reference levels."""

    S1: object
    S2: object
    S01: float
    S02: float

    def __post_init__(self):
        if np.any(np.asarray(self.S1) < 0) or np.any(np.asarray(self.S2) < 0):
            raise InvalidParams("detector signals must be >= 0")


@dataclass(frozen=True)
class IntensityPair:
    """Circular-component intensities and the rotation angle."""

    I_plus: object
    I_minus: object
    phi: object

    def __post_init__(self):
        if np.any(np.asarray(self.I_plus) < 0) or np.any(np.asarray(self.I_minus) < 0):
            raise InvalidParams("intensities must be >= 0")
        if np.any(np.abs(self.phi) > np.pi / 2 + 1e-12):
            raise InvalidParams("rotation angle must lie in [-pi/2, pi/2]")


def transmission(rec: DetectionRecord):
    """T = (S1 + S2) / (S01 + S02)."""
    ref = rec.S01 + rec.S02
    if not ref > 0:
        raise InvalidReference("reference signals sum to a non-positive value")
    return (np.asarray(rec.S1) + rec.S2) / ref


def rotation_angle(s1, s2):
    """phi = arcsin((S1 - S2) / (S1 + S2)), in [-pi/2, pi/2]."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    total = s1 + s2
    if np.any(total <= 0):
        raise InvalidSignals("channel signals sum to a non-positive value")
    return np.arcsin(np.clip((s1 - s2) / total, -1.0, 1.0))


def detection_channels(pair: IntensityPair):
    """Analyzer outputs ``I_{1,2} = (I+ + I- +/- 2 sqrt(I- I+) sin phi)/2``.

    The sum of the two outputs equals the total input intensity (lossless
    splitter), and each output is non-negative for any angle.
    """
    ip = np.asarray(pair.I_plus, dtype=float)
    im = np.asarray(pair.I_minus, dtype=float)
    cross = 2.0 * np.sqrt(im * ip) * np.sin(pair.phi)
    i1 = 0.5 * (ip + im + cross)
    i2 = 0.5 * (ip + im - cross)
    return i1, i2


def rotation_from_fields(result, fields_in):
    """Rotation angle accumulated between input and output amplitudes.

    Half the differential phase picked up between the two circular
    components, wrapped into (-pi/2, pi/2] (polarization direction is
    defined modulo pi).
    """
    om_in = np.asarray(fields_in.omega_minus, dtype=complex)
    op_in = np.asarray(fields_in.omega_plus, dtype=complex)
    om_out = np.asarray(result.omega_minus_out, dtype=complex)
    op_out = np.asarray(result.omega_plus_out, dtype=complex)
    for arr, name in ((om_in, "input sigma-"), (op_in, "input sigma+"),
                      (om_out, "output sigma-"), (op_out, "output sigma+")):
        if np.any(arr == 0):
            raise ZeroField(f"{name} amplitude is zero; rotation undefined")
    rel_out = op_out * np.conj(om_out)
    rel_in = op_in * np.conj(om_in)
    return 0.5 * np.angle(rel_out * np.conj(rel_in))
