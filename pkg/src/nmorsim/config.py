"""Experiment configuration: YAML schema, defaults, unit conversion.

Config files use laboratory units (MHz, gauss, cm, microseconds); the
boundary converts everything to internal angular frequencies (rad/s) and
SI lengths/times.  Unknown keys are rejected so typos cannot silently
fall back to defaults.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np
import yaml

from .atom import LambdaAtomParams
from .cell import CellParams
from .errors import ConfigError
from .noise import NoiseParams

MHZ = 2.0 * np.pi * 1e6
US = 1e-6
CM = 1e-2


@dataclass(frozen=True)
class AtomSection:
    gamma_a_mhz: float = 6.0
    gamma_optical_mhz: float = 3.0
    gamma_cb_mhz: float = 0.002


@dataclass(frozen=True)
class LaserSection:
    rabi_mhz: float = 1.0
    linewidth_mhz: float = 1.0
    carrier_detuning_mhz: float = 0.0


@dataclass(frozen=True)
class NoiseSection:
    correlation_time_us: float = 0.25
    realizations: int = 32


@dataclass(frozen=True)
class CellSection:
    length_cm: float = 7.5
    optical_depth: float = 10.0
    density_per_cm3: float = 1.0e12
    n_slabs: int = 64
    adaptive_slabs: bool = True
    thin_medium: bool = False


@dataclass(frozen=True)
class SweepSection:
    b_min_gauss: float = -1.0
    b_max_gauss: float = 1.0
    b_step_gauss: float = 0.05


@dataclass(frozen=True)
class TraceSection:
    duration_us: float = 20.0
    dt_us: float = 0.01
    window_us: float = 2.0
    tau_max_us: float = 1.5


@dataclass(frozen=True)
class OutputSection:
    dir: str = "nmorsim-out"
    variant: str = "derived"
    phi_offset_rad: float = 0.0


_SECTIONS = {
    "atom": AtomSection,
    "laser": LaserSection,
    "noise": NoiseSection,
    "cell": CellSection,
    "sweep": SweepSection,
    "trace": TraceSection,
    "output": OutputSection,
}


@dataclass(frozen=True)
class ExperimentConfig:
    atom: AtomSection = field(default_factory=AtomSection)
    laser: LaserSection = field(default_factory=LaserSection)
    noise: NoiseSection = field(default_factory=NoiseSection)
    cell: CellSection = field(default_factory=CellSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    trace: TraceSection = field(default_factory=TraceSection)
    output: OutputSection = field(default_factory=OutputSection)
    seed: int = 20070205

    def __post_init__(self):
        _positive = {
            "atom.gamma_a_mhz": self.atom.gamma_a_mhz,
            "atom.gamma_optical_mhz": self.atom.gamma_optical_mhz,
            "noise.correlation_time_us": self.noise.correlation_time_us,
            "cell.length_cm": self.cell.length_cm,
            "sweep.b_step_gauss": self.sweep.b_step_gauss,
            "trace.duration_us": self.trace.duration_us,
            "trace.dt_us": self.trace.dt_us,
            "trace.window_us": self.trace.window_us,
        }
        for name, value in _positive.items():
            if not value > 0:
                raise ConfigError(f"{name} must be positive")
        _nonneg = {
            "atom.gamma_cb_mhz": self.atom.gamma_cb_mhz,
            "laser.rabi_mhz": self.laser.rabi_mhz,
            "laser.linewidth_mhz": self.laser.linewidth_mhz,
            "cell.optical_depth": self.cell.optical_depth,
            "cell.density_per_cm3": self.cell.density_per_cm3,
            "trace.tau_max_us": self.trace.tau_max_us,
        }
        for name, value in _nonneg.items():
            if value < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.noise.realizations < 1:
            raise ConfigError("noise.realizations must be >= 1")
        if self.cell.n_slabs < 1:
            raise ConfigError("cell.n_slabs must be >= 1")
        if self.sweep.b_max_gauss < self.sweep.b_min_gauss:
            raise ConfigError("sweep.b_max_gauss must be >= b_min_gauss")
        if self.output.variant not in ("paper", "derived"):
            raise ConfigError("output.variant must be 'paper' or 'derived'")
        if self.trace.window_us < 2.0 * self.trace.dt_us:
            raise ConfigError("trace.window_us must cover at least two samples")
        if self.atom.gamma_optical_mhz < self.atom.gamma_a_mhz / 2.0:
            raise ConfigError("atom.gamma_optical_mhz must be >= gamma_a_mhz/2")

    # ---- derived physical objects -------------------------------------

    def atom_params(self) -> LambdaAtomParams:
        """Zero-field atom with the line center at frequency offset 0."""
        return LambdaAtomParams.degenerate(
            gamma=self.atom.gamma_optical_mhz * MHZ,
            gamma_cb=self.atom.gamma_cb_mhz * MHZ,
            gamma_a=self.atom.gamma_a_mhz * MHZ)

    def cell_params(self) -> CellParams:
        return CellParams.from_optical_depth(
            optical_depth=self.cell.optical_depth,
            length=self.cell.length_cm * CM,
            gamma=self.atom.gamma_optical_mhz * MHZ,
            density=self.cell.density_per_cm3 * 1e6,
            n_slabs=1 if self.cell.thin_medium else self.cell.n_slabs)

    def noise_params(self, seed: int) -> NoiseParams:
        return NoiseParams(linewidth=self.laser.linewidth_mhz * MHZ,
                           correlation_time=self.noise.correlation_time_us * US,
                           seed=seed, dt=self.trace.dt_us * US,
                           n_samples=self.n_samples)

    @property
    def rabi(self) -> float:
        return self.laser.rabi_mhz * MHZ

    @property
    def carrier_detuning(self) -> float:
        return self.laser.carrier_detuning_mhz * MHZ

    @property
    def n_samples(self) -> int:
        return max(2, int(round(self.trace.duration_us / self.trace.dt_us)))

    @property
    def dt(self) -> float:
        return self.trace.dt_us * US

    @property
    def window(self) -> float:
        return self.trace.window_us * US

    def b_grid(self) -> np.ndarray:
        sw = self.sweep
        n = int(round((sw.b_max_gauss - sw.b_min_gauss) / sw.b_step_gauss)) + 1
        return sw.b_min_gauss + sw.b_step_gauss * np.arange(n)

    # ---- (de)serialization ---------------------------------------------

    def to_dict(self) -> dict:
        return asdict(self)

    def sha256(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()


def _build_section(cls, data, prefix):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"section '{prefix}' must be a mapping")
    known = cls.__dataclass_fields__
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"unknown key(s) in '{prefix}': {sorted(unknown)}")
    coerced = {}
    for key, value in data.items():
        target = known[key].type
        try:
            if target == "int":
                if isinstance(value, float) and not value.is_integer():
                    raise ConfigError(f"{prefix}.{key} must be an integer")
                coerced[key] = int(value)
            elif target == "float":
                coerced[key] = float(value)
            elif target == "bool":
                if not isinstance(value, bool):
                    raise ConfigError(f"{prefix}.{key} must be a boolean")
                coerced[key] = value
            else:
                coerced[key] = str(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{prefix}.{key}: {exc}") from exc
    return cls(**coerced)


def config_from_dict(data: dict) -> ExperimentConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("top-level config must be a mapping")
    unknown = set(data) - set(_SECTIONS) - {"seed"}
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {sorted(unknown)}")
    kwargs = {name: _build_section(cls, data.get(name), name)
              for name, cls in _SECTIONS.items()}
    seed = data.get("seed", ExperimentConfig.seed)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    return ExperimentConfig(seed=seed, **kwargs)


def load_config(path) -> ExperimentConfig:
    """Parse and validate a YAML config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    return config_from_dict(data)


DEFAULT_CONFIG_YAML = """\
# nmorsim experiment configuration (laboratory units)

atom:
  gamma_a_mhz: 6.0          # total excited-state decay rate / 2pi
  gamma_optical_mhz: 3.0    # optical coherence decay, both arms
  gamma_cb_mhz: 0.002       # ground-state coherence decay

laser:
  rabi_mhz: 1.0             # Rabi frequency of each circular component
  linewidth_mhz: 1.0        # laser FWHM driving the phase diffusion
  carrier_detuning_mhz: 0.0 # carrier offset from the line center

noise:
  correlation_time_us: 0.25 # frequency-noise correlation time
  realizations: 32          # noise realizations per sweep point

cell:
  length_cm: 7.5
  optical_depth: 10.0       # resonant intensity OD at full ground population
  density_per_cm3: 1.0e12   # bookkeeping only; coupling comes from the OD
  n_slabs: 64
  adaptive_slabs: true
  thin_medium: false        # true = single-slab response

sweep:
  b_min_gauss: -1.0
  b_max_gauss: 1.0
  b_step_gauss: 0.05

trace:
  duration_us: 20.0
  dt_us: 0.01
  window_us: 2.0            # sliding window for fluctuation extraction
  tau_max_us: 1.5

output:
  dir: nmorsim-out
  variant: derived          # closed-form numerator: derived | paper
  phi_offset_rad: 0.0       # constant background rotation

seed: 20070205
"""
