# config.py

import json
import math
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple

from wavelet_amp.dictionary import DictionarySpec, as_family_spec
from wavelet_amp.identifier import DEFAULT_EPSILON, RegressorConfig, Safeguard
from wavelet_amp.plants import ParamSchedule, plant_map
from wavelet_amp.utils.config_editor import ConfigEditor
from wavelet_amp.utils.logger import logger

log = logger(__name__)


class ConfigError(ValueError):
    pass


FAMILY_KEYS = {"family", "kind", "shifts", "scale"}

# Example 1 doubles as the base layer: every recognised key appears here.
DEFAULTS: Dict[str, Any] = {
    "plant": {
        "name": "example1",
        "schedule": {
            "kind": "linear_ramp",
            "start_value": 1.0,
            "end_value": 1.2,
            "t_start": 0.0,
            "t_end": 25.0,
        },
    },
    "dictionary": {
        "families": [
            {"family": "db2", "kind": "scaling", "shifts": 10, "scale": 1.0},
            {"family": "db3", "kind": "scaling", "shifts": 10, "scale": 1.0},
            {"family": "db2", "kind": "wavelet", "shifts": 5, "scale": 1.0},
            {"family": "db3", "kind": "wavelet", "shifts": 5, "scale": 1.0},
        ],
        "levels": 10,
        "period": 10.0,
        "scalarization": {"weights": None, "offset": 5.0},
    },
    "regressor": {"p": 2, "q": 1},
    "reference": {
        "poles": [0.5, [0.4, 0.4], [0.4, -0.4]],
        "coefficients": None,
        "signal": {"shape": "sine", "amplitude": 1.0, "frequency": 0.04},
    },
    "ts": 0.05,
    "duration": 50.0,
    "noise": {"std": 0.01, "seed": 0},
    "identifier": {"epsilon": DEFAULT_EPSILON, "safeguard": "clamp", "input_gain": 0.0},
    "feedback": "model",
    "oracle": False,
    "metrics": {"window_start": None},
}

EXAMPLE2: Dict[str, Any] = {
    "plant": {
        "name": "example2",
        "schedule": {
            "kind": "step",
            "start_value": 1.0,
            "end_value": 3.0,
            "t_start": 0.0,
            "t_end": 25.0,
        },
    },
    "dictionary": {
        "families": [{"family": "bior3.1", "kind": "scaling", "shifts": 10, "scale": 1.0}],
        # u(k-1) is mostly carried by the known input gain, so the learnt part only sees y(k-1) and y(k-2).
        "scalarization": {"weights": [0.085, -0.035, 0.0], "offset": 8.0},
    },
    "reference": {"poles": [0.4, [0.2, 0.2], [0.2, -0.2]]},
    "identifier": {"epsilon": 0.05, "input_gain": 0.9},
}

PRESETS: Dict[str, Dict[str, Any]] = {
    "example1": {},
    "example2": EXAMPLE2,
}


class FeedbackSource(str, Enum):
    MODEL = "model"
    PLANT = "plant"


class SignalShape(str, Enum):
    SINE = "sine"
    SQUARE = "square"
    CONSTANT = "constant"


@dataclass(frozen=True)
class SignalSpec:
    shape: SignalShape = SignalShape.SINE
    amplitude: float = 1.0
    frequency: float = 0.04

    def __post_init__(self):
        object.__setattr__(self, "shape", SignalShape(self.shape))

    def value(self, t: float) -> float:
        """Reference input r(t)."""
        if self.shape is SignalShape.CONSTANT:
            return self.amplitude
        phase = math.sin(2.0 * math.pi * self.frequency * t)
        if self.shape is SignalShape.SINE:
            return self.amplitude * phase
        return self.amplitude if phase >= 0.0 else -self.amplitude


@dataclass(frozen=True)
class PlantSpec:
    name: str = "example1"
    schedule: ParamSchedule = field(default_factory=ParamSchedule)


@dataclass(frozen=True)
class NoiseSpec:
    std: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class ReferenceSpec:
    poles: Tuple[complex, ...] = ()
    coefficients: Optional[Tuple[float, ...]] = None
    signal: SignalSpec = field(default_factory=SignalSpec)


@dataclass(frozen=True)
class IdentifierSpec:
    epsilon: float = DEFAULT_EPSILON
    safeguard: Safeguard = Safeguard.CLAMP
    input_gain: float = 0.0


@dataclass(frozen=True)
class SimConfig:
    plant: PlantSpec
    dictionary: DictionarySpec
    regressor: RegressorConfig
    reference: ReferenceSpec
    ts: float
    duration: float
    noise: NoiseSpec
    identifier: IdentifierSpec
    feedback: FeedbackSource = FeedbackSource.MODEL
    oracle: bool = False
    window_start: Optional[float] = None
    source: Dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.ts > 0:
            raise ConfigError(f"ts must be positive, got {self.ts}.")
        if not self.duration >= self.ts:
            raise ConfigError(f"duration {self.duration} must be at least ts {self.ts}.")
        if self.window_start is not None and not self.window_start < self.duration:
            raise ConfigError(f"metrics.window_start {self.window_start} must be before duration {self.duration}.")

    @property
    def steps(self) -> int:
        return int(round(self.duration / self.ts))

    @property
    def metrics_window_start(self) -> float:
        return self.duration / 2.0 if self.window_start is None else self.window_start

    @classmethod
    def from_dict(cls, resolved: Mapping[str, Any]) -> "SimConfig":
        try:
            return _build(resolved)
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"invalid config: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        return json.loads(json.dumps(self.source))


def parse_pole(value: Any) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    raise ConfigError(f"cannot read pole {value!r}; use a number, [re, im], or a complex string.")


def _build(resolved: Mapping[str, Any]) -> SimConfig:
    plant = resolved["plant"]
    plant_map(plant["name"])
    dictionary = resolved["dictionary"]
    scalarization = dictionary["scalarization"]
    reference = resolved["reference"]
    signal = reference["signal"]
    weights = scalarization.get("weights")
    coefficients = reference.get("coefficients")

    return SimConfig(
        plant=PlantSpec(name=plant["name"], schedule=ParamSchedule(**plant["schedule"])),
        dictionary=DictionarySpec(
            families=tuple(as_family_spec(entry) for entry in dictionary["families"]),
            levels=int(dictionary["levels"]),
            period=float(dictionary["period"]),
            weights=None if weights is None else tuple(float(w) for w in weights),
            offset=float(scalarization["offset"]),
        ),
        regressor=RegressorConfig(p=int(resolved["regressor"]["p"]), q=int(resolved["regressor"]["q"])),
        reference=ReferenceSpec(
            poles=tuple(parse_pole(p) for p in reference["poles"] or ()),
            coefficients=None if coefficients is None else tuple(float(c) for c in coefficients),
            signal=SignalSpec(
                shape=signal["shape"],
                amplitude=float(signal["amplitude"]),
                frequency=float(signal["frequency"]),
            ),
        ),
        ts=float(resolved["ts"]),
        duration=float(resolved["duration"]),
        noise=NoiseSpec(std=float(resolved["noise"]["std"]), seed=int(resolved["noise"]["seed"])),
        identifier=IdentifierSpec(
            epsilon=float(resolved["identifier"]["epsilon"]),
            safeguard=Safeguard(resolved["identifier"]["safeguard"]),
            input_gain=float(resolved["identifier"]["input_gain"]),
        ),
        feedback=FeedbackSource(resolved["feedback"]),
        oracle=bool(resolved["oracle"]),
        window_start=(
            None if resolved["metrics"]["window_start"] is None else float(resolved["metrics"]["window_start"])
        ),
        source=json.loads(json.dumps(resolved)),
    )


def check_keys(layer: Mapping[str, Any], schema: Mapping[str, Any] = DEFAULTS, prefix: str = ""):
    """Reject any key of `layer` that the defaults do not define, naming the dotted key."""
    for key, value in layer.items():
        dotted = f"{prefix}{key}"
        if key not in schema:
            raise ConfigError(f"unknown config key: {dotted}")
        expected = schema[key]
        if key == "families" and isinstance(value, list):
            for i, entry in enumerate(value):
                if not isinstance(entry, Mapping):
                    raise ConfigError(f"{dotted}[{i}] must be a mapping")
                for entry_key in entry:
                    if entry_key not in FAMILY_KEYS:
                        raise ConfigError(f"unknown config key: {dotted}[{i}].{entry_key}")
        elif isinstance(expected, Mapping):
            if not isinstance(value, Mapping):
                raise ConfigError(f"config key {dotted} must be a mapping")
            check_keys(value, expected, f"{dotted}.")


def parse_override(override: str) -> Tuple[str, Any]:
    """Split `key=value`; the value reads as a JSON literal, else as a plain string."""
    key, sep, text = override.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override must look like key=value, got {override!r}")
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        value = text
    return key, value


def resolve_config(
    preset: Optional[str] = "example1",
    config_path: Optional[str] = None,
    overrides: Sequence[str] = (),
) -> SimConfig:
    """
    Resolve defaults <- preset <- config file <- overrides into a SimConfig.
    """
    editor = ConfigEditor(DEFAULTS)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}'; choose one of {sorted(PRESETS)}")
        editor.merge_with(PRESETS[preset])

    if config_path is not None:
        if not os.path.isfile(config_path):
            raise ConfigError(f"config not found: {config_path}")
        try:
            layer = ConfigEditor.load_file(config_path)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        check_keys(layer)
        editor.merge_with(layer)

    for override in overrides:
        key, value = parse_override(override)
        try:
            editor.set_part(key, value)
        except KeyError as e:
            raise ConfigError(f"cannot set {key}: {e}") from e
    if overrides:
        check_keys(editor.config)

    log.info(f"resolved config (preset={preset}, file={config_path}, overrides={len(overrides)})")
    return SimConfig.from_dict(editor.to_dict())


def example_config(name: str = "example1", overrides: Sequence[str] = ()) -> SimConfig:
    return resolve_config(preset=name, overrides=overrides)
