# plants.py

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Tuple

import numpy as np

from wavelet_amp.utils.logger import logger

log = logger(__name__)

PlantMap = Callable[[float, float, float, float], float]


class ScheduleKind(str, Enum):
    CONSTANT = "constant"
    LINEAR_RAMP = "linear_ramp"
    STEP = "step"


@dataclass(frozen=True)
class ParamSchedule:
    """Time-varying plant parameter a(t)."""

    kind: ScheduleKind = ScheduleKind.CONSTANT
    start_value: float = 1.0
    end_value: float = 1.0
    t_start: float = 0.0
    t_end: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ScheduleKind(self.kind))
        if self.t_start > self.t_end:
            raise ValueError(f"Schedule t_start {self.t_start} is after t_end {self.t_end}.")
        if not (math.isfinite(self.start_value) and math.isfinite(self.end_value)):
            raise ValueError("Schedule values must be finite.")

    def __call__(self, t: float) -> float:
        return schedule_value(self, t)


def schedule_value(schedule: ParamSchedule, t: float) -> float:
    """
    a(t) for the schedule.

    LINEAR_RAMP interpolates on [t_start, t_end] and holds the end values
    outside it; STEP switches to end_value at t_end.
    """
    if schedule.kind is ScheduleKind.CONSTANT:
        return schedule.start_value
    if schedule.kind is ScheduleKind.STEP:
        return schedule.start_value if t < schedule.t_end else schedule.end_value
    if t <= schedule.t_start:
        return schedule.start_value
    if t >= schedule.t_end:
        return schedule.end_value
    fraction = (t - schedule.t_start) / (schedule.t_end - schedule.t_start)
    return schedule.start_value + fraction * (schedule.end_value - schedule.start_value)


class NoiseSource:
    """
    White Gaussian measurement noise.

    Samples come from numpy's PCG64 generator (`numpy.random.default_rng(seed)`),
    one `standard_normal()` draw per sample scaled by std; this stream is part
    of the golden-trace contract. A zero std yields exact zeros and draws nothing.
    """

    def __init__(self, std: float = 0.0, seed: int = 0):
        if not std >= 0:
            raise ValueError(f"Noise std must be non-negative, got {std}.")
        if seed < 0:
            raise ValueError(f"Noise seed must be non-negative, got {seed}.")
        self.std = float(std)
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)

    def next(self) -> float:
        return noise_next(self)


def noise_next(source: NoiseSource) -> float:
    if source.std == 0.0:
        return 0.0
    return source.std * float(source._rng.standard_normal())


def f1_eval(y1: float, y2: float, u1: float, a: float) -> float:
    """y1 (a u1 y2 + 2.5) / (1 + y1^2 + y2^2 + u1^2)."""
    return y1 * (a * u1 * y2 + 2.5) / (1.0 + y1 * y1 + y2 * y2 + u1 * u1)


def f2_eval(y1: float, y2: float, u1: float, a: float) -> float:
    """Second benchmark map; the u(k-1) term is part of f."""
    decay = math.exp(-y1 * y1)
    return (
        (0.8 - 0.5 * decay) * y1 * a
        - (0.3 + 0.9 * decay) * y2
        + 0.1 * math.sin(math.pi * y1)
        + u1
    )


PLANTS: Dict[str, PlantMap] = {
    "example1": f1_eval,
    "example2": f2_eval,
}


def plant_map(name: str) -> PlantMap:
    try:
        return PLANTS[name]
    except KeyError:
        raise ValueError(f"Unknown plant '{name}'; choose one of {sorted(PLANTS)}.") from None


@dataclass
class PlantState:
    """Histories are most-recent-first: y_history = [y(k-1), y(k-2)], u_history = [u(k-1)]."""

    schedule: ParamSchedule
    noise: NoiseSource
    ts: float
    y_history: List[float] = field(default_factory=lambda: [0.0, 0.0])
    u_history: List[float] = field(default_factory=lambda: [0.0])
    k: int = 0
    last_noise: float = 0.0
    last_a: float = 0.0

    @property
    def t(self) -> float:
        return self.k * self.ts


def plant_f(state: PlantState, f_eval: PlantMap) -> Tuple[float, float]:
    """f at the current step and the parameter value used, without advancing."""
    a = schedule_value(state.schedule, state.t)
    return f_eval(state.y_history[0], state.y_history[1], state.u_history[0], a), a


def plant_step(state: PlantState, u: float, f_eval: PlantMap) -> Tuple[float, float]:
    """
    Apply u: y(k) = f(y(k-1), y(k-2), u(k-1); a(t)) + u(k) + n(k).

    Returns (y, f_true) and advances the histories and time by one sample.
    """
    if not math.isfinite(u):
        raise ValueError(f"Plant input is not finite at step {state.k}: {u}.")
    f_true, a = plant_f(state, f_eval)
    noise = noise_next(state.noise)
    y = f_true + u + noise

    state.y_history = [y] + state.y_history[:-1]
    state.u_history = [u] + state.u_history[:-1]
    state.last_noise = noise
    state.last_a = a
    state.k += 1
    return y, f_true
