# simulation.py

import math
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from wavelet_amp.config import FeedbackSource, SimConfig
from wavelet_amp.control import ReferenceModel, control_law, matching_error, reference_step
from wavelet_amp.dictionary import Dictionary, build_dictionary
from wavelet_amp.identifier import AmpIdentifier, build_regressor
from wavelet_amp.plants import NoiseSource, PlantState, plant_f, plant_map, plant_step
from wavelet_amp.utils.logger import logger

log = logger(__name__)

TRACE_COLUMNS = (
    "k", "t", "r", "ym", "y", "u", "f_true", "f_hat", "eta", "e", "selected_index", "a", "applied",
)


class SimulationHalted(RuntimeError):
    """A closed-loop quantity became non-finite."""

    def __init__(self, step: int, quantity: str, value: float, trace: List["TraceRow"]):
        super().__init__(f"run halted at step {step}: {quantity} is {value}")
        self.step = step
        self.quantity = quantity
        self.value = value
        self.trace = trace


@dataclass(frozen=True)
class TraceRow:
    k: int
    t: float
    r: float
    ym: float
    y: float
    u: float
    f_true: float
    f_hat: float
    eta: float
    e: float
    selected_index: Optional[int]
    a: float
    applied: bool

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in TRACE_COLUMNS}


@dataclass(frozen=True)
class Metrics:
    tracking_rmse: float
    identification_rmse: float
    max_abs_u: float
    max_abs_y: float
    u_variation_rms: float = 0.0
    skipped_updates: int = 0

    def as_dict(self) -> dict:
        return {
            "tracking_rmse": self.tracking_rmse,
            "identification_rmse": self.identification_rmse,
            "max_abs_u": self.max_abs_u,
            "max_abs_y": self.max_abs_y,
            "u_variation_rms": self.u_variation_rms,
            "skipped_updates": self.skipped_updates,
        }


@dataclass
class RunResult:
    trace: List[TraceRow]
    metrics: Metrics
    reference_coefficients: List[float]
    dictionary: Dictionary
    identifier: AmpIdentifier
    elapsed: float


def reference_model_for(config: SimConfig) -> ReferenceModel:
    if config.reference.coefficients is not None:
        return ReferenceModel(config.reference.coefficients)
    return ReferenceModel.from_poles(config.reference.poles)


def _finite(step: int, quantity: str, value: float, trace: List[TraceRow]) -> float:
    if not math.isfinite(value):
        log.error(f"non-finite {quantity} at step {step}: {value}")
        raise SimulationHalted(step, quantity, value, trace)
    return value


def simulate(config: SimConfig) -> RunResult:
    """
    Run the closed loop and keep everything needed for the run sidecar.

    Step order per k: reference input, reference model, regressor, prediction
    (or the true f in oracle mode), control input, plant, identifier update on
    y - u, trace row. Reordering changes the traces.

    With a non-zero identifier input gain c the estimate is c * u(k-1) plus the
    dictionary expansion, and the identifier only learns y - u - c * u(k-1).
    """
    started = time.perf_counter()
    model = reference_model_for(config)
    dictionary = build_dictionary(config.dictionary, regressor_dim=config.regressor.dimension)
    identifier = AmpIdentifier(
        dictionary, epsilon=config.identifier.epsilon, safeguard=config.identifier.safeguard
    )
    f_eval = plant_map(config.plant.name)
    input_gain = config.identifier.input_gain
    plant = PlantState(
        schedule=config.plant.schedule,
        noise=NoiseSource(config.noise.std, config.noise.seed),
        ts=config.ts,
    )

    depth = max(config.regressor.p, config.regressor.q, model.order)
    y_history: deque = deque([0.0] * depth, maxlen=depth)
    u_history: deque = deque([0.0] * depth, maxlen=depth)

    trace: List[TraceRow] = []
    for k in range(config.steps):
        t = k * config.ts
        r = config.reference.signal.value(t)

        ym_history = model.history.copy()
        ym = _finite(k, "ym", reference_step(model, r), trace)

        regressor = build_regressor(y_history, u_history, config.regressor)
        known = input_gain * u_history[0]
        if config.oracle:
            f_hat, _ = plant_f(plant, f_eval)
        else:
            f_hat = _finite(k, "f_hat", known + identifier.predict(regressor), trace)

        if config.feedback is FeedbackSource.MODEL:
            feedback_history = ym_history
        else:
            feedback_history = list(y_history)[: model.order]
        control = control_law(f_hat, model, r, history=feedback_history)
        u = _finite(k, "u", control.u, trace)

        y, f_true = plant_step(plant, u, f_eval)
        _finite(k, "y", y, trace)

        update = identifier.update(regressor, y - u - known)
        if not np.all(np.isfinite(identifier.theta)):
            _finite(k, f"theta[{update.selected_index}]", float(identifier.theta[update.selected_index]), trace)

        trace.append(
            TraceRow(
                k=k,
                t=t,
                r=r,
                ym=ym,
                y=y,
                u=u,
                f_true=f_true,
                f_hat=f_hat,
                eta=matching_error(f_true, f_hat),
                e=ym - y,
                selected_index=update.selected_index,
                a=plant.last_a,
                applied=update.applied,
            )
        )
        y_history.appendleft(y)
        u_history.appendleft(u)

    metrics = compute_metrics(trace, config.metrics_window_start)
    elapsed = time.perf_counter() - started
    if identifier.clamped or identifier.skipped:
        log.warning(
            f"epsilon safeguard active: {identifier.clamped} clamped, {identifier.skipped} skipped "
            f"of {identifier.updates} updates"
        )
    log.info(f"closed loop finished: {len(trace)} steps in {elapsed:.3f}s, tracking rmse {metrics.tracking_rmse:.4g}")
    return RunResult(
        trace=trace,
        metrics=metrics,
        reference_coefficients=[float(s) for s in model.s],
        dictionary=dictionary,
        identifier=identifier,
        elapsed=elapsed,
    )


def run_closed_loop(config: SimConfig) -> Tuple[List[TraceRow], Metrics]:
    result = simulate(config)
    return result.trace, result.metrics


def _rms(values: Sequence[float]) -> float:
    return math.sqrt(math.fsum(v * v for v in values) / len(values))


def compute_metrics(trace: Sequence[TraceRow], window_start: float) -> Metrics:
    """
    RMS tracking and identification errors over rows with t >= window_start;
    input and output maxima over the whole trace.
    """
    window = [row for row in trace if row.t >= window_start]
    if not window:
        raise ValueError(f"metrics window starting at t={window_start} contains no trace rows.")

    variations = [b.u - a.u for a, b in zip(window, window[1:])]
    return Metrics(
        tracking_rmse=_rms([row.e for row in window]),
        identification_rmse=_rms([row.eta for row in window]),
        max_abs_u=max(abs(row.u) for row in trace),
        max_abs_y=max(abs(row.y) for row in trace),
        u_variation_rms=_rms(variations) if variations else 0.0,
        skipped_updates=sum(1 for row in trace if not row.applied),
    )


def run_sweep(
    configs: Mapping[str, SimConfig], parallel: bool = False, max_workers: Optional[int] = None
) -> Dict[str, Tuple[List[TraceRow], Metrics]]:
    """
    Run independent closed loops and merge the results by run identifier.

    With `parallel`, runs execute in a process pool; results are identical to
    sequential execution since runs share no state.
    """
    run_ids = sorted(configs)
    if not parallel:
        return {run_id: run_closed_loop(configs[run_id]) for run_id in run_ids}

    with ProcessPoolExecutor(max_workers=max_workers) as executor:
        futures = {run_id: executor.submit(run_closed_loop, configs[run_id]) for run_id in run_ids}
        return {run_id: futures[run_id].result() for run_id in run_ids}
