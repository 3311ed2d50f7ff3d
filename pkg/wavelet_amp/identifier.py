# identifier.py

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from wavelet_amp.dictionary import Dictionary, evaluate_all
from wavelet_amp.utils.logger import logger

log = logger(__name__)

DEFAULT_EPSILON = 1e-2


class Safeguard(str, Enum):
    CLAMP = "clamp"
    SKIP = "skip"


@dataclass(frozen=True)
class RegressorConfig:
    p: int = 2
    q: int = 1

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError(f"Regressor lags must be positive, got p={self.p}, q={self.q}.")

    @property
    def dimension(self) -> int:
        return self.p + self.q


@dataclass(frozen=True)
class UpdateRecord:
    error_before: float
    selected_index: int
    correlation: float
    applied: bool
    clamped: bool = False


def build_regressor(y_history: Sequence[float], u_history: Sequence[float], config: RegressorConfig) -> np.ndarray:
    """
    Stack [y(k-1)..y(k-p), u(k-1)..u(k-q)].

    Histories are most-recent-first; entries missing during warm-up are zero.
    """
    regressor = np.zeros(config.dimension)
    outputs = list(y_history)[: config.p]
    inputs = list(u_history)[: config.q]
    regressor[: len(outputs)] = outputs
    regressor[config.p : config.p + len(inputs)] = inputs
    return regressor


def select_index(g: Sequence[float], epsilon: float) -> Tuple[int, bool]:
    """
    Index of the largest |g_i|, lowest index on ties, and whether that
    magnitude falls below epsilon.
    """
    values = np.asarray(g, dtype=float)
    if values.size == 0:
        raise ValueError("Cannot select from an empty basis response.")
    index = int(np.argmax(np.abs(values)))
    return index, bool(abs(values[index]) < epsilon)


class AmpIdentifier:
    """
    Online adaptive matching pursuit over a fixed dictionary.

    Each update corrects exactly one coefficient: the one whose atom responds
    most strongly at the current regressor, by the amount that makes the
    prediction there match the measurement.
    """

    def __init__(
        self,
        dictionary: Dictionary,
        *,
        epsilon: float = DEFAULT_EPSILON,
        safeguard: Union[Safeguard, str] = Safeguard.CLAMP,
    ):
        if not epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {epsilon}.")
        self.dictionary = dictionary
        self.epsilon = float(epsilon)
        self.safeguard = Safeguard(safeguard)
        self.theta = np.zeros(dictionary.n)
        self.last_selected: Optional[int] = None
        self.updates = 0
        self.clamped = 0
        self.skipped = 0

    def basis_response(self, regressor: Sequence[float]) -> np.ndarray:
        return evaluate_all(self.dictionary, regressor)

    def predict(self, regressor: Sequence[float]) -> float:
        """f_hat = g(phi)^T theta."""
        return self.predict_from(self.basis_response(regressor))

    def predict_from(self, g: np.ndarray) -> float:
        if g.shape != self.theta.shape:
            raise ValueError(f"Basis response has {g.size} entries, theta has {self.theta.size}.")
        return float(np.dot(g, self.theta))

    def update(self, regressor: Sequence[float], y: float) -> UpdateRecord:
        """
        Correct the single coefficient selected at this regressor.

        Below the epsilon threshold, CLAMP divides by sign(g_m) * epsilon and
        SKIP leaves theta unchanged.
        """
        if not np.isfinite(y):
            raise ValueError(f"Measurement must be finite, got {y}.")
        g = self.basis_response(regressor)
        error = y - self.predict_from(g)
        index, below = select_index(g, self.epsilon)
        correlation = float(g[index])
        self.last_selected = index
        self.updates += 1

        if not below:
            self.theta[index] += error / correlation
            return UpdateRecord(error, index, correlation, applied=True)

        if self.safeguard is Safeguard.SKIP:
            self.skipped += 1
            return UpdateRecord(error, index, correlation, applied=False)

        self.clamped += 1
        denominator = self.epsilon if correlation >= 0.0 else -self.epsilon
        self.theta[index] += error / denominator
        return UpdateRecord(error, index, correlation, applied=True, clamped=True)

    def snapshot(self) -> dict:
        """JSON-ready state for the run sidecar."""
        return {
            "theta": [float(v) for v in self.theta],
            "epsilon": self.epsilon,
            "safeguard": self.safeguard.value,
            "n": int(self.theta.size),
            "last_selected": self.last_selected,
            "updates": self.updates,
            "clamped": self.clamped,
            "skipped": self.skipped,
        }
