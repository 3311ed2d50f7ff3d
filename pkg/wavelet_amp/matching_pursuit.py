# matching_pursuit.py

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from wavelet_amp.utils.logger import logger

log = logger(__name__)

UNIT_NORM_TOLERANCE = 1e-9


class SampledDictionary:
    """
    A finite dictionary of sampled atoms, stored as the columns of an N x P matrix.

    Every column must have unit L2 norm.
    """

    def __init__(self, columns):
        matrix = np.array(columns, dtype=float)
        if matrix.ndim != 2 or matrix.shape[1] == 0 or matrix.shape[0] == 0:
            raise ValueError("The dictionary must contain at least one column of at least one sample.")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("Dictionary columns must be finite.")
        norms = np.linalg.norm(matrix, axis=0)
        for index, norm in enumerate(norms):
            if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
                raise ValueError(f"Dictionary column {index} has norm {norm!r}, expected 1.")
        matrix.setflags(write=False)
        self.matrix = matrix

    @classmethod
    def from_atoms(cls, atoms: Sequence[Sequence[float]]) -> "SampledDictionary":
        """Build from a list of atoms, each a sequence of N samples."""
        return cls(np.array(atoms, dtype=float).T)

    @classmethod
    def normalized(cls, matrix) -> "SampledDictionary":
        """Build from an N x P matrix, scaling each column to unit norm."""
        matrix = np.array(matrix, dtype=float)
        norms = np.linalg.norm(matrix, axis=0)
        if np.any(norms == 0.0):
            raise ValueError(f"Dictionary column {int(np.argmin(norms))} is identically zero.")
        return cls(matrix / norms)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def count(self) -> int:
        return self.matrix.shape[1]

    def column(self, index: int) -> np.ndarray:
        return self.matrix[:, index]


@dataclass
class MpResult:
    picks: List[Tuple[int, float]] = field(default_factory=list)
    residual: np.ndarray = field(default_factory=lambda: np.zeros(0))
    residual_norms: List[float] = field(default_factory=list)


def as_signal(values) -> np.ndarray:
    signal = np.array(values, dtype=float)
    if signal.ndim != 1 or signal.size == 0:
        raise ValueError("A sampled signal must be a non-empty 1-D sequence.")
    if not np.all(np.isfinite(signal)):
        raise ValueError("A sampled signal must be finite.")
    return signal


def decompose(f, dictionary: SampledDictionary, max_iters: int, tol: float = 0.0) -> MpResult:
    """
    Greedy matching pursuit of f over the dictionary.

    Each iteration picks the column most correlated with the residual (lowest
    index on ties), records the correlation as its coefficient and removes the
    projection. Stops once the residual norm is at most `tol` or after
    `max_iters` picks.
    """
    signal = as_signal(f)
    if signal.size != dictionary.size:
        raise ValueError(f"Dimension mismatch: signal has {signal.size} samples, atoms have {dictionary.size}.")
    if max_iters < 1:
        raise ValueError(f"max_iters must be at least 1, got {max_iters}.")
    if tol < 0:
        raise ValueError(f"tol must be non-negative, got {tol}.")

    result = MpResult(residual=signal.copy())
    residual = result.residual
    if np.linalg.norm(residual) <= tol:
        return result

    matrix = dictionary.matrix
    for _ in range(max_iters):
        inner = matrix.T @ residual
        gamma = int(np.argmax(np.abs(inner)))
        coefficient = float(inner[gamma])
        if coefficient == 0.0:
            break
        residual -= coefficient * matrix[:, gamma]
        norm = float(np.linalg.norm(residual))
        result.picks.append((gamma, coefficient))
        result.residual_norms.append(norm)
        if norm <= tol:
            break

    log.debug(f"matching pursuit: {len(result.picks)} picks, final residual {np.linalg.norm(residual):.3e}")
    return result


def reconstruct(result: MpResult, dictionary: SampledDictionary) -> np.ndarray:
    """Sum of coefficient * column over the picks."""
    approximation = np.zeros(dictionary.size)
    for index, coefficient in result.picks:
        if not 0 <= index < dictionary.count:
            raise ValueError(f"Pick index {index} is out of range for {dictionary.count} atoms.")
        approximation += coefficient * dictionary.column(index)
    return approximation
