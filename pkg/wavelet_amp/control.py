# control.py

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from wavelet_amp.utils.logger import logger

log = logger(__name__)

IMAGINARY_TOLERANCE = 1e-12


def poles_to_coefficients(poles: Sequence[complex]) -> np.ndarray:
    """
    Reference-model coefficients s for the given closed-loop poles.

    Expands prod(z - p_i) = z^n + c_1 z^(n-1) + ... + c_n and returns s_i = -c_i,
    the form used by y_m(k) = sum_i s_i y_m(k-i) + r(k).
    """
    values = [complex(p) for p in poles]
    if not values:
        raise ValueError("At least one pole is required.")
    for pole in values:
        if abs(pole) >= 1.0:
            raise ValueError(f"Pole {pole} is not strictly inside the unit circle (unstable reference model).")

    unmatched = [p for p in values if abs(p.imag) > IMAGINARY_TOLERANCE]
    while unmatched:
        pole = unmatched.pop(0)
        partner = next(
            (i for i, other in enumerate(unmatched) if abs(other - pole.conjugate()) <= IMAGINARY_TOLERANCE),
            None,
        )
        if partner is None:
            raise ValueError(f"Complex pole {pole} has no conjugate partner.")
        unmatched.pop(partner)

    polynomial = np.poly(values)
    if np.max(np.abs(np.imag(polynomial))) > IMAGINARY_TOLERANCE:
        raise ValueError("Characteristic polynomial has non-real coefficients.")
    return -np.real(polynomial[1:])


def characteristic_roots(s: Sequence[float]) -> np.ndarray:
    """Roots of h(z) = z^n - s_1 z^(n-1) - ... - s_n."""
    return np.roots(np.concatenate(([1.0], -np.asarray(s, dtype=float))))


class ReferenceModel:
    """Stable linear reference y_m(k) = sum_i s_i y_m(k-i) + r(k)."""

    def __init__(self, s: Sequence[float], history: Optional[Sequence[float]] = None):
        self.s = np.array(s, dtype=float)
        if self.s.ndim != 1 or self.s.size == 0:
            raise ValueError("Reference model needs at least one coefficient.")
        if not np.all(np.isfinite(self.s)):
            raise ValueError("Reference model coefficients must be finite.")
        roots = characteristic_roots(self.s)
        if roots.size and np.max(np.abs(roots)) >= 1.0:
            raise ValueError(
                f"Reference model is unstable: characteristic root of modulus {np.max(np.abs(roots))!r}."
            )
        self.history = np.zeros(self.s.size) if history is None else np.array(history, dtype=float)
        if self.history.shape != self.s.shape:
            raise ValueError(f"Reference history must have {self.s.size} entries, got {self.history.size}.")

    @classmethod
    def from_poles(cls, poles: Sequence[complex]) -> "ReferenceModel":
        return cls(poles_to_coefficients(poles))

    @property
    def order(self) -> int:
        return self.s.size

    def feedback(self, history: Optional[Sequence[float]] = None) -> float:
        """sum_i s_i h(k-i) over the model's own history or a supplied one."""
        values = self.history if history is None else np.asarray(history, dtype=float)
        return float(np.dot(self.s, values))

    def step(self, r: float) -> float:
        return reference_step(self, r)

    def dc_gain(self) -> float:
        return 1.0 / (1.0 - float(np.sum(self.s)))


def reference_step(model: ReferenceModel, r: float) -> float:
    """Advance the reference model one step and return y_m(k)."""
    ym = model.feedback() + r
    model.history = np.roll(model.history, 1)
    model.history[0] = ym
    return ym


@dataclass(frozen=True)
class ControlRecord:
    u: float
    f_hat: float
    r: float
    feedback_term: float


def control_law(
    f_hat: float,
    model: ReferenceModel,
    r: float,
    history: Optional[Sequence[float]] = None,
) -> ControlRecord:
    """
    Certainty-equivalence input u = -f_hat + sum_i s_i h(k-i) + r.

    `history` defaults to the reference model's own outputs; pass the plant's
    past outputs for the plant-history feedback variant.
    """
    if not math.isfinite(f_hat):
        raise ValueError(f"Model prediction is not finite: {f_hat}.")
    feedback = model.feedback(history)
    u = -f_hat + feedback + r
    return ControlRecord(u=u, f_hat=f_hat, r=r, feedback_term=feedback)


def matching_error(f_true: float, f_hat: float) -> float:
    """eta = f - f_hat."""
    return f_true - f_hat
