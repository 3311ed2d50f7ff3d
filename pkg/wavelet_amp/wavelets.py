# wavelets.py

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Tuple, Union

import numpy as np
import pywt

from wavelet_amp.utils.logger import logger

log = logger(__name__)

SQRT2 = math.sqrt(2.0)
FILTER_TOLERANCE = 1e-12
MIN_LEVELS = 4
MAX_LEVELS = 16
DEFAULT_LEVELS = 10
SETTLE_TOLERANCE = 1e-10
MAX_SWEEPS = 200


class Family(str, Enum):
    HAAR = "haar"
    DB2 = "db2"
    DB3 = "db3"
    DB4 = "db4"
    DB5 = "db5"
    BIOR3_1 = "bior3.1"
    BIOR3_3 = "bior3.3"

    @property
    def orthogonal(self) -> bool:
        return not self.value.startswith("bior")


class Kind(str, Enum):
    SCALING = "scaling"
    WAVELET = "wavelet"


@dataclass(frozen=True)
class WaveletFilter:
    """
    Two-scale filters of a wavelet family.

    `lowpass` is the reconstruction lowpass that the scaling function refines
    with; `dual_lowpass` is the analysis lowpass in the same orientation. Both
    are equal for the orthogonal families. Biorthogonal filters are stored
    zero-padded to a common length, as PyWavelets ships them.
    """

    family: Family
    kind: Kind
    lowpass: Tuple[float, ...]
    dual_lowpass: Tuple[float, ...]

    @property
    def length(self) -> int:
        return len(self.lowpass)

    @property
    def highpass(self) -> Tuple[float, ...]:
        """Quadrature-mirror wavelet filter g_n = (-1)^n h~_{L-1-n}."""
        length = len(self.dual_lowpass)
        return tuple(
            (-1.0) ** n * self.dual_lowpass[length - 1 - n] for n in range(length)
        )


@dataclass(frozen=True, eq=False)
class TabulatedFunction:
    """Samples of a function on the uniform grid x0 + i * dx."""

    samples: np.ndarray
    x0: float = 0.0
    dx: float = 1.0
    label: str = field(default="")

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("Tabulated samples must be a non-empty 1-D sequence.")
        if not self.dx > 0:
            raise ValueError(f"Tabulation spacing dx must be positive, got {self.dx}.")
        if not np.all(np.isfinite(samples)):
            raise ValueError("Tabulated samples must all be finite.")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def x_end(self) -> float:
        return self.x0 + (self.samples.size - 1) * self.dx

    def grid(self) -> np.ndarray:
        return self.x0 + np.arange(self.samples.size) * self.dx


def validate_filter(wavelet_filter: WaveletFilter) -> WaveletFilter:
    """
    Check the two-scale normalization of a filter.

    Every lowpass must sum to sqrt(2); orthogonal lowpass filters must also have
    unit energy. Raises ValueError naming the violated sum.
    """
    name = wavelet_filter.family.value
    for label, taps in (("lowpass", wavelet_filter.lowpass), ("dual lowpass", wavelet_filter.dual_lowpass)):
        total = math.fsum(taps)
        if abs(total - SQRT2) > FILTER_TOLERANCE:
            raise ValueError(
                f"{name} {label} coefficients sum to {total!r}, expected sqrt(2) "
                f"within {FILTER_TOLERANCE}"
            )
    if wavelet_filter.family.orthogonal:
        energy = math.fsum(c * c for c in wavelet_filter.lowpass)
        if abs(energy - 1.0) > FILTER_TOLERANCE:
            raise ValueError(
                f"{name} lowpass squared coefficients sum to {energy!r}, expected 1 "
                f"within {FILTER_TOLERANCE}"
            )
    return wavelet_filter


@lru_cache(maxsize=None)
def load_filter(family: Union[Family, str], kind: Union[Kind, str] = Kind.SCALING) -> WaveletFilter:
    """Build and validate the filter pair of a shipped family from the PyWavelets tables."""
    family = Family(family)
    kind = Kind(kind)
    bank = pywt.Wavelet(family.value)
    wavelet_filter = WaveletFilter(
        family=family,
        kind=kind,
        lowpass=tuple(float(c) for c in bank.rec_lo),
        dual_lowpass=tuple(float(c) for c in reversed(bank.dec_lo)),
    )
    log.debug(f"loaded {family.value} filter, length {wavelet_filter.length}")
    return validate_filter(wavelet_filter)


def _two_scale(coefficients, samples: np.ndarray, per_unit: int) -> np.ndarray:
    """sqrt(2) * sum_n c_n f(2x - n) on the grid of `samples`; f is zero off the grid."""
    size = samples.size
    doubled = 2 * np.arange(size)
    rebuilt = np.zeros(size)
    for n, c in enumerate(coefficients):
        if c == 0.0:
            continue
        source = doubled - n * per_unit
        valid = (source >= 0) & (source < size)
        rebuilt[valid] += SQRT2 * c * samples[source[valid]]
    return rebuilt


def _scaling_samples(wavelet_filter: WaveletFilter, levels: int) -> np.ndarray:
    """Scaling-function samples from PyWavelets, reconstruction side for biorthogonal families."""
    functions = pywt.Wavelet(wavelet_filter.family.value).wavefun(level=levels)
    phi = np.asarray(functions[0] if wavelet_filter.family.orthogonal else functions[2], dtype=float)

    size = (wavelet_filter.length - 1) * 2**levels + 1
    samples = np.zeros(size)
    samples[: min(size, phi.size)] = phi[:size]
    return samples


def cascade_tabulate(wavelet_filter: WaveletFilter, levels: int = DEFAULT_LEVELS) -> TabulatedFunction:
    """
    Tabulate the scaling function or wavelet of a filter on [0, L-1] with spacing 2^-levels.

    PyWavelets' cascade gives the starting samples. They are scaled so the
    integer samples sum to one, then swept through the refinement equation on
    the same grid until the residual is below SETTLE_TOLERANCE, which makes
    every sample the refinable function's value up to rounding. The wavelet is
    psi(x) = sqrt(2) * sum_n g_n phi(2x - n) with g the quadrature-mirror filter.
    """
    if not MIN_LEVELS <= levels <= MAX_LEVELS:
        raise ValueError(f"levels must be in [{MIN_LEVELS}, {MAX_LEVELS}], got {levels}.")
    validate_filter(wavelet_filter)

    per_unit = 2**levels
    phi = _scaling_samples(wavelet_filter, levels)
    mass = math.fsum(phi[::per_unit])
    if abs(mass) < FILTER_TOLERANCE:
        raise ValueError(f"{wavelet_filter.family.value} cascade vanishes at the integer points")
    phi /= mass

    residual = math.inf
    for sweep in range(MAX_SWEEPS):
        settled = _two_scale(wavelet_filter.lowpass, phi, per_unit)
        residual = float(np.max(np.abs(settled - phi)))
        phi = settled
        if residual <= SETTLE_TOLERANCE:
            break
    else:
        log.warning(
            f"{wavelet_filter.family.value} cascade still moves by {residual:.3g} after {MAX_SWEEPS} sweeps"
        )
    log.debug(f"{wavelet_filter.family.value} cascade settled after {sweep + 1} sweeps")

    samples = phi if wavelet_filter.kind is Kind.SCALING else _two_scale(wavelet_filter.highpass, phi, per_unit)
    return TabulatedFunction(
        samples=samples,
        x0=0.0,
        dx=1.0 / per_unit,
        label=f"{wavelet_filter.family.value}-{wavelet_filter.kind.value}",
    )


def refinement_residual(tabulated: TabulatedFunction, lowpass) -> float:
    """
    Largest |phi(x) - sqrt(2) * sum_n h_n phi(2x - n)| over the tabulation grid.

    Only meaningful for a scaling-function tabulation starting at x0 = 0 on a
    dyadic grid.
    """
    per_unit = int(round(1.0 / tabulated.dx))
    rebuilt = _two_scale(lowpass, tabulated.samples, per_unit)
    return float(np.max(np.abs(tabulated.samples - rebuilt)))


def partition_of_unity_error(tabulated: TabulatedFunction) -> float:
    """Largest |sum_k phi(x - k) - 1| over one unit cell of the tabulation grid."""
    per_unit = int(round(1.0 / tabulated.dx))
    samples = tabulated.samples
    padded_size = -(-samples.size // per_unit) * per_unit
    padded = np.zeros(padded_size)
    padded[: samples.size] = samples
    sums = padded.reshape(-1, per_unit).sum(axis=0)
    return float(np.max(np.abs(sums - 1.0)))
