# dictionary.py

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from wavelet_amp.utils.logger import logger
from wavelet_amp.wavelets import (
    DEFAULT_LEVELS,
    Family,
    Kind,
    TabulatedFunction,
    cascade_tabulate,
    load_filter,
)

log = logger(__name__)

PERIOD = 10.0
DEFAULT_OFFSET = 5.0
COVERAGE_STEP = 0.01
COVERAGE_THRESHOLD = 1e-6


@dataclass(frozen=True, eq=False)
class Atom:
    """A shifted, scaled, unit-norm tabulated shape, periodic with `period`."""

    shape: TabulatedFunction
    shift: float
    scale: float
    norm_constant: float
    period: float = PERIOD
    family: str = ""
    kind: str = ""

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"Atom scale must be positive, got {self.scale}.")
        if not self.norm_constant > 0:
            raise ValueError(f"Atom norm constant must be positive, got {self.norm_constant}.")
        if self.shape.x_end * self.scale > self.period:
            raise ValueError(
                f"Atom support {self.shape.x_end * self.scale} is wider than the period {self.period}."
            )

    def __call__(self, x: float) -> float:
        return atom_eval(self, x)


@dataclass(frozen=True)
class ScalarizationMap:
    """Affine map from a regressor vector to a point of the periodic domain."""

    weights: Tuple[float, ...]
    offset: float = DEFAULT_OFFSET
    period: float = PERIOD

    @classmethod
    def uniform(cls, dimension: int, offset: float = DEFAULT_OFFSET, period: float = PERIOD) -> "ScalarizationMap":
        if dimension < 1:
            raise ValueError(f"Regressor dimension must be at least 1, got {dimension}.")
        return cls(weights=tuple([1.0 / dimension] * dimension), offset=offset, period=period)


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    kind: Kind
    shifts: int
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.shifts < 1:
            raise ValueError(f"{self.family.value} {self.kind.value}: shifts must be at least 1.")
        if not self.scale > 0:
            raise ValueError(f"{self.family.value} {self.kind.value}: scale must be positive.")


@dataclass(frozen=True)
class DictionarySpec:
    families: Tuple[FamilySpec, ...]
    levels: int = DEFAULT_LEVELS
    period: float = PERIOD
    weights: Optional[Tuple[float, ...]] = None
    offset: float = DEFAULT_OFFSET


@dataclass(frozen=True, eq=False)
class Dictionary:
    atoms: Tuple[Atom, ...]
    scalarization: ScalarizationMap
    period: float = PERIOD
    spec: Optional[DictionarySpec] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.atoms)

    def evaluate_all(self, regressor: Sequence[float]) -> np.ndarray:
        return evaluate_all(self, regressor)

    def evaluate_at(self, x: float) -> np.ndarray:
        """Every atom at a point of the periodic domain."""
        return np.array([atom_eval(atom, x) for atom in self.atoms])

    def coverage_gaps(
        self, step: float = COVERAGE_STEP, threshold: float = COVERAGE_THRESHOLD
    ) -> List[Tuple[float, float]]:
        """Ranges of the grid over [0, period) where no atom exceeds the threshold."""
        grid = np.arange(int(round(self.period / step))) * step
        values = np.array([[abs(atom_eval(atom, x)) for atom in self.atoms] for x in grid])
        covered = values.max(axis=1) > threshold

        gaps = []
        start = None
        for x, ok in zip(grid, covered):
            if not ok and start is None:
                start = x
            elif ok and start is not None:
                gaps.append((float(start), float(x - step)))
                start = None
        if start is not None:
            gaps.append((float(start), float(grid[-1])))
        return gaps

    def summary(self) -> List[dict]:
        return [
            {
                "index": index,
                "family": atom.family,
                "kind": atom.kind,
                "shift": atom.shift,
                "scale": atom.scale,
                "norm_constant": atom.norm_constant,
            }
            for index, atom in enumerate(self.atoms)
        ]


def atom_eval(atom: Atom, x: float) -> float:
    """
    Evaluate an atom at any finite x.

    x is wrapped into [0, period) first, then measured from the atom's shift
    (wrapping again, so supports may straddle the period end) and linearly
    interpolated in the tabulation. Zero outside the support.
    """
    period = atom.period
    wrapped = x % period
    if wrapped >= period:
        wrapped -= period
    local = wrapped - atom.shift
    if local < 0.0:
        local += period

    shape = atom.shape
    position = (local / atom.scale - shape.x0) / shape.dx
    if position < 0.0:
        return 0.0
    last = shape.samples.size - 1
    index = int(position)
    if index >= last:
        return atom.norm_constant * float(shape.samples[last]) if position == last else 0.0
    frac = position - index
    samples = shape.samples
    return atom.norm_constant * ((1.0 - frac) * float(samples[index]) + frac * float(samples[index + 1]))


def atom_norm(atom: Atom) -> float:
    """Discrete L2 norm of the atom over one period."""
    samples = atom.norm_constant * atom.shape.samples
    return math.sqrt(math.fsum(samples * samples) * atom.shape.dx * atom.scale)


def scalarize(scalarization: ScalarizationMap, regressor: Sequence[float]) -> float:
    """Map a regressor to mod(sum_i w_i phi_i + offset, period)."""
    values = np.asarray(regressor, dtype=float)
    if values.shape != (len(scalarization.weights),):
        raise ValueError(
            f"Regressor length {values.size} does not match {len(scalarization.weights)} scalarization weights."
        )
    point = (float(np.dot(scalarization.weights, values)) + scalarization.offset) % scalarization.period
    if point >= scalarization.period:
        point -= scalarization.period
    return point


def evaluate_all(dictionary: Dictionary, regressor: Sequence[float]) -> np.ndarray:
    """The basis response vector: every atom at the scalarized regressor."""
    return dictionary.evaluate_at(scalarize(dictionary.scalarization, regressor))


@lru_cache(maxsize=None)
def _tabulate(family: Family, kind: Kind, levels: int) -> TabulatedFunction:
    return cascade_tabulate(load_filter(family, kind), levels)


def build_dictionary(
    spec: DictionarySpec,
    regressor_dim: int = 1,
    minimum: Optional[int] = None,
) -> Dictionary:
    """
    Build the dictionary described by `spec`.

    Atoms are ordered family-major, shift-minor. Each family entry places
    `shifts` copies of its shape uniformly over [0, period). Raises ValueError
    when fewer than `minimum` atoms result (default: the regressor dimension)
    or when part of the period is left uncovered.
    """
    minimum = regressor_dim if minimum is None else minimum
    if spec.weights is None:
        scalarization = ScalarizationMap.uniform(regressor_dim, offset=spec.offset, period=spec.period)
    else:
        scalarization = ScalarizationMap(tuple(spec.weights), offset=spec.offset, period=spec.period)
        if len(scalarization.weights) != regressor_dim:
            raise ValueError(
                f"{len(scalarization.weights)} scalarization weights for a regressor of dimension {regressor_dim}."
            )

    atoms = []
    for family_spec in spec.families:
        shape = _tabulate(family_spec.family, family_spec.kind, spec.levels)
        energy = math.fsum(shape.samples * shape.samples) * shape.dx * family_spec.scale
        norm_constant = 1.0 / math.sqrt(energy)
        spacing = spec.period / family_spec.shifts
        for i in range(family_spec.shifts):
            atoms.append(
                Atom(
                    shape=shape,
                    shift=i * spacing,
                    scale=family_spec.scale,
                    norm_constant=norm_constant,
                    period=spec.period,
                    family=family_spec.family.value,
                    kind=family_spec.kind.value,
                )
            )

    if len(atoms) < minimum:
        raise ValueError(f"insufficient atoms: {len(atoms)} built, at least {minimum} required.")

    dictionary = Dictionary(atoms=tuple(atoms), scalarization=scalarization, period=spec.period, spec=spec)
    gaps = dictionary.coverage_gaps()
    if gaps:
        ranges = ", ".join(f"[{start:.2f}, {end:.2f}]" for start, end in gaps)
        log.error(f"dictionary leaves part of the period uncovered: {ranges}")
        raise ValueError(f"dictionary does not cover x in {ranges}")

    log.debug(f"built dictionary with {dictionary.n} atoms from {len(spec.families)} families")
    return dictionary


def tabulate_atoms(dictionary: Dictionary, step: float = COVERAGE_STEP) -> Tuple[np.ndarray, np.ndarray]:
    """Grid over one period and the atom values on it, one column per atom."""
    grid = np.arange(int(round(dictionary.period / step))) * step
    values = np.array([dictionary.evaluate_at(x) for x in grid])
    return grid, values


def as_family_spec(entry: Union[FamilySpec, dict]) -> FamilySpec:
    if isinstance(entry, FamilySpec):
        return entry
    return FamilySpec(
        family=entry["family"],
        kind=entry.get("kind", Kind.SCALING),
        shifts=int(entry["shifts"]),
        scale=float(entry.get("scale", 1.0)),
    )
