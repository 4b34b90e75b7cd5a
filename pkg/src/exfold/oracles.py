"""Brute-force reference oracles for the five thermodynamic problems.

The partition function is kept exact by replacing the transcendental
Boltzmann factor per quantum, e**(delta/kT), with a positive rational base
b != 1: a structure at g quanta contributes b**(-g).  Every identity the
reductions rely on is algebra over these weights, so the substitution keeps
all of them bit-exact.  A decimal rendering exists for display only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exactmath import rat_from_str, rat_pow, rat_to_str
from .strands import (
    DEFAULT_PAIR_BUDGET,
    InvalidInput,
    SecondaryStructure,
    StrandSystem,
    StructureSpace,
    enumerate_structures,
)
from .energy import EnergyModel, energy


def check_base(base: Fraction) -> Fraction:
    base = Fraction(base)
    if base <= 0 or base == 1:
        raise InvalidInput("Boltzmann base must be positive and != 1")
    return base


@dataclass(frozen=True)
class DensityOfStates:
    """Exact histogram: energy level (quanta) -> number of structures."""

    counts: dict
    delta: Fraction
    space: Optional[StructureSpace] = None

    def total(self) -> int:
        return sum(self.counts.values())

    def mfe(self) -> int:
        return min(self.counts)

    def levels(self) -> tuple[int, ...]:
        return tuple(sorted(self.counts))

    def ssel(self, level_quanta) -> int:
        return self.counts.get(level_quanta, 0)

    def pf(self, base: Fraction, magnification: int = 1) -> Fraction:
        base = check_base(base)
        return sum(
            (count * rat_pow(base, -magnification * g) for g, count in self.counts.items()),
            Fraction(0),
        )

    def magnified(self, j: int) -> "DensityOfStates":
        if j <= 0:
            raise InvalidInput("magnification must be a positive integer")
        return DensityOfStates({g * j: c for g, c in self.counts.items()},
                               self.delta, self.space)

    def to_json(self) -> str:
        payload = {
            "delta": rat_to_str(self.delta),
            "counts": {str(g): str(c) for g, c in sorted(self.counts.items())},
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DensityOfStates":
        payload = json.loads(text)
        counts = {int(g): int(c) for g, c in payload["counts"].items()}
        return cls(counts, rat_from_str(payload["delta"]))


def dos_brute(system: StrandSystem, space: StructureSpace, model: EnergyModel,
              budget: int = DEFAULT_PAIR_BUDGET,
              fixed_ordering: Optional[Sequence[int]] = None) -> DensityOfStates:
    """Exhaustive density of states over the space."""
    counts: dict[int, int] = {}
    for structure in enumerate_structures(system, space, budget, fixed_ordering):
        g = energy(model, system, structure,
                   ordering=tuple(fixed_ordering) if fixed_ordering else None)
        counts[g] = counts.get(g, 0) + 1
    return DensityOfStates(counts, model.delta, space)


def mfe_brute(system, space, model, budget: int = DEFAULT_PAIR_BUDGET) -> int:
    return dos_brute(system, space, model, budget).mfe()


def pf_exact(dos: DensityOfStates, base: Fraction) -> Fraction:
    return dos.pf(base)


def ssel_brute(system, space, model, level_quanta, budget: int = DEFAULT_PAIR_BUDGET) -> int:
    return dos_brute(system, space, model, budget).ssel(level_quanta)


def dmfe_brute(system, space, model, threshold_quanta,
               budget: int = DEFAULT_PAIR_BUDGET) -> bool:
    return mfe_brute(system, space, model, budget) <= threshold_quanta


def dpf_brute(system, space, model, base: Fraction, threshold: Fraction,
              budget: int = DEFAULT_PAIR_BUDGET) -> bool:
    return pf_exact(dos_brute(system, space, model, budget), base) >= threshold


def pf_decimal(value: Fraction, digits: int = 12) -> str:
    """Display-only decimal approximation of an exact rational."""
    if digits < 1:
        raise InvalidInput("need at least one digit")
    scaled = value * 10**digits
    whole = scaled.numerator // scaled.denominator
    sign = "-" if whole < 0 else ""
    whole = abs(whole)
    return f"{sign}{whole // 10**digits}.{whole % 10**digits:0{digits}d}"


@dataclass
class OracleHandle:
    """Magnification-aware oracle facade over one brute-force density of
    states.

    Every query accepts an integer magnification j (the j-magnified model
    scales each level's quanta by j).  pf and dpf additionally accept a
    ``base`` override, which realizes the huge symbolic magnifications whose
    per-quantum weight is a different rational (n! in the threshold
    reductions) rather than a power of the handle's own base.
    """

    system: StrandSystem
    space: StructureSpace
    model: EnergyModel
    base: Fraction
    dos: DensityOfStates = field(init=False)
    calls: int = field(default=0, init=False)

    def __post_init__(self):
        self.base = check_base(self.base)
        self.dos = dos_brute(self.system, self.space, self.model)

    @property
    def n(self) -> int:
        return self.system.n

    def _check_j(self, j: int):
        if not isinstance(j, int) or j < 0:
            raise InvalidInput("magnification must be a non-negative integer")

    def pf(self, j: int = 1, base: Optional[Fraction] = None) -> Fraction:
        self._check_j(j)
        self.calls += 1
        b = self.base if base is None else check_base(base)
        return self.dos.pf(b, j)

    def dpf(self, threshold: Fraction, j: int = 1,
            base: Optional[Fraction] = None) -> bool:
        self._check_j(j)
        self.calls += 1
        b = self.base if base is None else check_base(base)
        return self.dos.pf(b, j) >= threshold

    def mfe(self, j: int = 1) -> int:
        self._check_j(j)
        self.calls += 1
        return self.dos.mfe() * j

    def dmfe(self, threshold, j: int = 1) -> bool:
        self._check_j(j)
        self.calls += 1
        return self.dos.mfe() * j <= threshold

    def ssel(self, level_quanta, j: int = 1) -> int:
        self._check_j(j)
        self.calls += 1
        if j == 0:
            return self.dos.total() if level_quanta == 0 else 0
        if level_quanta % j != 0:
            return 0
        return self.dos.ssel(level_quanta // j)


def make_oracle(system: StrandSystem, space: StructureSpace, model: EnergyModel,
                base: Fraction) -> OracleHandle:
    return OracleHandle(system, space, model, Fraction(base))
