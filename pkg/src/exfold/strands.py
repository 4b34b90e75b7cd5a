"""Strands, multi-stranded systems, secondary structures, and the structural
predicates and enumerators everything else consumes.

Conventions used throughout the package:

* Bases are one-character strings from ``ACGTU``; the only complementary
  pairings are A-T, A-U and C-G (no wobble pairs).
* A base is addressed either by a ``BaseRef`` (strand id, 1-based index
  within the strand) or, once an ordering of the strands is fixed, by its
  1-based *flat* index in the concatenation of the strands.
* Nicks sit between consecutive strands of a flattening: "nick after flat
  position p" is stored as the integer p (conceptually p + 1/2).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Sequence

VALID_BASES = "ACGTU"

_COMPLEMENTARY = {
    frozenset("AT"),
    frozenset("AU"),
    frozenset("CG"),
}

DEFAULT_PAIR_BUDGET = 64


class BudgetExceeded(RuntimeError):
    """Raised when an exhaustive computation would exceed its declared budget."""


class InvalidInput(ValueError):
    """Raised for malformed strands, structures, or instance files."""


def complementary(a: str, b: str) -> bool:
    """True iff {a, b} is A-T, A-U or C-G."""
    return frozenset((a, b)) in _COMPLEMENTARY


class BaseRef(NamedTuple):
    strand: int
    index: int  # 1-based position within the strand


@dataclass(frozen=True)
class Strand:
    id: int
    sequence: str

    def __post_init__(self):
        if not self.sequence:
            raise InvalidInput(f"strand {self.id} has an empty sequence")
        bad = set(self.sequence) - set(VALID_BASES)
        if bad:
            raise InvalidInput(f"strand {self.id} has invalid bases {sorted(bad)}")

    def __len__(self) -> int:
        return len(self.sequence)


@dataclass(frozen=True)
class StrandSystem:
    """An ordered multiset of strands; the tuple order is the system's
    intrinsic flattening order (identity ordering)."""

    strands: tuple[Strand, ...]

    def __post_init__(self):
        if not self.strands:
            raise InvalidInput("a strand system needs at least one strand")
        ids = [s.id for s in self.strands]
        if len(set(ids)) != len(ids):
            raise InvalidInput(f"duplicate strand ids in {ids}")

    @classmethod
    def from_sequences(cls, *sequences: str) -> "StrandSystem":
        return cls(tuple(Strand(i + 1, seq) for i, seq in enumerate(sequences)))

    @property
    def c(self) -> int:
        return len(self.strands)

    @property
    def n(self) -> int:
        return sum(len(s) for s in self.strands)

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(s.id for s in self.strands)

    def strand_by_id(self, sid: int) -> Strand:
        for s in self.strands:
            if s.id == sid:
                return s
        raise InvalidInput(f"no strand with id {sid}")

    def base_at(self, ref: BaseRef) -> str:
        strand = self.strand_by_id(ref.strand)
        if not 1 <= ref.index <= len(strand):
            raise InvalidInput(f"base index {ref} out of range")
        return strand.sequence[ref.index - 1]

    def identity_ordering(self) -> tuple[int, ...]:
        return self.ids

    def circular_orderings(self) -> Iterator[tuple[int, ...]]:
        """All (c-1)! circular orderings, first strand pinned, deterministic."""
        first, rest = self.ids[0], sorted(self.ids[1:])
        for perm in itertools.permutations(rest):
            yield (first,) + perm


def canonical_ordering(ordering: Sequence[int]) -> tuple[int, ...]:
    """Rotation-invariant representative: rotate the circular ordering so the
    smallest strand id comes first.  Two orderings are the same circular
    permutation iff their canonical forms are equal."""
    ordering = tuple(ordering)
    pivot = ordering.index(min(ordering))
    return ordering[pivot:] + ordering[:pivot]


class Flattening:
    """Positional bookkeeping for a strand system under one ordering."""

    def __init__(self, system: StrandSystem, ordering: Optional[Sequence[int]] = None):
        ordering = tuple(ordering) if ordering is not None else system.ids
        if sorted(ordering) != sorted(system.ids):
            raise InvalidInput(f"ordering {ordering} does not permute strand ids {system.ids}")
        self.system = system
        self.ordering = ordering
        self.sequence = "".join(system.strand_by_id(t).sequence for t in ordering)
        self._flat_of: dict[BaseRef, int] = {}
        self._ref_of: list[BaseRef] = []
        self.nicks: set[int] = set()
        pos = 0
        for t in ordering:
            strand = system.strand_by_id(t)
            for i in range(1, len(strand) + 1):
                pos += 1
                ref = BaseRef(t, i)
                self._flat_of[ref] = pos
                self._ref_of.append(ref)
            if pos < system.n:
                self.nicks.add(pos)  # nick between pos and pos + 1

    @property
    def n(self) -> int:
        return self.system.n

    def flat(self, ref: BaseRef) -> int:
        return self._flat_of[ref]

    def ref(self, pos: int) -> BaseRef:
        return self._ref_of[pos - 1]

    def base(self, pos: int) -> str:
        return self.sequence[pos - 1]

    def flat_pairs(self, structure: "SecondaryStructure") -> list[tuple[int, int]]:
        out = []
        for a, b in structure.pairs:
            i, j = self.flat(a), self.flat(b)
            out.append((i, j) if i < j else (j, i))
        out.sort()
        return out

    def nick_count(self, lo: int, hi: int) -> int:
        """Number of nicks in the half-integer interval [lo+1/2, hi+1/2];
        by convention zero when hi < lo."""
        if hi < lo:
            return 0
        return sum(1 for p in self.nicks if lo <= p <= hi)


@dataclass(frozen=True)
class SecondaryStructure:
    """A set of base pairs; each pair is a frozenset-free canonical 2-tuple of
    BaseRefs ordered by (strand id position in the system tuple, index)."""

    pairs: frozenset[tuple[BaseRef, BaseRef]]

    @classmethod
    def from_refs(cls, system: StrandSystem, pairs) -> "SecondaryStructure":
        flat = Flattening(system)
        canon = []
        for a, b in pairs:
            a, b = BaseRef(*a), BaseRef(*b)
            if flat.flat(a) > flat.flat(b):
                a, b = b, a
            canon.append((a, b))
        return cls(frozenset(canon))

    @classmethod
    def from_flat(cls, system: StrandSystem, flat_pairs) -> "SecondaryStructure":
        flat = Flattening(system)
        return cls(frozenset(
            (flat.ref(min(i, j)), flat.ref(max(i, j))) for i, j in flat_pairs
        ))

    def __len__(self) -> int:
        return len(self.pairs)

    def sorted_flat(self, system: StrandSystem, ordering: Optional[Sequence[int]] = None):
        return Flattening(system, ordering).flat_pairs(self)


EMPTY_STRUCTURE = SecondaryStructure(frozenset())


@dataclass(frozen=True)
class StructureSpace:
    """Which structures count as members of the ensemble.

    ``pairing="all"`` drops the complementarity requirement; it exists for
    combinatorial calibration against the closed-form matching counts and is
    never used by the energy models.
    """

    allow_pseudoknots: bool = True
    require_connected: bool = False
    min_hairpin: int = 0
    pairing: str = "complementary"  # or "all"

    def __post_init__(self):
        if self.pairing not in ("complementary", "all"):
            raise InvalidInput(f"unknown pairing rule {self.pairing!r}")
        if self.min_hairpin < 0:
            raise InvalidInput("min_hairpin must be >= 0")


def bpm_space(allow_pseudoknots: bool = True) -> StructureSpace:
    return StructureSpace(allow_pseudoknots=allow_pseudoknots)


def bps_space(allow_pseudoknots: bool = True) -> StructureSpace:
    return StructureSpace(allow_pseudoknots=allow_pseudoknots)


def nn_space() -> StructureSpace:
    return StructureSpace(allow_pseudoknots=False, require_connected=True, min_hairpin=3)


def all_pairs_space() -> StructureSpace:
    return StructureSpace(pairing="all")


# ---------------------------------------------------------------------------
# predicates


def validate_structure(system: StrandSystem, structure: SecondaryStructure) -> Optional[str]:
    """None when valid, else a message naming the first offending pair/base."""
    ids = set(system.ids)
    for a, b in structure.pairs:
        for ref in (a, b):
            if ref.strand not in ids:
                return f"base {ref} names an unknown strand"
            if not 1 <= ref.index <= len(system.strand_by_id(ref.strand)):
                return f"base {ref} out of range"
    seen: set[BaseRef] = set()
    flat = Flattening(system)
    ordered = sorted(structure.pairs, key=lambda p: (flat.flat(p[0]), flat.flat(p[1])))
    for a, b in ordered:
        if a == b:
            return f"pair ({a}, {b}) joins a base to itself"
        for ref in (a, b):
            if ref in seen:
                return f"base {ref} appears in more than one pair"
            seen.add(ref)
    for a, b in ordered:
        if not complementary(system.base_at(a), system.base_at(b)):
            return (f"pair ({a}, {b}) is not complementary: "
                    f"{system.base_at(a)}-{system.base_at(b)}")
    if len(structure.pairs) > system.n // 2:
        return "more pairs than floor(n/2)"
    return None


def check_structure(system: StrandSystem, structure: SecondaryStructure) -> None:
    msg = validate_structure(system, structure)
    if msg is not None:
        raise InvalidInput(msg)


def _crossing_free(flat_pairs: Sequence[tuple[int, int]]) -> bool:
    pairs = sorted(flat_pairs)
    for (i, j), (k, l) in itertools.combinations(pairs, 2):
        if i < k < j < l:
            return False
    return True


def is_unpseudoknotted_single(flat_pairs) -> bool:
    """No two pairs cross under the flattened order."""
    return _crossing_free(list(flat_pairs))


def is_unpseudoknotted_multi(
    system: StrandSystem, structure: SecondaryStructure
) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Search the (c-1)! circular orderings for a crossing-free flattening.

    Returns (True, witness ordering) or (False, None).
    """
    for ordering in system.circular_orderings():
        if _crossing_free(Flattening(system, ordering).flat_pairs(structure)):
            return True, ordering
    return False, None


def is_unpseudoknotted_under(
    system: StrandSystem, structure: SecondaryStructure, ordering: Sequence[int]
) -> bool:
    return _crossing_free(Flattening(system, ordering).flat_pairs(structure))


def is_connected(system: StrandSystem, structure: SecondaryStructure) -> bool:
    """Connectivity of the strand graph with one edge per inter-strand pair."""
    if system.c == 1:
        return True
    parent = {sid: sid for sid in system.ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in structure.pairs:
        parent[find(a.strand)] = find(b.strand)
    roots = {find(sid) for sid in system.ids}
    return len(roots) == 1


def min_hairpin_ok(system: StrandSystem, structure: SecondaryStructure, min_hairpin: int) -> bool:
    """Every same-strand pair enclosing only unpaired bases of that strand
    must enclose at least ``min_hairpin`` of them."""
    if min_hairpin <= 0:
        return True
    paired: set[BaseRef] = set()
    for a, b in structure.pairs:
        paired.add(a)
        paired.add(b)
    for a, b in structure.pairs:
        if a.strand != b.strand:
            continue
        lo, hi = sorted((a.index, b.index))
        if hi - lo - 1 >= min_hairpin:
            continue
        if all(BaseRef(a.strand, i) not in paired for i in range(lo + 1, hi)):
            return False
    return True


# ---------------------------------------------------------------------------
# enumeration


def candidate_pairs(system: StrandSystem, space: StructureSpace) -> list[tuple[int, int]]:
    """All admissible flat pairs (i < j) under the space's pairing rule."""
    flat = Flattening(system)
    n = system.n
    out = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if space.pairing == "all" or complementary(flat.base(i), flat.base(j)):
                out.append((i, j))
    return out


def _space_admits(system, flat, structure_pairs, space: StructureSpace,
                  fixed_ordering: Optional[Sequence[int]]) -> bool:
    structure = SecondaryStructure(frozenset(
        (flat.ref(i), flat.ref(j)) for i, j in structure_pairs
    ))
    if not space.allow_pseudoknots:
        if fixed_ordering is not None:
            if not _crossing_free(Flattening(system, fixed_ordering).flat_pairs(structure)):
                return False
        elif not is_unpseudoknotted_multi(system, structure)[0]:
            return False
    if space.require_connected and not is_connected(system, structure):
        return False
    if not min_hairpin_ok(system, structure, space.min_hairpin):
        return False
    return True


def enumerate_structures(
    system: StrandSystem,
    space: StructureSpace,
    budget: int = DEFAULT_PAIR_BUDGET,
    fixed_ordering: Optional[Sequence[int]] = None,
) -> Iterator[SecondaryStructure]:
    """Yield every structure of the space exactly once, empty structure first,
    in lexicographic order of the sorted flat pair tuples.

    ``fixed_ordering`` restricts the pseudoknot check of a knot-free space to
    one flattening instead of the existential search over all orderings.
    """
    cands = candidate_pairs(system, space)
    if len(cands) > budget:
        raise BudgetExceeded(
            f"{len(cands)} candidate pairs exceed the enumeration budget {budget}")
    flat = Flattening(system)
    prune_knots = not space.allow_pseudoknots

    chosen: list[tuple[int, int]] = []
    occupied: set[int] = set()

    def admissible() -> bool:
        return _space_admits(system, flat, chosen, space, fixed_ordering)

    def partial_knot_ok() -> bool:
        # crossings never disappear when pairs are added, so prune early
        structure = SecondaryStructure(frozenset(
            (flat.ref(i), flat.ref(j)) for i, j in chosen))
        if fixed_ordering is not None:
            return _crossing_free(Flattening(system, fixed_ordering).flat_pairs(structure))
        return is_unpseudoknotted_multi(system, structure)[0]

    def rec(start: int) -> Iterator[SecondaryStructure]:
        if admissible():
            yield SecondaryStructure(frozenset(
                (flat.ref(i), flat.ref(j)) for i, j in chosen))
        for idx in range(start, len(cands)):
            i, j = cands[idx]
            if i in occupied or j in occupied:
                continue
            chosen.append((i, j))
            occupied.update((i, j))
            if not prune_knots or partial_knot_ok():
                yield from rec(idx + 1)
            chosen.pop()
            occupied.difference_update((i, j))

    yield from rec(0)


def count_structures(
    system: StrandSystem,
    space: StructureSpace,
    budget: int = DEFAULT_PAIR_BUDGET,
    fixed_ordering: Optional[Sequence[int]] = None,
) -> int:
    return sum(1 for _ in enumerate_structures(system, space, budget, fixed_ordering))


# ---------------------------------------------------------------------------
# strand-system text format


def parse_strands(text: str) -> StrandSystem:
    """One strand per line, ACGTU characters, '#' comments, blanks ignored."""
    seqs = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        seqs.append(line.upper())
    if not seqs:
        raise InvalidInput("no strands found")
    return StrandSystem.from_sequences(*seqs)


def read_strand_file(path) -> StrandSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_strands(fh.read())
