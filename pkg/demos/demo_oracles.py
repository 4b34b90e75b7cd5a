"""Exhaustive reference oracles on a small system.

Walks one strand through enumeration, the density of states, and the five
exact answers (MFE, PF, level counts, both decision problems), all in
rational arithmetic.
"""

from fractions import Fraction as F

from exfold import (
    BPM,
    BPS,
    StrandSystem,
    StructureSpace,
    dos_brute,
    enumerate_structures,
    pf_decimal,
)

system = StrandSystem.from_sequences("GCGCAU")
space = StructureSpace(allow_pseudoknots=True)

print(f"system: {'+'.join(s.sequence for s in system.strands)}  (n = {system.n})")
print("\nall structures (flat pair lists, deterministic order):")
for structure in enumerate_structures(system, space):
    print("  ", structure.sorted_flat(system) or "(empty)")

for model, name in ((BPM, "pair counting"), (BPS, "stack counting")):
    dos = dos_brute(system, space, model)
    print(f"\n{name} model:")
    print("  density of states:", dict(sorted(dos.counts.items())))
    print("  MFE (quanta):", dos.mfe())
    for base in (F(1, 2), F(2), F(3)):
        pf = dos.pf(base)
        print(f"  PF at base {base}: {pf}  (~{pf_decimal(pf, 6)})")

# the two PF routes agree level-by-level with the direct structure sum
dos = dos_brute(system, space, BPM)
direct = sum((F(2) ** len(s.pairs) for s in enumerate_structures(system, space)), F(0))
assert dos.pf(F(2)) == direct
print("\nPF via level counts == PF via direct structure sum:", direct)
