"""The full oracle-reduction map on one system.

Each reduction solves its problem purely through oracle calls (logged in a
transcript) and must reproduce the brute-force answer bit-exactly.  The two
threshold reductions magnify the energy model so hard that the per-quantum
Boltzmann weight becomes n!, letting single-level counts be read off like
digits of a numeral.
"""

from fractions import Fraction as F

from exfold import (
    BPM,
    StrandSystem,
    StructureSpace,
    dmfe_via_dpf,
    dmfe_via_mfe,
    dos_via_pf,
    dpf_via_pf,
    levels_bpm,
    make_oracle,
    mfe_via_dmfe,
    mfe_via_ssel,
    pf_via_dpf,
    pf_via_ssel,
)

system = StrandSystem.from_sequences("GCGC")
space = StructureSpace(allow_pseudoknots=True)
base = F(2)
oracle = make_oracle(system, space, BPM, base)
levels = levels_bpm(system.n)

print(f"system GCGC, pair-count model, base {base}")
print("candidate levels:", levels.levels)
print("brute force: MFE =", oracle.dos.mfe(), " PF =", oracle.pf(),
      " DoS =", dict(sorted(oracle.dos.counts.items())))
print()

answer, t = dmfe_via_mfe(oracle, -1)
print(f"dMFE(k=-1) from MFE oracle      -> {answer}   ({t.call_count} call)")

answer, t = dpf_via_pf(oracle, F(9))
print(f"dPF(k=9) from PF oracle         -> {answer}   ({t.call_count} call)")

answer, t = mfe_via_dmfe(oracle, levels)
print(f"MFE from dMFE oracle            -> {answer}   ({t.call_count} calls, binary search)")

answer, t = mfe_via_ssel(oracle, levels)
print(f"MFE from level-count oracle     -> {answer}   ({t.call_count} calls, linear scan)")

answer, t = pf_via_ssel(oracle, levels, base)
print(f"PF from level-count oracle      -> {answer}   ({t.call_count} calls)")

counts, t = dos_via_pf(oracle, levels, base)
print(f"counts from magnified PF calls  -> {counts}   ({t.call_count} calls, "
      "Vandermonde solve)")

answer, t = dmfe_via_dpf(oracle, levels, -2)
print(f"dMFE(k=-2) from dPF oracle      -> {answer}   (magnified threshold "
      f"{t.details['threshold']})")

answer, t = pf_via_dpf(oracle, levels, base)
print(f"PF from dPF oracle              -> {answer}   ({t.call_count} calls, "
      "per-level binary search)")

print("\none transcript in full:")
print(t.to_json())
