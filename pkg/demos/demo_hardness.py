"""The counting-hardness instance chain, verified end to end.

3-dimensional matching -> 4-PARTITION (radix weights, factor alpha) ->
a strand whose structures at an exact stacking count are in
(k/4)! * 24**(k/4) -to-one correspondence with the 4-partitions.
"""

import itertools

from exfold import (
    FourPartitionInstance,
    ThreeDMInstance,
    count_3dm_brute,
    count_4part_brute,
    count_bps_brute,
    count_bps_chains,
    gen_4part_from_3dm,
    gen_bps_from_4part,
    verify_parsimony_4part,
    verify_parsimony_bps,
)

ids = (1, 2)
triples = tuple(itertools.product(ids, ids, ids))[:4]  # (1,1,1) ... (1,2,2)
inst3 = ThreeDMInstance(ids, ids, ids, triples)
print("3DM instance: X=Y=Z={1,2}, triples:", triples)
print("perfect matchings:", count_3dm_brute(inst3))

built = gen_4part_from_3dm(inst3)
print("\ngenerated 4-PARTITION: k =", built.instance.k,
      " bound bits ~", built.instance.bound.bit_length())
print("arrangement factor alpha:", built.alpha)
print("partitions:", count_4part_brute(built.instance))
print("parsimony check:", verify_parsimony_4part(inst3).to_json())

inst4 = FourPartitionInstance((2, 2, 2, 2), 8)
bps = gen_bps_from_4part(inst4)
print("\n4-PARTITION (2,2,2,2), bound 8  ->  strand", bps.strand)
print("stacking target:", bps.target_stacks)
print("structures at target, by enumeration:  ",
      count_bps_brute(bps.strand, bps.target_stacks))
print("structures at target, by chain counting:",
      count_bps_chains(bps.strand, bps.target_stacks))
print("expected: partitions * (k/4)! * 24**(k/4) = 1 * 1 * 24")
print("parsimony check:", verify_parsimony_bps(inst4).to_json())

zero = FourPartitionInstance((2, 2, 2, 2), 7)
print("\nzero-solution instance (total exceeds capacity):",
      verify_parsimony_bps(zero).to_json())

big = FourPartitionInstance((5, 5, 5, 5), 20)
print("\n(5,5,5,5)/20 is over the enumeration budget; the chain counter "
      "takes over:")
print(verify_parsimony_bps(big).to_json())
