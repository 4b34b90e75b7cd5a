import itertools
import random

import pytest

from exfold.strands import BudgetExceeded, InvalidInput, StrandSystem, StructureSpace
from exfold.energy import BPS
from exfold.exactmath import factorial
from exfold.hardness import (
    FourPartitionInstance,
    ThreeDMInstance,
    count_3dm_brute,
    count_4part_brute,
    count_bps_auto,
    count_bps_brute,
    count_bps_chains,
    count_multi_pkf_brute,
    gen_4part_from_3dm,
    gen_bps_from_4part,
    verify_parsimony_4part,
    verify_parsimony_bps,
)
from exfold.oracles import dos_brute
from exfold.strands import count_structures


def tdm(q, triples):
    base = tuple(range(1, q + 1))
    return ThreeDMInstance(base, base, base, triples)


ALL8 = tuple(itertools.product((1, 2), (1, 2), (1, 2)))


class TestThreeDM:
    def test_singleton(self):
        assert count_3dm_brute(tdm(1, ((1, 1, 1),))) == 1

    def test_all_eight_triples(self):
        assert count_3dm_brute(tdm(2, ALL8)) == 4

    def test_no_triples(self):
        assert count_3dm_brute(tdm(1, ())) == 0

    def test_empty_instance(self):
        assert count_3dm_brute(ThreeDMInstance((), (), (), ())) == 1

    def test_duplicate_triples_rejected(self):
        with pytest.raises(InvalidInput):
            tdm(1, ((1, 1, 1), (1, 1, 1)))

    def test_json_roundtrip(self):
        inst = tdm(2, ((1, 1, 2), (2, 2, 1)))
        assert ThreeDMInstance.from_json(inst.to_json()) == inst


class TestFourPartition:
    def test_uniform(self):
        assert count_4part_brute(FourPartitionInstance((2, 2, 2, 2), 8)) == 1

    def test_eight_equal_elements(self):
        inst = FourPartitionInstance((5,) * 8, 20)
        # labeled elements: C(8,4)/2 unordered splits into two B-tuples
        assert count_4part_brute(inst) == 35

    def test_range_strictness_rejected(self):
        with pytest.raises(InvalidInput):
            FourPartitionInstance((2, 2, 2, 3), 9)  # 3 == 9/3 fails strict <

    def test_unbalanced_counts_zero(self):
        assert count_4part_brute(FourPartitionInstance((2, 2, 2, 2), 7)) == 0

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            count_4part_brute(FourPartitionInstance((5,) * 24, 20), budget=20)

    def test_json_roundtrip(self):
        inst = FourPartitionInstance((2, 2, 2, 2), 8)
        assert FourPartitionInstance.from_json(inst.to_json()) == inst


class TestGen4Part:
    def test_singleton_alpha_one(self):
        built = gen_4part_from_3dm(tdm(1, ((1, 1, 1),)))
        assert built.alpha == 1 and built.instance.k == 4
        assert built.instance.balanced()
        assert count_4part_brute(built.instance) == 1

    def test_alpha_formula(self):
        # x=1 occurs 3 times on the X axis: alpha gains (3-1)! = 2
        inst = tdm(2, ((1, 1, 1), (1, 2, 2), (1, 1, 2), (2, 2, 1)))
        built = gen_4part_from_3dm(inst)
        expected = 1
        for axis, members in enumerate((inst.x, inst.y, inst.z)):
            for a in members:
                expected *= factorial(inst.occurrences(axis, a) - 1)
        assert built.alpha == expected

    def test_weights_in_strict_range(self):
        built = gen_4part_from_3dm(tdm(2, ALL8[:4]))
        inst = built.instance
        for w in inst.weights:
            assert 5 * w > inst.bound and 3 * w < inst.bound

    def test_degenerate_occurrence_fallback(self):
        # q=2 with a single triple: matchings = 0, and a literal construction
        # would still admit one partition; the fallback forces both sides to 0
        built = gen_4part_from_3dm(tdm(2, ((1, 1, 1),)))
        assert built.degenerate and built.alpha == 1
        assert count_4part_brute(built.instance) == 0


class TestBPSGeneration:
    def test_headline_strand(self):
        bps = gen_bps_from_4part(FourPartitionInstance((2, 2, 2, 2), 8))
        assert bps.strand == "CCACCACCACCAAAGGGGGGGG"
        assert bps.target_stacks == 4

    def test_five_weights(self):
        bps = gen_bps_from_4part(FourPartitionInstance((5, 5, 5, 5), 20))
        assert bps.strand == "A".join(["CCCCC"] * 4) + "AAA" + "G" * 20
        assert bps.target_stacks == 16

    def test_two_g_blocks(self):
        bps = gen_bps_from_4part(FourPartitionInstance((2,) * 8, 8))
        assert bps.strand.count("G" * 8) >= 1
        assert bps.strand.endswith("G" * 8 + "A" + "G" * 8)

    def test_slack_rejected(self):
        # total weight below the G capacity admits off-partition structures
        with pytest.raises(InvalidInput):
            gen_bps_from_4part(FourPartitionInstance((2, 2, 2, 2), 9))


class TestStackCounting:
    def test_ggcc(self):
        assert count_bps_brute("GGCC", 1) == 1
        assert count_bps_brute("GGCC", 0) == 6
        assert count_bps_brute("AAAA", 0) == 1

    def test_chains_match_brute_small(self):
        assert count_bps_chains("GGCC", 1) == 1
        assert count_bps_chains("GGCC", 0) == 6

    def test_chains_match_brute_random(self):
        rng = random.Random(19)
        for _ in range(25):
            # A-separated C/G runs keep the chain model exact
            parts = []
            for _ in range(rng.randint(1, 4)):
                parts.append(rng.choice("CG") * rng.randint(1, 3))
                parts.append("A" * rng.randint(1, 2))
            strand = "".join(parts)
            if strand.count("C") + strand.count("G") > 12:
                continue
            top = strand.count("C") + strand.count("G")
            for k in range(0, top):
                assert count_bps_chains(strand, k) == count_bps_brute(strand, k), \
                    (strand, k)

    def test_chains_guard_mixed_boundaries(self):
        with pytest.raises(InvalidInput):
            count_bps_chains("CGCG", 1)

    def test_matches_energy_model_histogram(self):
        # independent route: stack counts via the BPS density of states
        strand = "GGACC"
        system = StrandSystem.from_sequences(strand)
        dos = dos_brute(system, StructureSpace(allow_pseudoknots=True), BPS)
        for k in range(0, 3):
            assert count_bps_brute(strand, k) == dos.counts.get(-k, 0)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            count_bps_brute("C" * 12 + "G" * 12, 4, budget=16)

    def test_auto_route_selection(self):
        n, route = count_bps_auto("GGCC", 1)
        assert n == 1 and route == "enumeration"
        big = gen_bps_from_4part(FourPartitionInstance((5, 5, 5, 5), 20))
        n, route = count_bps_auto(big.strand, big.target_stacks)
        assert n == 24 and route == "chain-count"


class TestParsimonyBPS:
    def test_headline_instance(self):
        report = verify_parsimony_bps(FourPartitionInstance((2, 2, 2, 2), 8))
        assert report.ok and report.lhs == 24 and report.rhs == 24
        assert report.coefficient == 24

    def test_zero_solution_instance(self):
        report = verify_parsimony_bps(FourPartitionInstance((2, 2, 2, 2), 7))
        assert report.ok and report.lhs == 0 and report.rhs == 0

    @pytest.mark.parametrize("weights,bound,expected", [
        ((3, 3, 3, 3), 12, 24),
        ((3, 3, 4, 4), 14, 24),
        ((4, 4, 4, 4), 16, 24),
        ((5, 5, 5, 5), 20, 24),
        ((3, 3, 3, 3), 11, 0),
    ])
    def test_further_k4_instances(self, weights, bound, expected):
        report = verify_parsimony_bps(FourPartitionInstance(weights, bound))
        assert report.ok and report.lhs == expected

    def test_k8_instance_chain_route(self):
        report = verify_parsimony_bps(FourPartitionInstance((2,) * 8, 8))
        assert report.ok and report.route == "chain-count"
        assert report.lhs == 35 * 2 * factorial(4) ** 2 == 40320

    def test_invalid_slack_instance(self):
        report = verify_parsimony_bps(FourPartitionInstance((2, 2, 2, 2), 9))
        assert report.status == "invalid"


class TestParsimony4Part:
    def test_singleton(self):
        assert verify_parsimony_4part(tdm(1, ((1, 1, 1),))).ok

    def test_no_matching(self):
        report = verify_parsimony_4part(tdm(1, ()))
        assert report.ok and report.lhs == 0

    def test_sweep_small(self):
        univ = list(itertools.product((1, 2), (1, 2), (1, 2)))
        rng = random.Random(6)
        pool = [tuple(T) for size in (0, 1, 2, 3, 4)
                for T in itertools.combinations(univ, size)]
        for T in rng.sample(pool, 40):
            report = verify_parsimony_4part(tdm(2, T))
            assert report.ok, (T, report.to_json())

    def test_all_eight_triples(self):
        # 32 elements; the largest exhaustive cross-check in the suite
        report = verify_parsimony_4part(tdm(2, ALL8), partition_budget=32)
        assert report.ok
        assert report.lhs == 46656 * 4
        assert report.coefficient == factorial(3) ** 6


class TestMultiPKF:
    def test_single_strand_levels(self):
        s = StrandSystem.from_sequences("ACGT")
        assert count_multi_pkf_brute(s, 2) == 1
        assert count_multi_pkf_brute(s, 0) == 1

    def test_sums_to_unpseudoknotted_total(self):
        rng = random.Random(44)
        for _ in range(8):
            c = rng.choice((1, 2))
            seqs = ["".join(rng.choice("ACGT") for _ in range(rng.randint(1, 4)))
                    for _ in range(c)]
            s = StrandSystem.from_sequences(*seqs)
            total = count_structures(s, StructureSpace(allow_pseudoknots=False))
            by_k = sum(count_multi_pkf_brute(s, k) for k in range(0, s.n // 2 + 1))
            assert by_k == total

    def test_two_strands(self):
        s = StrandSystem.from_sequences("AC", "GT")
        counts = {k: count_multi_pkf_brute(s, k) for k in range(0, 3)}
        assert counts[0] == 1
        assert sum(counts.values()) == count_structures(
            s, StructureSpace(allow_pseudoknots=False))
