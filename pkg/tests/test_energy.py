import random
from fractions import Fraction as F

import pytest

from exfold.strands import (
    EMPTY_STRUCTURE,
    InvalidInput,
    SecondaryStructure,
    StrandSystem,
    StructureSpace,
    enumerate_structures,
)
from exfold.energy import (
    BPM,
    BPS,
    EnergyModel,
    NNParams,
    decompose_loops,
    dump_nn_params,
    energy,
    energy_bpm,
    energy_bps,
    energy_nn,
    energy_nn_detail,
    finalize_params,
    max_symmetry_order,
    nn_model,
    parse_nn_params,
    rotational_symmetry,
    round_log_multiple,
    temp_magnify,
    toy_params_a,
    toy_params_b,
)
from exfold.oracles import dos_brute


def sys_of(*seqs):
    return StrandSystem.from_sequences(*seqs)


def flat(system, pairs):
    return SecondaryStructure.from_flat(system, pairs)


class TestPairCountModels:
    def test_bpm(self):
        s = sys_of("ACGT")
        assert energy_bpm(EMPTY_STRUCTURE) == 0
        assert energy_bpm(flat(s, [(1, 4), (2, 3)])) == -2

    def test_bpm_matches_size_on_enumeration(self):
        s = sys_of("GCGCAU")
        for st in enumerate_structures(s, StructureSpace(allow_pseudoknots=True)):
            assert energy_bpm(st) == -len(st.pairs)

    def test_bps_stacked(self):
        s = sys_of("GGCC")
        assert energy_bps(s, flat(s, [(1, 4), (2, 3)])) == -1

    def test_bps_crossed_pairs_do_not_stack(self):
        s = sys_of("GGCC")
        assert energy_bps(s, flat(s, [(1, 3), (2, 4)])) == 0

    def test_bps_empty(self):
        assert energy_bps(sys_of("GGCC"), EMPTY_STRUCTURE) == 0

    def test_bps_no_stack_across_nick(self):
        s = sys_of("GG", "CC")
        assert energy_bps(s, flat(s, [(1, 4), (2, 3)])) == -1
        split = sys_of("G", "GCC")
        assert energy_bps(split, flat(split, [(1, 4), (2, 3)])) == 0


class TestDecomposition:
    def test_hairpin_with_stem(self):
        s = sys_of("GGGAAAACCC")
        loops = decompose_loops(s, s.ids, flat(s, [(1, 10), (2, 9), (3, 8)]))
        kinds = sorted(l.kind for l in loops)
        assert kinds == ["exterior", "hairpin", "stack", "stack"]
        hairpin = next(l for l in loops if l.kind == "hairpin")
        assert hairpin.free_bases == 4

    def test_empty_structure_single_exterior(self):
        s = sys_of("ACGT")
        loops = decompose_loops(s, s.ids, EMPTY_STRUCTURE)
        assert [l.kind for l in loops] == ["exterior"]
        assert loops[0].nick_count == 1  # the wrap-around gap

    def test_duplex(self):
        s = sys_of("GC", "GC")
        loops = decompose_loops(s, (1, 2), flat(s, [(1, 4), (2, 3)]))
        assert sorted(l.kind for l in loops) == ["exterior", "exterior", "stack"]

    def test_bulge_interior_multiloop(self):
        s = sys_of("GAGAGAAACACC")
        # (1,12) over (3,11): l1=1, l2=0 bulge; (3,11) over (5,9): 1x1 interior
        loops = decompose_loops(s, s.ids, flat(s, [(1, 12), (3, 11), (5, 9)]))
        kinds = {l.kind for l in loops}
        assert "bulge" in kinds and "interior" in kinds
        m = sys_of("GGGAAACGAAACACC")
        multi = decompose_loops(
            m, m.ids, flat(m, [(1, 15), (2, 14), (3, 7), (8, 12)]))
        ml = next(l for l in multi if l.kind == "multiloop")
        assert len(ml.children) == 2 and ml.free_bases == 1

    def test_rejects_pseudoknot(self):
        s = sys_of("GGCC")
        with pytest.raises(InvalidInput):
            decompose_loops(s, s.ids, flat(s, [(1, 3), (2, 4)]))

    def test_rejects_disconnected(self):
        s = sys_of("GC", "GC")
        with pytest.raises(InvalidInput):
            decompose_loops(s, (1, 2), flat(s, [(1, 2)]))

    def test_every_base_in_exactly_one_face_when_unpaired(self):
        s = sys_of("GCGCAAAGCGC")
        space = StructureSpace(allow_pseudoknots=False)
        for st in enumerate_structures(s, space):
            loops = decompose_loops(s, s.ids, st)
            assert sum(l.free_bases for l in loops) == s.n - 2 * len(st.pairs)


class TestSymmetry:
    def test_single_strand(self):
        s = sys_of("ACGT")
        assert rotational_symmetry(s, s.ids, EMPTY_STRUCTURE) == 1

    def test_two_identical_strands_symmetric_structure(self):
        s = sys_of("AT", "AT")
        st = SecondaryStructure.from_refs(s, [((1, 1), (2, 2)), ((2, 1), (1, 2))])
        assert max_symmetry_order(s, (1, 2)) == 2
        assert rotational_symmetry(s, (1, 2), st) == 2

    def test_distinct_sequences(self):
        s = sys_of("AT", "GC")
        assert max_symmetry_order(s, (1, 2)) == 1
        assert rotational_symmetry(s, (1, 2), EMPTY_STRUCTURE) == 1

    def test_asymmetric_structure_on_symmetric_strands(self):
        s = sys_of("GC", "GC")
        st = SecondaryStructure.from_refs(s, [((1, 1), (1, 2))])
        # intra-strand pair on one strand only: labels symmetric, pairs not
        assert rotational_symmetry(s, (1, 2), st) == 1

    def test_three_fold(self):
        s = sys_of("GC", "GC", "GC")
        st = SecondaryStructure.from_refs(
            s, [((1, 1), (3, 2)), ((2, 1), (1, 2)), ((3, 1), (2, 2))])
        assert rotational_symmetry(s, (1, 2, 3), st) == 3


class TestRounding:
    def test_integer_multiples_exact(self):
        assert round_log_multiple(F(0), 5, F(1)) == 0
        assert round_log_multiple(F(1), 1, F(1)) == 0

    def test_ln2_rounding(self):
        # 10 * ln 2 = 6.93...; 100 * ln 2 = 69.3...
        assert round_log_multiple(F(10), 2, F(1)) == 7
        assert round_log_multiple(F(100), 2, F(1)) == 69
        assert round_log_multiple(F(3, 2), 2, F(1, 2)) == 2  # 3 ln 2 = 2.08


class TestNNEnergy:
    def test_empty_structure_zero(self):
        s = sys_of("ACGT")
        params = toy_params_a(4)
        assert energy_nn(s, s.ids, EMPTY_STRUCTURE, params) == 0

    def test_stem_loop_sum(self):
        s = sys_of("GGGAAAACCC")
        params = toy_params_a(10)
        st = flat(s, [(1, 10), (2, 9), (3, 8)])
        detail = energy_nn_detail(s, s.ids, st, params)
        stack_key = ("G", "G", "C", "C")
        expected = 2 * params.stack[stack_key] + params.hairpin[4]
        assert detail.loops_quanta == expected
        assert detail.symmetry_order == 1 and detail.symmetry_quanta == 0

    def test_stem_loop_unit_tables(self):
        # stack -1, hairpin(4) +1: two stacks plus the loop give -1 total
        s = sys_of("GGGAAAACCC")
        unit = finalize_params(NNParams(
            stack={k: -1 for k in toy_params_a(10).stack},
            hairpin={3: 2, 4: 1}, bulge={1: 0}, interior_size={2: 0},
            interior_asym={0: 0}, mismatch={k: 0 for k in toy_params_a(10).mismatch},
        ), 10, js_coef=F(0))
        st = flat(s, [(1, 10), (2, 9), (3, 8)])
        assert energy_nn(s, s.ids, st, unit) == -1

    def test_symmetry_term_rounded(self):
        s = sys_of("AT", "AT")
        st = SecondaryStructure.from_refs(s, [((1, 1), (2, 2)), ((2, 1), (1, 2))])
        params = toy_params_a(4)
        detail = energy_nn_detail(s, (1, 2), st, params)
        assert detail.symmetry_order == 2 and detail.symmetry_rounded
        assert detail.symmetry_quanta == round_log_multiple(params.kbt, 2, params.delta)
        assert detail.assoc_quanta == params.assoc
        assert detail.total == detail.loops_quanta + params.assoc + detail.symmetry_quanta

    def test_all_zero_tables_give_zero(self):
        s = sys_of("GCGCAAAGC")
        zero = finalize_params(NNParams(
            stack={k: 0 for k in toy_params_a(9).stack},
            hairpin={3: 0}, bulge={1: 0}, interior_size={2: 0},
            interior_asym={0: 0}, mismatch={k: 0 for k in toy_params_a(9).mismatch},
        ), 9, js_coef=F(0))
        space = StructureSpace(allow_pseudoknots=False, require_connected=True,
                               min_hairpin=3)
        for st in enumerate_structures(s, space):
            assert energy_nn(s, s.ids, st, zero) == 0


class TestModelWrapper:
    def test_magnified_bpm(self):
        s = sys_of("ACGT")
        st = flat(s, [(1, 4), (2, 3)])
        assert energy(BPM.magnified(3), s, st) == -6

    def test_bps_passthrough(self):
        s = sys_of("GGCC")
        assert energy(BPS, s, flat(s, [(1, 4), (2, 3)])) == -1

    def test_magnified_nn(self):
        s = sys_of("GGGAAAACCC")
        params = toy_params_a(10)
        st = flat(s, [(1, 10), (2, 9), (3, 8)])
        base = energy(nn_model(params), s, st)
        assert energy(nn_model(params).magnified(2), s, st) == 2 * base

    def test_fractional_magnification_integrality(self):
        s = sys_of("ACGT")
        st = flat(s, [(1, 4)])
        with pytest.raises(InvalidInput):
            energy(BPM.magnified(F(1, 2)), s, st)  # -1/2 quanta is not integral
        assert energy(BPM.magnified(F(1, 2)), s, flat(s, [(1, 4), (2, 3)])) == -1

    def test_magnification_preserves_argmin_and_counts(self):
        rng = random.Random(3)
        for _ in range(10):
            seq = "".join(rng.choice("ACGT") for _ in range(rng.randint(3, 7)))
            s = sys_of(seq)
            space = StructureSpace(allow_pseudoknots=True)
            dos1 = dos_brute(s, space, BPM)
            dos3 = dos_brute(s, space, BPM.magnified(3))
            assert dos3.counts == {3 * g: c for g, c in dos1.counts.items()}
            assert dos3.mfe() == 3 * dos1.mfe()

    def test_temp_magnify(self):
        assert temp_magnify(F(310), F(2)) == 155
        assert temp_magnify(F(310), F(1)) == 310
        with pytest.raises(InvalidInput):
            temp_magnify(F(-1), F(2))

    def test_temp_magnify_pf_contract(self):
        # for a temperature-independent model, PF at the reduced temperature
        # equals PF of the magnified model: base per quantum b -> b**alpha
        s = sys_of("ACGT")
        space = StructureSpace(allow_pseudoknots=True)
        dos = dos_brute(s, space, BPM)
        dos_mag = dos_brute(s, space, BPM.magnified(3))
        b = F(2)
        assert dos.pf(b ** 3) == dos_mag.pf(b)


class TestParamsIO:
    def test_roundtrip(self):
        for params in (toy_params_a(12), toy_params_b(12)):
            assert parse_nn_params(dump_nn_params(params)) == params

    def test_missing_entry_reported(self):
        s = sys_of("GGGAAAACCC")
        sparse = NNParams(hairpin={3: 1}, bulge={1: 0}, interior_size={2: 0},
                          interior_asym={0: 0})
        with pytest.raises(InvalidInput):
            energy_nn(s, s.ids, flat(s, [(1, 10), (2, 9), (3, 8)]), sparse)

    def test_bad_section_line(self):
        with pytest.raises(InvalidInput):
            parse_nn_params("delta = 1\n")

    def test_finalize_extends_tables(self):
        params = toy_params_b(20)
        assert max(params.hairpin) >= 20
        assert max(params.bulge) >= 20
