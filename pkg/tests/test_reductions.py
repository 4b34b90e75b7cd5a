import json
import math
import random
from fractions import Fraction as F

import pytest

from exfold.strands import InvalidInput, StrandSystem, StructureSpace
from exfold.energy import BPM, BPS
from exfold.levels import levels_bpm, levels_bps
from exfold.oracles import make_oracle
from exfold.reductions import (
    OracleInconsistency,
    dmfe_via_dpf,
    dmfe_via_mfe,
    dos_via_pf,
    dpf_via_pf,
    magnified_separation_holds,
    mfe_via_dmfe,
    mfe_via_ssel,
    pf_via_dpf,
    pf_via_ssel,
    ssel_via_pf,
)

PK = StructureSpace(allow_pseudoknots=True)


def sys_of(*seqs):
    return StrandSystem.from_sequences(*seqs)


def acgt_oracle(base=F(2)):
    return make_oracle(sys_of("ACGT"), PK, BPM, base)


class TestStraightforward:
    def test_dmfe_via_mfe(self):
        oracle = acgt_oracle()
        assert dmfe_via_mfe(oracle, -2)[0] is True
        assert dmfe_via_mfe(oracle, 1)[0] is True  # MFE <= 0 always
        assert dmfe_via_mfe(oracle, -(4 // 2 + 1))[0] is False
        _, t = dmfe_via_mfe(oracle, 0)
        assert t.call_count == 1

    def test_dpf_via_pf(self):
        oracle = acgt_oracle()
        assert dpf_via_pf(oracle, F(9))[0] is True
        assert dpf_via_pf(oracle, F(10))[0] is False
        assert dpf_via_pf(oracle, F(1))[0] is True

    def test_mfe_via_dmfe(self):
        answer, t = mfe_via_dmfe(acgt_oracle(), levels_bpm(4))
        assert answer == -2
        assert t.call_count <= math.ceil(math.log2(3)) + 1

    def test_mfe_via_dmfe_inert(self):
        oracle = make_oracle(sys_of("AAAA"), PK, BPM, F(2))
        assert mfe_via_dmfe(oracle, [0])[0] == 0

    def test_mfe_via_dmfe_bps(self):
        oracle = make_oracle(sys_of("GGCC"), PK, BPS, F(2))
        assert mfe_via_dmfe(oracle, levels_bps(4))[0] == -1

    def test_mfe_via_ssel(self):
        assert mfe_via_ssel(acgt_oracle(), levels_bpm(4))[0] == -2
        oracle = make_oracle(sys_of("GGCC"), PK, BPS, F(2))
        answer, t = mfe_via_ssel(oracle, levels_bps(4))
        assert answer == -1 and t.call_count <= len(levels_bps(4))

    def test_pf_via_ssel(self):
        assert pf_via_ssel(acgt_oracle(), levels_bpm(4), F(2))[0] == 9
        oracle = make_oracle(sys_of("AAAA"), PK, BPM, F(2))
        assert pf_via_ssel(oracle, levels_bpm(4), F(2))[0] == 1
        bps = make_oracle(sys_of("GGCC"), PK, BPS, F(3))
        assert pf_via_ssel(bps, levels_bps(4), F(3))[0] == 9  # 6 + 1*3


class TestCountReconstruction:
    def test_full_histogram(self):
        counts, t = dos_via_pf(acgt_oracle(), levels_bpm(4), F(2))
        assert counts == {0: 1, -1: 2, -2: 1}
        assert t.call_count == len(levels_bpm(4))

    def test_single_level(self):
        assert ssel_via_pf(acgt_oracle(), levels_bpm(4), F(2), -1)[0] == 2

    def test_level_below_mfe_zero(self):
        # GGCA can form at most one pair, so the candidate level -2 sits
        # below the MFE and must reconstruct to a zero count
        oracle = make_oracle(sys_of("GGCA"), PK, BPM, F(2))
        counts, _ = dos_via_pf(oracle, levels_bpm(4), F(2))
        assert oracle.dos.mfe() == -1 and counts[-2] == 0
        assert ssel_via_pf(oracle, levels_bpm(4), F(2), -2)[0] == 0

    def test_ggcc_bps(self):
        oracle = make_oracle(sys_of("GGCC"), PK, BPS, F(2))
        assert ssel_via_pf(oracle, levels_bps(4), F(2), 0)[0] == 6

    def test_fractional_base(self):
        oracle = acgt_oracle(F(1, 2))
        counts, _ = dos_via_pf(oracle, levels_bpm(4), F(1, 2))
        assert counts == {0: 1, -1: 2, -2: 1}


class TestHugeMagnification:
    def test_dmfe_via_dpf_examples(self):
        oracle = acgt_oracle()
        lv = levels_bpm(4)
        answer, t = dmfe_via_dpf(oracle, lv, -1)
        assert answer is True and t.details["threshold"] == "24/1"
        assert dmfe_via_dpf(oracle, lv, -2)[0] is True
        answer, t = dmfe_via_dpf(oracle, lv, F(-5, 2))
        assert answer is False and t.call_count == 0

    def test_dmfe_via_dpf_agrees_everywhere(self):
        rng = random.Random(4)
        for _ in range(12):
            n = rng.randint(3, 8)
            s = sys_of("".join(rng.choice("ACGT") for _ in range(n)))
            model = rng.choice((BPM, BPS))
            oracle = make_oracle(s, PK, model, F(2))
            lv = levels_bpm(n)
            mfe = oracle.dos.mfe()
            for k in list(lv.levels) + [F(1, 2), F(-7, 3), -n]:
                got, _ = dmfe_via_dpf(oracle, lv, k)
                assert got == (mfe <= k)

    def test_pf_via_dpf(self):
        answer, t = pf_via_dpf(acgt_oracle(), levels_bpm(4), F(2))
        assert answer == 9
        assert t.call_count <= len(levels_bpm(4)) * math.ceil(math.log2(24 + 1))
        oracle = make_oracle(sys_of("AAAA"), PK, BPM, F(2))
        assert pf_via_dpf(oracle, levels_bpm(4), F(2))[0] == 1
        bps = make_oracle(sys_of("GGCC"), PK, BPS, F(3))
        assert pf_via_dpf(bps, levels_bps(4), F(3))[0] == 9

    def test_small_systems_rejected(self):
        oracle = make_oracle(sys_of("AT"), PK, BPM, F(2))
        with pytest.raises(InvalidInput):
            dmfe_via_dpf(oracle, levels_bpm(2), 0)
        with pytest.raises(InvalidInput):
            pf_via_dpf(oracle, levels_bpm(2), F(2))

    def test_separation_inequality(self):
        for n in range(2, 31):
            for x in (-5, -1, 0, 3):
                assert magnified_separation_holds(n, x)


class TestComposition:
    class SselBackedPF:
        """pf oracle synthesized from a brute ssel oracle (the level-count
        expansion), used to close the reduction cycle."""

        def __init__(self, inner, levels, base):
            self.inner = inner
            self.levels = levels
            self.base = base
            self.n = inner.n

        def pf(self, j=1, base=None):
            b = self.base if base is None else base
            return sum((self.inner.ssel(g) * F(b) ** (-j * g) for g in self.levels),
                       F(0))

    def test_cycle_is_identity_on_counts(self):
        rng = random.Random(8)
        for _ in range(10):
            n = rng.randint(3, 8)
            s = sys_of("".join(rng.choice("ACGU") for _ in range(n)))
            oracle = make_oracle(s, PK, BPM, F(2))
            lv = levels_bpm(n)
            synthetic = self.SselBackedPF(oracle, lv.levels, F(2))
            counts, _ = dos_via_pf(synthetic, lv, F(2))
            assert counts == {g: oracle.dos.ssel(g) for g in lv.levels}


class TestNNIntegration:
    """The reduction map is model-agnostic: drive it with a nearest-neighbour
    oracle and the sumset-DP candidate levels (single strand, so the
    symmetry term vanishes and the DP set is the full occupied set)."""

    def test_reductions_over_nn_oracle(self):
        from exfold.energy import nn_model, toy_params_a
        from exfold.levels import levels_nn_dp
        from exfold.strands import nn_space

        params = toy_params_a(16)
        for seq in ("GGGAAAACCC", "GCGCAAAGCGC"):
            system = sys_of(seq)
            oracle = make_oracle(system, nn_space(), nn_model(params), F(2))
            levels = levels_nn_dp(system, system.ids, params)
            assert set(oracle.dos.counts) <= set(levels.levels)

            assert mfe_via_dmfe(oracle, levels)[0] == oracle.dos.mfe()
            assert mfe_via_ssel(oracle, levels)[0] == oracle.dos.mfe()
            assert pf_via_ssel(oracle, levels, F(2))[0] == oracle.dos.pf(F(2))
            counts, _ = dos_via_pf(oracle, levels, F(2))
            assert counts == {g: oracle.dos.counts.get(g, 0) for g in levels.levels}
            for k in levels.levels:
                assert dmfe_via_dpf(oracle, levels, k)[0] == (oracle.dos.mfe() <= k)
            assert pf_via_dpf(oracle, levels, F(2))[0] == oracle.dos.pf(F(2))


class TestTranscripts:
    def test_json_shape(self):
        oracle = acgt_oracle()
        _, t = ssel_via_pf(oracle, levels_bpm(4), F(2), -1)
        payload = json.loads(t.to_json())
        assert payload["reduction"] == "ssel-via-pf"
        assert payload["call_count"] == 3 and len(payload["calls"]) == 3
        assert payload["calls"][0]["op"] == "pf"
        assert payload["calls"][0]["magnification"] == 1
        assert payload["details"]["counts"] == {"-2": "1", "-1": "2", "0": "1"}

    def test_inconsistent_oracle_detected(self):
        class Liar:
            n = 4

            def dmfe(self, k, j=1):
                return False

            def ssel(self, g, j=1):
                return 0

        with pytest.raises(OracleInconsistency):
            mfe_via_dmfe(Liar(), levels_bpm(4))
        with pytest.raises(OracleInconsistency):
            mfe_via_ssel(Liar(), levels_bpm(4))
