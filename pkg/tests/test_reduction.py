import math

import pytest

from lprl import (
    AlphaSpec,
    ConstructionCache,
    EventuallyOne,
    ExpLadder,
    FiniteOnes,
    PeriodicOnes,
    alpha_bit,
    bad_row,
    build_node,
    continuity_check,
    divergence_witness,
    export_prefix,
    f_blocks,
    in_p3,
    join_blocks,
    pair,
    path_bits,
    pnorm_pow,
    prefix_certificate,
    scale,
    scale_prefix,
    stabilization_check,
    standard_corpus,
    unit_ball_check,
)

from oracles import power_sum_plain

ZERO = AlphaSpec.from_rows({})
ROW0_ALWAYS = AlphaSpec.from_rows({0: EventuallyOne(0)})


class TestAlphaBit:
    def test_all_zero(self):
        assert all(alpha_bit(ZERO, n) == 0 for n in range(50))

    def test_eventually_one_row(self):
        spec = AlphaSpec.from_rows({0: EventuallyOne(0)})
        assert alpha_bit(spec, 2) == 1  # cell (0, 1)

    def test_finite_row(self):
        spec = AlphaSpec.from_rows({1: FiniteOnes(frozenset({0}))})
        assert alpha_bit(spec, 1) == 1  # cell (1, 0)
        assert alpha_bit(spec, 4) == 0  # cell (1, 1)

    def test_periodic_row(self):
        spec = AlphaSpec.from_rows({0: PeriodicOnes(1, 2, 0)})
        # ones at columns 1, 3, 5, ... of row 0
        assert alpha_bit(spec, pair(0, 1)) == 1
        assert alpha_bit(spec, pair(0, 2)) == 0
        assert alpha_bit(spec, pair(0, 3)) == 1


class TestMembership:
    def test_all_zero_is_member(self):
        assert in_p3(ZERO)

    def test_periodic_row_breaks_membership(self):
        assert not in_p3(AlphaSpec.from_rows({2: PeriodicOnes(0, 3, 0)}))

    def test_finite_rows_are_member(self):
        spec = AlphaSpec.from_rows({0: FiniteOnes(frozenset({5, 7})),
                                    3: FiniteOnes(frozenset())})
        assert in_p3(spec)

    def test_corpus_split(self):
        corpus = standard_corpus()
        assert [in_p3(s) for s in corpus] == [True] * 4 + [False] * 4


class TestBlocks:
    def test_all_zero_path(self, cache02):
        bd = f_blocks(cache02, ZERO, 5)
        assert len(bd.blocks) == 6
        for u in bd.blocks:
            assert u.materialize() == (0.0,)
        assert join_blocks(bd.blocks).materialize() == (0.0,) * 6

    def test_single_block_is_phi(self, cache02):
        bd = f_blocks(cache02, ROW0_ALWAYS, 0)
        node = build_node(cache02, (1,))
        assert bd.blocks[0] == node.phi

    def test_block_bound_small_depth(self, cache02):
        bd = f_blocks(cache02, ROW0_ALWAYS, 2)
        for t, u in enumerate(bd.blocks):
            assert pnorm_pow(u, 2.0) < 2.0 ** -(t + 1)

    def test_path_consistency(self, cache02):
        bd5 = f_blocks(cache02, ROW0_ALWAYS, 5)
        bd8 = f_blocks(cache02, ROW0_ALWAYS, 8)
        assert bd8.blocks[:6] == bd5.blocks


class TestUnitBall:
    def test_zero_path(self, cache02):
        rep = unit_ball_check(f_blocks(cache02, ZERO, 8))
        assert rep.ok

    def test_cumulative_under_geometric(self, cache02):
        bd = f_blocks(cache02, ROW0_ALWAYS, 10)
        rep = unit_ball_check(bd)
        assert rep.ok
        total = math.fsum(pnorm_pow(u, 2.0) for u in bd.blocks)
        assert total <= 1 - 2.0 ** -11

    def test_scaled_blocks_scale_quadratically(self, cache02):
        bd = f_blocks(cache02, ROW0_ALWAYS, 6)
        total = math.fsum(pnorm_pow(u, 2.0) for u in bd.blocks)
        scaled = math.fsum(pnorm_pow(scale(u, 0.5), 2.0) for u in bd.blocks)
        assert abs(scaled - total / 4) < 1e-12
        assert scaled <= 0.25


class TestContinuity:
    def test_identical_specs(self, cache02):
        rep = continuity_check(cache02, ROW0_ALWAYS, ROW0_ALWAYS, 4, 2)
        assert rep.ok
        dist_check = [c for c in rep.checks if c.label == "truncated-distance"][0]
        assert dist_check.lhs == 0

    def test_late_disagreement_within_bound(self, cache02):
        a = ZERO
        b = AlphaSpec.from_rows({0: FiniteOnes(frozenset({3}))})  # first one at cell index 9
        rep = continuity_check(cache02, a, b, 6, 2)
        assert rep.ok

    def test_shared_blocks_identical(self, cache02):
        a = AlphaSpec.from_rows({0: FiniteOnes(frozenset({0}))})
        b = AlphaSpec.from_rows({0: FiniteOnes(frozenset({0, 3}))})
        rep = continuity_check(cache02, a, b, 5, 2)
        assert rep.ok
        assert any(c.label == "shared-blocks-identical" and c.ok for c in rep.checks)

    def test_early_disagreement_rejected(self, cache02):
        b = AlphaSpec.from_rows({0: FiniteOnes(frozenset({0}))})
        with pytest.raises(ValueError):
            continuity_check(cache02, ZERO, b, 4, 2)


class TestDivergence:
    def test_walks_past_target(self, cache02):
        w = divergence_witness(cache02, ROW0_ALWAYS, 0, 3.0)
        assert w.norm_value > 3.0
        # independent re-summation of the winning prefix
        bits = None
        for k in (0, 2, 5, 9):
            node = build_node(cache02, path_bits(ROW0_ALWAYS, k))
            if node.phi.length == w.prefix_len:
                bits = path_bits(ROW0_ALWAYS, k)
        assert bits is not None
        prefix = build_node(cache02, bits).phi.materialize()
        assert abs(power_sum_plain(prefix, 1.0) - w.norm_value) < 1e-9

    def test_target_zero_stops_first(self, cache02):
        w = divergence_witness(cache02, ROW0_ALWAYS, 0, 0.0)
        first = build_node(cache02, (1,))
        assert w.prefix_len == first.phi.length
        assert w.norm_value > 1.0

    def test_monotone_in_target(self, cache02):
        lengths = [divergence_witness(cache02, ROW0_ALWAYS, 0, t).prefix_len
                   for t in (0.0, 1.5, 3.0)]
        assert lengths == sorted(lengths)

    def test_finite_row_rejected(self, cache02):
        spec = AlphaSpec.from_rows({0: FiniteOnes(frozenset({1}))})
        with pytest.raises(ValueError):
            divergence_witness(cache02, spec, 0, 1.0)


class TestStabilization:
    def test_all_zero_keeps_unit_cap(self, cache02):
        rep = stabilization_check(cache02, ZERO, 0, 12)
        assert rep.ok
        for k in range(13):
            node = build_node(cache02, path_bits(ZERO, k))
            assert node.M[0] == 1

    def test_late_row_does_not_move_early_cap(self, cache02):
        spec = AlphaSpec.from_rows({3: FiniteOnes(frozenset({0, 1}))})
        rep = stabilization_check(cache02, spec, 0, 12)
        assert rep.ok

    def test_requires_membership(self, cache02):
        with pytest.raises(ValueError):
            stabilization_check(cache02, ROW0_ALWAYS, 0, 8)

    def test_beyond_max_k_reports_nothing_to_check(self, cache02):
        spec = AlphaSpec.from_rows({2: FiniteOnes(frozenset({4}))})
        rep = stabilization_check(cache02, spec, 2, 5)
        assert rep.ok
        assert rep.counts["cap-stable"] == 0


class TestScalePrefix:
    def test_identity(self, cache02):
        pc = prefix_certificate(cache02, ROW0_ALWAYS, 4)
        assert scale_prefix(pc, 1.0).prefix == pc.prefix

    def test_quadratic_tail_scaling(self, cache02):
        pc = prefix_certificate(cache02, ROW0_ALWAYS, 4)
        spc = scale_prefix(pc, 0.5)
        assert spc.tail_q_bound == pc.tail_q_bound / 4
        assert abs(pnorm_pow(spc.prefix, 2.0) - pnorm_pow(pc.prefix, 2.0) / 4) < 1e-12

    def test_divergence_survives_scaling(self, cache02):
        # scaling by delta rescales every p-power sum by delta**p, so the
        # witness argument goes through at the scaled target
        w = divergence_witness(cache02, ROW0_ALWAYS, 0, 3.0)
        delta = 0.5
        node = None
        for k in (0, 2, 5, 9, 14):
            cand = build_node(cache02, path_bits(ROW0_ALWAYS, k))
            if cand.phi.length == w.prefix_len:
                node = cand
        scaled_value = pnorm_pow(scale(node.phi, delta), 1.0)
        assert scaled_value > 3.0 * delta ** 1.0

    def test_rejects_nonpositive(self, cache02):
        pc = prefix_certificate(cache02, ZERO, 3)
        with pytest.raises(ValueError):
            scale_prefix(pc, 0.0)


class TestPrefixExport:
    def test_one_value_per_line_roundtrip(self, cache02, tmp_path):
        pc = prefix_certificate(cache02, ROW0_ALWAYS, 3)
        path = export_prefix(pc, tmp_path / "prefix.txt")
        lines = path.read_text().splitlines()
        assert lines[0].startswith("#")
        values = tuple(float(v) for v in lines[1:])
        assert values == pc.prefix.materialize()


class TestCorpus:
    def test_bad_rows(self):
        corpus = standard_corpus()
        assert [bad_row(s) for s in corpus] == [None] * 4 + [0, 1, 2, 3]

    def test_stabilization_positions_within_depth_twelve(self):
        # every declared row <= 2 keeps its ones in columns <= 1
        for spec in standard_corpus()[:4]:
            for i in range(3):
                j0 = 0
                for r in range(i + 1):
                    pat = spec.row_pattern(r)
                    if pat is not None:
                        j0 = max(j0, pat.zero_from())
                assert pair(i, j0) <= 12
