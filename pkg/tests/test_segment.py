import numpy as np
import pytest

import blockseg as bs
from blockseg import EnumerationBudgetError, ParameterError

from conftest import symmetric_from


def delta_direct(ranks, a, b):
    """Segment cost by direct summation over the rank rows, no prefix sums."""
    n = ranks.n
    length = b - a + 1
    total = 0.0
    for i in range(n):
        mean = ranks.ranks[i, a - 1 : b].mean()
        total += (mean - (n + 1) / 2) ** 2
    return length * total


class TestBoundaries:
    def test_valid(self):
        b = bs.Boundaries(10, (2, 5, 9))
        assert b.count == 3
        assert b.edges() == (0, 2, 5, 9, 10)

    @pytest.mark.parametrize("cuts", [(0,), (10,), (3, 3), (5, 2)])
    def test_invalid_cuts(self, cuts):
        with pytest.raises(ParameterError):
            bs.Boundaries(10, cuts)

    def test_order_too_small(self):
        with pytest.raises(ParameterError):
            bs.Boundaries(1, ())


class TestCostTable:
    def test_two_by_two_hand_values(self):
        r = bs.compute_ranks(bs.SymMatrix.from_array([[1.0, 2.0], [2.0, 1.0]]))
        cost = bs.build_cost_table(r)
        assert cost.value(1, 1) == pytest.approx(0.5, abs=1e-12)
        assert cost.value(2, 2) == pytest.approx(0.5, abs=1e-12)
        assert cost.value(1, 2) == pytest.approx(0.0, abs=1e-12)

    def test_full_segment_costs_zero_without_ties(self, rng):
        r = bs.compute_ranks(symmetric_from(rng, 9))
        cost = bs.build_cost_table(r)
        assert cost.value(1, 9) == 0.0

    def test_matches_direct_summation(self, rng):
        r = bs.compute_ranks(symmetric_from(rng, 6))
        cost = bs.build_cost_table(r)
        for a in range(1, 7):
            for b in range(a, 7):
                assert cost.value(a, b) == pytest.approx(
                    delta_direct(r, a, b), abs=1e-9
                )

    def test_additivity_with_statistic(self, rng):
        n = 12
        r = bs.compute_ranks(symmetric_from(rng, n))
        cost = bs.build_cost_table(r)
        cuts = bs.Boundaries(n, (3, 7, 10))
        total = sum(
            cost.value(e0 + 1, e1)
            for e0, e1 in zip(cuts.edges()[:-1], cuts.edges()[1:])
        )
        assert bs.s_multi(r, cuts).s_value == pytest.approx(
            4.0 * total / n**2, abs=1e-9
        )

    def test_value_range_check(self, rng):
        cost = bs.build_cost_table(bs.compute_ranks(symmetric_from(rng, 5)))
        with pytest.raises(ParameterError):
            cost.value(3, 2)
        with pytest.raises(ParameterError):
            cost.value(0, 2)


class TestDP:
    def test_level_zero_is_whole_segment(self, rng):
        r = bs.compute_ranks(symmetric_from(rng, 8))
        cost = bs.build_cost_table(r)
        res = bs.dp_segment(cost, 3)
        assert res.level(0).boundaries.cuts == ()
        assert res.level(0).objective == cost.value(1, 8)

    def test_matches_exhaustive_small(self, rng):
        r = bs.compute_ranks(symmetric_from(rng, 6))
        cost = bs.build_cost_table(r)
        res = bs.dp_segment(cost, 2)
        for l in (1, 2):
            obj, cuts = bs.brute_force_segment(cost, l)
            assert res.level(l).objective == pytest.approx(obj, abs=1e-9)
            assert res.level(l).boundaries.cuts == cuts.cuts

    def test_chessboard_20_recovers_cut(self):
        layout = bs.chessboard(
            20,
            bs.DistSpec.normal(5.0, 0.1),
            bs.DistSpec.normal(0.0, 0.1),
            cuts=bs.Boundaries(20, (10,)),
        )
        m = bs.gen_matrix(layout, seed=4)
        res = bs.detect(m, l_max=1)
        assert res.level(1).boundaries.cuts == (10,)

    def test_campaign_against_bruteforce(self, rng):
        for _ in range(60):
            n = int(rng.integers(4, 11))
            cost = bs.build_cost_table(bs.compute_ranks(symmetric_from(rng, n)))
            l_top = min(3, n - 1)
            res = bs.dp_segment(cost, l_top)
            for l in range(l_top + 1):
                obj, cuts = bs.brute_force_segment(cost, l)
                lv = res.level(l)
                assert abs(lv.objective - obj) <= 1e-9
                assert lv.boundaries.cuts == cuts.cuts

    def test_recursion_consistency(self, rng):
        n = 9
        cost = bs.build_cost_table(bs.compute_ranks(symmetric_from(rng, n)))
        res = bs.dp_segment(cost, 3)
        table = res.objective_table
        for level in range(1, 4):
            for p in range(1, n + 1):
                cands = [
                    table[level - 1, m] + cost.delta[m, p - 1]
                    for m in range(1, p)
                    if np.isfinite(table[level - 1, m])
                ]
                want = max(cands) if cands else -np.inf
                assert table[level, p] == pytest.approx(want, abs=1e-9) or (
                    not np.isfinite(table[level, p]) and not np.isfinite(want)
                )

    def test_statistic_linkage(self, rng):
        n = 14
        r = bs.compute_ranks(symmetric_from(rng, n))
        res = bs.dp_segment(bs.build_cost_table(r), 4)
        for l in range(1, 5):
            lv = res.level(l)
            assert lv.s_value == pytest.approx(
                bs.s_multi(r, lv.boundaries).s_value, abs=1e-9
            )

    def test_objective_nondecreasing_in_level(self, rng):
        for _ in range(10):
            n = int(rng.integers(6, 16))
            cost = bs.build_cost_table(bs.compute_ranks(symmetric_from(rng, n)))
            res = bs.dp_segment(cost, min(5, n - 1))
            objs = [lv.objective for lv in res.levels]
            assert all(b >= a - 1e-12 for a, b in zip(objs, objs[1:]))

    def test_block_preserving_permutation_equivariance(self, rng):
        # A permutation that maps each block onto itself preserves every
        # block-aligned segment cost and hence the objective evaluated at
        # the block cuts (segments straddling blocks may change).
        n = 12
        m = symmetric_from(rng, n)
        cuts = bs.Boundaries(n, (4, 8))
        perm = np.concatenate(
            [rng.permutation(np.arange(a, b)) for a, b in [(0, 4), (4, 8), (8, 12)]]
        )
        shuffled = bs.SymMatrix.from_array(np.ascontiguousarray(m.values[np.ix_(perm, perm)]))
        cost_a = bs.build_cost_table(bs.compute_ranks(m))
        cost_b = bs.build_cost_table(bs.compute_ranks(shuffled))
        edges = cuts.edges()
        for e0, e1 in zip(edges[:-1], edges[1:]):
            assert cost_a.value(e0 + 1, e1) == pytest.approx(
                cost_b.value(e0 + 1, e1), abs=1e-9
            )
        s_a = bs.s_multi(bs.compute_ranks(m), cuts).s_value
        s_b = bs.s_multi(bs.compute_ranks(shuffled), cuts).s_value
        assert s_a == pytest.approx(s_b, abs=1e-9)

    def test_detected_cuts_stable_under_block_permutation(self, rng):
        layout = bs.chessboard(
            20,
            bs.DistSpec.normal(4.0, 0.2),
            bs.DistSpec.normal(0.0, 0.2),
            cuts=bs.Boundaries(20, (10,)),
        )
        m = bs.gen_matrix(layout, seed=11)
        perm = np.concatenate([rng.permutation(10), 10 + rng.permutation(10)])
        shuffled = bs.SymMatrix.from_array(np.ascontiguousarray(m.values[np.ix_(perm, perm)]))
        assert bs.detect(m, 1).level(1).boundaries.cuts == (10,)
        assert bs.detect(shuffled, 1).level(1).boundaries.cuts == (10,)

    def test_min_seg_respected(self, rng):
        n = 12
        cost = bs.build_cost_table(bs.compute_ranks(symmetric_from(rng, n)))
        res = bs.dp_segment(cost, 3, min_seg=3)
        for lv in res.levels:
            edges = lv.boundaries.edges()
            assert all(e1 - e0 >= 3 for e0, e1 in zip(edges[:-1], edges[1:]))

    def test_infeasible_combination(self, rng):
        cost = bs.build_cost_table(bs.compute_ranks(symmetric_from(rng, 6)))
        with pytest.raises(ParameterError):
            bs.dp_segment(cost, 2, min_seg=3)
        with pytest.raises(ParameterError):
            bs.dp_segment(cost, -1)
        with pytest.raises(ParameterError):
            bs.dp_segment(cost, 1, min_seg=0)


class TestBruteForce:
    def test_level_zero(self, rng):
        cost = bs.build_cost_table(bs.compute_ranks(symmetric_from(rng, 7)))
        obj, cuts = bs.brute_force_segment(cost, 0)
        assert cuts.cuts == ()
        assert obj == cost.value(1, 7)

    def test_forced_partition(self, rng):
        cost = bs.build_cost_table(bs.compute_ranks(symmetric_from(rng, 4)))
        _, cuts = bs.brute_force_segment(cost, 3, min_seg=1)
        assert cuts.cuts == (1, 2, 3)

    def test_budget_guard(self, rng):
        cost = bs.build_cost_table(bs.compute_ranks(symmetric_from(rng, 30)))
        with pytest.raises(EnumerationBudgetError):
            bs.brute_force_segment(cost, 10, budget=1000)
