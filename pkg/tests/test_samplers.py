import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from treeperm.distributions import (
    EmpiricalDist,
    catalan,
    chi_square_gof,
    exact_fp_distribution,
    geometric,
    gw_progeny,
    size_biased_geometric_half,
    tv_distance,
)
from treeperm.perms import Permutation
from treeperm.rng import RngStream
from treeperm.samplers import (
    GWOverflowError,
    _log_progeny_tail,
    _progeny_tail_quantile,
    gw_total_progeny,
    gw_tree_truncated,
    kesten_truncated,
    measure_from_blocks,
    sample_limit_process,
    sample_progeny,
    sample_progeny_batch,
    uniform_avoider_321,
    uniform_dyck_path,
    uniform_tree,
)
from treeperm.trees import dyck_from_tree

GEOM_HALF = geometric(Fraction(1, 2))


class TestUniformTree:
    def test_single_vertex(self):
        rng = RngStream(1, 0)
        for _ in range(20):
            assert uniform_tree(1, rng).size == 1

    def test_sizes(self):
        rng = RngStream(1, 1)
        for v in (1, 2, 5, 33, 400):
            assert uniform_tree(v, rng).size == v

    def test_three_vertices_split_evenly(self):
        rng = RngStream(42, 10)
        count = Counter(
            dyck_from_tree(uniform_tree(3, rng)).word() for _ in range(100_000)
        )
        assert abs(count["UUDD"] / 100_000 - 0.5) <= 0.01

    def test_four_vertices_each_one_fifth(self):
        rng = RngStream(42, 11)
        count = Counter(
            dyck_from_tree(uniform_tree(4, rng)).word() for _ in range(100_000)
        )
        assert len(count) == 5
        for shape, tally in count.items():
            assert abs(tally / 100_000 - 0.2) <= 0.01

    @pytest.mark.parametrize("vertices", [4, 5, 6])
    def test_chi_square_uniformity(self, vertices):
        rng = RngStream(42, 12 + vertices)
        emp = EmpiricalDist.from_samples(
            dyck_from_tree(uniform_tree(vertices, rng)).word() for _ in range(100_000)
        )
        cells = catalan(vertices - 1)
        uniform = {shape: 1.0 / cells for shape in emp.counts}
        assert len(emp.counts) == cells
        _, _, p = chi_square_gof(emp, uniform)
        assert p > 0.001

    def test_dyck_path_sampler_edge_cases(self):
        rng = RngStream(3, 0)
        assert uniform_dyck_path(0, rng).word() == ""
        assert uniform_dyck_path(1, rng).word() == "UD"
        with pytest.raises(ValueError):
            uniform_dyck_path(-1, rng)


class TestUniformAvoider:
    def test_n1_constant(self):
        rng = RngStream(7, 0)
        assert all(uniform_avoider_321(1, rng).values == (1,) for _ in range(3))

    def test_n3_all_five_equally_likely(self):
        rng = RngStream(42, 20)
        count = Counter(uniform_avoider_321(3, rng).values for _ in range(100_000))
        assert len(count) == 5
        for tally in count.values():
            assert abs(tally / 100_000 - 0.2) <= 0.01

    def test_n4_first_point_fixed_probability(self):
        rng = RngStream(42, 21)
        hits = sum(uniform_avoider_321(4, rng)(1) == 1 for _ in range(100_000))
        assert abs(hits / 100_000 - 5 / 14) <= 0.01

    def test_sampled_law_matches_exact_distribution(self):
        # fixed-point-count law vs the enumeration oracle at a mid-size n
        rng = RngStream(42, 22)
        emp = EmpiricalDist.from_samples(
            len(uniform_avoider_321(8, rng).fixed_points()) for _ in range(30_000)
        )
        assert tv_distance(emp, exact_fp_distribution(8, Permutation((3, 2, 1)))) <= 0.02


class TestGWTree:
    def test_height_zero(self):
        rng = RngStream(5, 0)
        for _ in range(10):
            assert gw_tree_truncated(GEOM_HALF, 0, rng).size == 1

    def test_height_truncation_bounds_depth(self):
        rng = RngStream(5, 1)
        for _ in range(300):
            tree = gw_tree_truncated(GEOM_HALF, 3, rng)
            assert max(tree.depths) <= 3

    def test_supercritical_rejected(self):
        law = geometric(Fraction(1, 3))  # mean 2
        with pytest.raises(ValueError):
            gw_tree_truncated(law, 2, RngStream(5, 2))

    def test_overflow_is_a_distinct_outcome(self):
        rng = RngStream(5, 3)
        outcomes = Counter()
        for _ in range(400):
            try:
                outcomes[gw_tree_truncated(GEOM_HALF, None, rng, node_cap=8).size] += 1
            except GWOverflowError as exc:
                assert exc.generated > 8
                outcomes["overflow"] += 1
        assert outcomes["overflow"] > 0
        assert all(k == "overflow" or k <= 8 for k in outcomes)

    def test_size_law_atoms(self):
        # P(size = 1) = 1/2 and P(size = 2) = 1/8
        rng = RngStream(42, 30)
        sizes = Counter()
        for _ in range(100_000):
            try:
                sizes[gw_total_progeny(GEOM_HALF, rng, node_cap=10_000)] += 1
            except GWOverflowError:
                sizes["overflow"] += 1
        assert abs(sizes[1] / 100_000 - 0.5) <= 0.005
        assert abs(sizes[2] / 100_000 - 0.125) <= 0.005

    def test_object_sizes_match_size_only_walk(self):
        # the tree builder and the size-only level walk follow the same law
        rng = RngStream(42, 31)
        object_sizes = []
        for _ in range(50_000):
            try:
                object_sizes.append(
                    gw_tree_truncated(GEOM_HALF, None, rng, node_cap=500).size
                )
            except GWOverflowError:
                object_sizes.append(501)
        rng = RngStream(42, 32)
        walk_sizes = []
        for _ in range(50_000):
            try:
                walk_sizes.append(gw_total_progeny(GEOM_HALF, rng, node_cap=500))
            except GWOverflowError:
                walk_sizes.append(501)
        tv = tv_distance(
            EmpiricalDist.from_samples(object_sizes),
            EmpiricalDist.from_samples(walk_sizes),
            cap=50,
        )
        assert tv <= 0.02

    def test_conditioned_on_size_matches_uniform(self):
        # rejection-sample branching trees of exactly five vertices; their
        # shape law is uniform over the C_4 = 14 plane trees. Sample counts
        # sit well above the two-sample noise floor of the 0.02 tolerance.
        rng = RngStream(42, 33)
        shapes = Counter()
        accepted = 0
        while accepted < 20_000:
            try:
                tree = gw_tree_truncated(GEOM_HALF, None, rng, node_cap=5)
            except GWOverflowError:
                continue
            if tree.size == 5:
                shapes[dyck_from_tree(tree).word()] += 1
                accepted += 1
        rng = RngStream(42, 34)
        uniform = Counter(
            dyck_from_tree(uniform_tree(5, rng)).word() for _ in range(100_000)
        )
        tv = tv_distance(
            EmpiricalDist(dict(shapes), 20_000), EmpiricalDist(dict(uniform), 100_000)
        )
        assert len(shapes) == 14
        assert tv <= 0.02

    def test_generic_offspring_table(self):
        # a non-geometric subcritical law goes through the table sampler
        from treeperm.distributions import Pmf

        law = Pmf({0: 0.5, 1: 0.25, 2: 0.25}, name="custom")
        rng = RngStream(9, 0)
        degree_counts = Counter()
        for _ in range(30_000):
            tree = gw_tree_truncated(law, 1, rng)
            degree_counts[tree.root_degree] += 1
        for k, want in {0: 0.5, 1: 0.25, 2: 0.25}.items():
            assert abs(degree_counts[k] / 30_000 - want) < 0.01


class TestKesten:
    def test_height_zero(self):
        tree, spine = kesten_truncated(0, RngStream(11, 0))
        assert tree.size == 1 and spine == (0,)

    def test_spine_is_a_root_path_of_full_height(self):
        rng = RngStream(11, 1)
        for height in (1, 2, 5):
            for _ in range(200):
                tree, spine = kesten_truncated(height, rng)
                assert len(spine) == height + 1
                assert spine[0] == 0
                for parent, child in zip(spine, spine[1:]):
                    assert tree.parents[child] == parent
                assert [tree.depths[v] for v in spine] == list(range(height + 1))

    def test_truncation_height_respected(self):
        rng = RngStream(11, 2)
        for _ in range(200):
            tree, _ = kesten_truncated(3, rng)
            assert max(tree.depths) <= 3

    def test_root_degree_is_size_biased(self):
        rng = RngStream(42, 40)
        count = Counter(kesten_truncated(1, rng)[0].root_degree for _ in range(100_000))
        assert abs(count[1] / 100_000 - 0.25) <= 0.005
        assert abs(count[2] / 100_000 - 0.25) <= 0.005

    def test_negative_height_rejected(self):
        with pytest.raises(ValueError):
            kesten_truncated(-1, RngStream(11, 3))


class TestProgenySampler:
    def test_single_draws_deterministic(self):
        assert [sample_progeny(RngStream(3, 7)) for _ in range(5)] == [
            sample_progeny(RngStream(3, 7)) for _ in range(5)
        ]

    def test_batch_tv_against_pmf(self):
        rng = RngStream(42, 50)
        draws = sample_progeny_batch(1_000_000, rng)
        emp = EmpiricalDist.from_samples(draws.tolist())
        assert tv_distance(emp, gw_progeny(), cap=50) <= 0.005

    def test_two_sample_against_branching_sizes(self):
        rng = RngStream(42, 51)
        sizes = []
        for _ in range(300_000):
            try:
                sizes.append(gw_total_progeny(GEOM_HALF, rng, node_cap=51))
            except GWOverflowError:
                sizes.append(51)
        draws = sample_progeny_batch(300_000, RngStream(42, 52))
        tv = tv_distance(
            EmpiricalDist.from_samples(sizes),
            EmpiricalDist.from_samples(draws.tolist()),
            cap=50,
        )
        assert tv <= 0.01

    def test_tail_quantile_monotone_and_past_table(self):
        table = 4096
        values = [
            _progeny_tail_quantile(w, table)
            for w in (0.008, 0.004, 0.001, 1e-5, 1e-8)
        ]
        assert values == sorted(values)
        assert values[0] > table

    def test_log_tail_crossover_consistency(self):
        # lgamma evaluation and the Stirling series agree where they meet
        for k in (10**6 - 1, 10**6, 10**6 + 1, 2 * 10**6):
            exact = math.lgamma(2 * k + 1) - 2 * math.lgamma(k + 1) - k * math.log(4)
            series = -0.5 * math.log(math.pi * k) - 1 / (8 * k) + 1 / (192 * k**3)
            assert abs(exact - series) < 1e-8

    def test_log_tail_matches_exact_fraction(self):
        for k in (10, 100, 4096):
            want = math.log(math.comb(2 * k, k)) - k * math.log(4)
            assert abs(_log_progeny_tail(k) - want) < 1e-9

    def test_small_table_exercises_tail_heavily(self):
        # with an 8-atom table nearly 20% of draws invert the analytic tail
        rng = RngStream(42, 53)
        draws = sample_progeny_batch(200_000, rng, table_atoms=8)
        emp = EmpiricalDist.from_samples(draws.tolist())
        assert tv_distance(emp, gw_progeny(), cap=60) <= 0.01

    def test_tail_against_branching_rejection_oracle(self):
        # the analytic tail inversion must match conditioning a branching tree
        # on exceeding the table, the construction it replaces; compared on
        # coarse buckets so two-sample noise stays far below the tolerance
        table = 8

        def bucket(size):
            for hi in (12, 20, 40, 100):
                if size <= hi:
                    return hi
            return "huge"

        rng = RngStream(42, 54)
        draws = sample_progeny_batch(200_000, rng, table_atoms=table)
        tail_draws = [bucket(int(d)) for d in draws if d > table]
        oracle_rng = RngStream(42, 55)
        oracle = []
        while len(oracle) < len(tail_draws):
            try:
                size = gw_total_progeny(GEOM_HALF, oracle_rng, node_cap=101)
            except GWOverflowError:
                size = 101
            if size > table:
                oracle.append(bucket(size))
        tv = tv_distance(
            EmpiricalDist.from_samples(tail_draws),
            EmpiricalDist.from_samples(oracle),
        )
        assert tv <= 0.015


class TestLimitProcess:
    def test_zero_blocks_gives_empty_measure(self):
        assert measure_from_blocks(()) .positions == ()
        rng = RngStream(13, 0)
        for _ in range(200):
            draw = sample_limit_process(rng)
            if not draw.front_blocks:
                assert len(draw.front) == 0
            assert draw.num_front_blocks == len(draw.front_blocks)

    def test_measures_sit_at_partial_sums_of_singletons(self):
        assert measure_from_blocks((2, 1, 3, 1)).positions == (3, 7)
        assert measure_from_blocks((1, 1, 1)).positions == (1, 2, 3)

    def test_atom_at_one_probability(self):
        rng = RngStream(42, 60)
        hits = 0
        trials = 1_000_000
        from treeperm.experiments import limit_front_batch

        fronts, _ = limit_front_batch(trials, rng)
        hits = sum(1 for f in fronts if f.size and f[0] == 1)
        assert abs(hits / trials - 0.25) <= 0.002

    def test_front_atom_count_is_geometric_two_thirds(self):
        rng = RngStream(42, 61)
        from treeperm.experiments import limit_front_batch

        fronts, _ = limit_front_batch(1_000_000, rng)
        empty = sum(1 for f in fronts if f.size == 0)
        assert abs(empty / 1_000_000 - 2 / 3) <= 0.005
        emp = EmpiricalDist.from_samples(int(f.size) for f in fronts)
        assert tv_distance(emp, geometric(Fraction(2, 3))) <= 0.005
