import itertools
import math

import pytest

from treeperm.perms import (
    FixedPointMeasure,
    Permutation,
    contains_321,
    contains_pattern,
    enumerate_avoiders,
    validate_permutation,
)

FIGURE_PERM = (2, 3, 1, 5, 8, 4, 9, 10, 6, 11, 7)

ALL_S3 = [(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)]


def catalan(m):
    return math.comb(2 * m, m) // (m + 1)


def brute_contains(values, pattern):
    """Independent oracle: scan every index subset of the right size."""
    k = len(pattern)
    for subset in itertools.combinations(range(len(values)), k):
        picked = [values[i] for i in subset]
        if all(
            (picked[s] < picked[t]) == (pattern[s] < pattern[t])
            for s in range(k)
            for t in range(s + 1, k)
        ):
            return True
    return False


class TestValidation:
    def test_singleton(self):
        assert validate_permutation([1]).values == (1,)

    def test_worked_example_is_valid(self):
        perm = validate_permutation(FIGURE_PERM)
        assert perm.n == 11

    @pytest.mark.parametrize("bad", [[1, 1], [], [2], [0, 1], [1, 3]])
    def test_rejects_non_bijections(self, bad):
        with pytest.raises(ValueError):
            validate_permutation(bad)

    def test_text_round_trip(self):
        perm = Permutation.from_text("2 3 1 5 8 4 9 10 6 11 7")
        assert perm.values == FIGURE_PERM
        assert str(perm) == "2 3 1 5 8 4 9 10 6 11 7"

    def test_one_based_application(self):
        perm = Permutation(FIGURE_PERM)
        assert perm(1) == 2 and perm(11) == 7
        with pytest.raises(IndexError):
            perm(0)


class TestContainsPattern:
    def test_self_containment(self):
        p = Permutation((3, 2, 1))
        assert contains_pattern(p, p)

    def test_worked_example_avoids_321(self):
        assert not contains_pattern(Permutation(FIGURE_PERM), Permutation((3, 2, 1)))

    @pytest.mark.parametrize("pattern", ALL_S3)
    def test_worked_example_against_brute_force(self, pattern):
        got = contains_pattern(Permutation(FIGURE_PERM), Permutation(pattern))
        assert got == brute_contains(FIGURE_PERM, pattern)

    def test_spec_case_231_vs_213(self):
        assert not contains_pattern(Permutation((2, 3, 1)), Permutation((2, 1, 3)))

    def test_rejects_long_patterns(self):
        with pytest.raises(ValueError):
            contains_pattern(Permutation((1, 2, 3, 4, 5)), Permutation((1, 2, 3, 4, 5)))

    def test_length_four_patterns(self):
        assert contains_pattern(Permutation((5, 1, 4, 2, 3)), Permutation((3, 1, 2, 4))) \
            == brute_contains((5, 1, 4, 2, 3), (3, 1, 2, 4))
        for values in itertools.permutations(range(1, 6)):
            for pattern in [(1, 2, 3, 4), (2, 4, 1, 3), (4, 3, 2, 1)]:
                assert contains_pattern(Permutation(values), Permutation(pattern)) == \
                    brute_contains(values, pattern)


class TestContains321Linear:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_agrees_with_exhaustive_search_up_to_8(self, n):
        pattern = Permutation((3, 2, 1))
        for values in itertools.permutations(range(1, n + 1)):
            perm = Permutation(values)
            want = brute_contains(values, (3, 2, 1))
            assert contains_321(perm) == want
            assert contains_pattern(perm, pattern) == want


class TestFixedPoints:
    def test_identity(self):
        assert tuple(Permutation((1, 2)).fixed_points()) == (1, 2)

    def test_worked_example_has_none(self):
        perm = Permutation(FIGURE_PERM)
        # direct check of tau(i) = i at every position
        assert all(v != i for i, v in enumerate(perm.values, 1))
        assert tuple(perm.fixed_points()) == ()

    def test_single(self):
        assert tuple(Permutation((1, 3, 2)).fixed_points()) == (1,)

    def test_measure_validation(self):
        with pytest.raises(ValueError):
            FixedPointMeasure((2, 2))
        with pytest.raises(ValueError):
            FixedPointMeasure((0,))
        assert FixedPointMeasure((1, 5)).restrict(2, 9).positions == (5,)


class TestLeftToRightMaxima:
    def test_worked_example(self):
        idx, vals = Permutation(FIGURE_PERM).left_to_right_maxima()
        assert idx == (1, 2, 4, 5, 7, 8, 10)
        assert vals == (2, 3, 5, 8, 9, 10, 11)

    def test_increasing_permutation(self):
        idx, _ = Permutation((1, 2, 3)).left_to_right_maxima()
        assert idx == (1, 2, 3)

    def test_decreasing_permutation(self):
        idx, _ = Permutation((3, 2, 1)).left_to_right_maxima()
        assert idx == (1,)

    @pytest.mark.parametrize("n", range(1, 8))
    def test_values_increase_and_end_at_n(self, n):
        for values in itertools.permutations(range(1, n + 1)):
            idx, vals = Permutation(values).left_to_right_maxima()
            assert idx[0] == 1 and vals[-1] == n
            assert all(a < b for a, b in zip(vals, vals[1:]))


class TestFixedPointMeasures:
    def test_identity_n2(self):
        front, back = Permutation((1, 2)).fixed_point_measures()
        assert tuple(front) == (1,) and tuple(back) == (1,)

    def test_back_half_atom(self):
        front, back = Permutation((2, 1, 3)).fixed_point_measures()
        assert tuple(front) == () and tuple(back) == (1,)

    def test_worked_example_empty(self):
        front, back = Permutation(FIGURE_PERM).fixed_point_measures()
        assert len(front) == 0 and len(back) == 0

    @pytest.mark.parametrize("n", range(1, 8))
    def test_partition_of_fixed_points(self, n):
        half = n // 2
        for values in itertools.permutations(range(1, n + 1)):
            perm = Permutation(values)
            front, back = perm.fixed_point_measures()
            rebuilt = sorted(tuple(front) + tuple(n + 1 - j for j in back))
            assert rebuilt == list(perm.fixed_points())
            assert all(i <= half for i in front)


class TestEnumerateAvoiders:
    def test_n3_321(self):
        got = [p.values for p in enumerate_avoiders(3, Permutation((3, 2, 1)))]
        assert got == [(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2)]

    def test_n8_catalan_count(self):
        assert sum(1 for _ in enumerate_avoiders(8, Permutation((3, 2, 1)))) == 1430

    @pytest.mark.parametrize("pattern", ALL_S3)
    def test_n1(self, pattern):
        assert [p.values for p in enumerate_avoiders(1, Permutation(pattern))] == [(1,)]

    @pytest.mark.parametrize("pattern", ALL_S3)
    @pytest.mark.parametrize("n", range(1, 7))
    def test_matches_brute_filter(self, n, pattern):
        got = [p.values for p in enumerate_avoiders(n, Permutation(pattern))]
        want = [
            values
            for values in itertools.permutations(range(1, n + 1))
            if not brute_contains(values, pattern)
        ]
        assert got == want  # includes lexicographic order

    @pytest.mark.parametrize("pattern", [(3, 2, 1), (1, 3, 2), (2, 1, 3)])
    @pytest.mark.parametrize("n", range(1, 11))
    def test_catalan_counts(self, n, pattern):
        assert sum(1 for _ in enumerate_avoiders(n, Permutation(pattern))) == catalan(n)

    def test_guards(self):
        with pytest.raises(ValueError):
            list(enumerate_avoiders(0, Permutation((3, 2, 1))))
        with pytest.raises(ValueError):
            list(enumerate_avoiders(13, Permutation((3, 2, 1))))
        with pytest.raises(ValueError):
            list(enumerate_avoiders(3, Permutation((2, 1, 4, 3))))
