"""Permutations in one-line notation: pattern avoidance and fixed-point statistics.

Positions and values are 1-based throughout; a permutation of {1..n} is stored
as the tuple (tau(1), ..., tau(n)).
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass

MAX_PATTERN_LENGTH = 4
MAX_ENUMERATION_N = 12


@dataclass(frozen=True, order=True)
class FixedPointMeasure:
    """Strictly increasing positive integer positions, each an atom of mass one."""

    positions: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(int(p) for p in self.positions))
        prev = 0
        for p in self.positions:
            if p <= prev:
                raise ValueError("positions must be strictly increasing and >= 1")
            prev = p

    def __len__(self) -> int:
        return len(self.positions)

    def __iter__(self) -> Iterator[int]:
        return iter(self.positions)

    def __contains__(self, position: int) -> bool:
        return position in self.positions

    def restrict(self, lo: int, hi: int) -> "FixedPointMeasure":
        """Atoms inside the closed window [lo, hi]."""
        return FixedPointMeasure(tuple(p for p in self.positions if lo <= p <= hi))


@dataclass(frozen=True, order=True)
class Permutation:
    """A permutation of {1..n} in one-line notation."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        n = len(vals)
        if n == 0:
            raise ValueError("permutation must have length >= 1")
        seen = [False] * (n + 1)
        for v in vals:
            if v < 1 or v > n:
                raise ValueError(f"value {v} outside 1..{n}")
            if seen[v]:
                raise ValueError(f"duplicate value {v}")
            seen[v] = True

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def __call__(self, position: int) -> int:
        """Image of the 1-based position."""
        if not 1 <= position <= len(self.values):
            raise IndexError(f"position {position} outside 1..{len(self.values)}")
        return self.values[position - 1]

    def __str__(self) -> str:
        return " ".join(str(v) for v in self.values)

    @classmethod
    def from_text(cls, text: str) -> "Permutation":
        """Parse space-separated one-line notation, e.g. "2 3 1"."""
        return cls(tuple(int(tok) for tok in text.split()))

    def fixed_points(self) -> FixedPointMeasure:
        """The positions i with tau(i) = i, as a unit-mass measure."""
        return FixedPointMeasure(
            tuple(i for i, v in enumerate(self.values, 1) if v == i)
        )

    def left_to_right_maxima(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """1-based indices of the left-to-right maxima, with their values."""
        indices: list[int] = []
        values: list[int] = []
        best = 0
        for i, v in enumerate(self.values, 1):
            if v > best:
                indices.append(i)
                values.append(v)
                best = v
        return tuple(indices), tuple(values)

    def fixed_point_measures(self) -> tuple[FixedPointMeasure, FixedPointMeasure]:
        """Fixed points split at floor(n/2).

        The front measure keeps positions i <= floor(n/2) as they are; the back
        measure records each fixed point i > floor(n/2) at n + 1 - i, i.e.
        counted from the right end.
        """
        n = len(self.values)
        half = n // 2
        front = [i for i in self.fixed_points() if i <= half]
        back = [n + 1 - i for i in self.fixed_points() if i > half]
        return FixedPointMeasure(tuple(front)), FixedPointMeasure(tuple(reversed(back)))

    def contains(self, pattern: "Permutation") -> bool:
        return contains_pattern(self, pattern)


def validate_permutation(values: Iterable[int]) -> Permutation:
    """Build a Permutation, rejecting anything that is not a bijection of {1..n}."""
    return Permutation(tuple(values))


def contains_pattern(perm: Permutation, pattern: Permutation) -> bool:
    """Whether perm contains an order-isomorphic copy of the pattern.

    Exhaustive subsequence search with pruning; patterns longer than
    MAX_PATTERN_LENGTH are rejected to keep the search tractable.
    """
    k = len(pattern)
    if k > MAX_PATTERN_LENGTH:
        raise ValueError(f"patterns longer than {MAX_PATTERN_LENGTH} are not supported")
    vals = perm.values
    pat = pattern.values
    n = len(vals)
    if k > n:
        return False

    def compatible(chosen: list[int], x: int) -> bool:
        j = len(chosen)
        for i, v in enumerate(chosen):
            if (v < x) != (pat[i] < pat[j]):
                return False
        return True

    def search(start: int, chosen: list[int]) -> bool:
        j = len(chosen)
        if j == k:
            return True
        for idx in range(start, n - (k - j) + 1):
            x = vals[idx]
            if compatible(chosen, x):
                chosen.append(x)
                if search(idx + 1, chosen):
                    return True
                chosen.pop()
        return False

    return search(0, [])


def contains_321(perm: Permutation) -> bool:
    """Linear-time check for a decreasing subsequence of length three."""
    best_mid = 0  # largest value with some larger value before it
    run_max = 0
    for x in perm.values:
        if x < best_mid:
            return True
        if x < run_max and x > best_mid:
            best_mid = x
        if x > run_max:
            run_max = x
    return False


def _creates_occurrence(prefix: list[int], x: int, pat: tuple[int, int, int]) -> bool:
    """Whether appending x completes the length-3 pattern with x at the last slot.

    Each case is a single left-to-right scan keeping just enough running state
    (aggregates are over elements strictly before the current one).
    """
    if pat == (3, 2, 1):  # need earlier v_i > v_j > x
        run_max = 0
        for v in prefix:
            if x < v < run_max:
                return True
            if v > run_max:
                run_max = v
        return False
    if pat == (1, 2, 3):  # need earlier v_i < v_j < x
        run_min = x
        for v in prefix:
            if run_min < v < x:
                return True
            if v < run_min:
                run_min = v
        return False
    if pat == (2, 1, 3):  # need earlier v_i with v_j < v_i < x (descent below x)
        max_below_x = 0
        for v in prefix:
            if v < max_below_x:
                return True
            if v < x and v > max_below_x:
                max_below_x = v
        return False
    if pat == (2, 3, 1):  # need earlier ascent pair above x
        min_above_x = None
        for v in prefix:
            if min_above_x is not None and v > min_above_x:
                return True
            if v > x and (min_above_x is None or v < min_above_x):
                min_above_x = v
        return False
    if pat == (3, 1, 2):  # need earlier v_i > x and then v_j < x
        run_max = 0
        for v in prefix:
            if v < x and run_max > x:
                return True
            if v > run_max:
                run_max = v
        return False
    if pat == (1, 3, 2):  # need earlier v_i < x and then v_j > x
        run_min = None
        for v in prefix:
            if v > x and run_min is not None and run_min < x:
                return True
            if run_min is None or v < run_min:
                run_min = v
        return False
    raise ValueError(f"unsupported pattern {pat}")


def _enumerate_avoiders_321(n: int) -> Iterator[Permutation]:
    # Backtracking with O(1) feasibility per candidate: appending x creates a
    # 321 exactly when x is below the largest value that already has a larger
    # value before it.
    prefix: list[int] = []
    used = [False] * (n + 1)

    def extend(run_max: int, best_mid: int) -> Iterator[Permutation]:
        if len(prefix) == n:
            yield Permutation(tuple(prefix))
            return
        for x in range(best_mid + 1, n + 1):
            if used[x]:
                continue
            used[x] = True
            prefix.append(x)
            new_mid = best_mid if x > run_max else max(best_mid, x)
            yield from extend(max(run_max, x), new_mid)
            prefix.pop()
            used[x] = False

    yield from extend(0, 0)


def _enumerate_avoiders_generic(n: int, pat: tuple[int, int, int]) -> Iterator[Permutation]:
    prefix: list[int] = []
    used = [False] * (n + 1)

    def extend() -> Iterator[Permutation]:
        if len(prefix) == n:
            yield Permutation(tuple(prefix))
            return
        for x in range(1, n + 1):
            if used[x] or _creates_occurrence(prefix, x, pat):
                continue
            used[x] = True
            prefix.append(x)
            yield from extend()
            prefix.pop()
            used[x] = False

    yield from extend()


def enumerate_avoiders(n: int, pattern: Permutation) -> Iterator[Permutation]:
    """All pattern-avoiding permutations of {1..n}, in lexicographic order.

    Generates by backtracking with prefix pruning, so the Catalan-many avoiders
    are emitted without touching the rest of S_n. Only length-3 patterns are
    supported, and n is capped at MAX_ENUMERATION_N.
    """
    if not 1 <= n <= MAX_ENUMERATION_N:
        raise ValueError(f"n must be within 1..{MAX_ENUMERATION_N}")
    if len(pattern) != 3:
        raise ValueError("enumeration supports length-3 patterns only")
    pat = pattern.values
    if pat == (3, 2, 1):
        yield from _enumerate_avoiders_321(n)
    else:
        yield from _enumerate_avoiders_generic(n, pat)
