"""Rooted plane trees, their Dyck-path contours, and fringe statistics.

Vertices are preorder indices 0..size-1 with the root at 0; children tuples
keep left-to-right order. Trees serialize as Dyck words over "U"/"D" (the
root is implicit), which doubles as the contour encoding.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from functools import cached_property
from itertools import accumulate

from .perms import FixedPointMeasure

UP = 1
DOWN = -1

MAX_TREE_ENUMERATION_VERTICES = 10


@dataclass(frozen=True)
class DyckPath:
    """Balanced +1/-1 step sequence whose every prefix has #up >= #down."""

    steps: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(int(s) for s in self.steps))
        height = 0
        for s in self.steps:
            if s not in (UP, DOWN):
                raise ValueError("steps must be +1 or -1")
            height += s
            if height < 0:
                raise ValueError("prefix dips below zero")
        if height != 0:
            raise ValueError("unbalanced step sequence")

    @classmethod
    def from_word(cls, word: str) -> "DyckPath":
        """Parse a word over "U"/"D", e.g. "UUDD"."""
        mapping = {"U": UP, "D": DOWN}
        try:
            return cls(tuple(mapping[c] for c in word.strip()))
        except KeyError as exc:
            raise ValueError(f"invalid step character {exc}") from None

    def word(self) -> str:
        return "".join("U" if s == UP else "D" for s in self.steps)

    def __str__(self) -> str:
        return self.word()

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def num_edges(self) -> int:
        return len(self.steps) // 2

    def heights(self) -> tuple[int, ...]:
        """Walk height after each step."""
        return tuple(accumulate(self.steps))

    def height_one_peaks(self) -> tuple[int, ...]:
        """Positions of up-down peaks that rise from height zero.

        Counted in step pairs: a peak whose up step is the (2m+1)-st step
        yields m + 1. Under the contour correspondence these are exactly the
        fixed points of the associated 321-avoiding permutation, equivalently
        the preorder ranks of the root's leaf children.
        """
        out = []
        height = 0
        for i, s in enumerate(self.steps):
            if s == UP and height == 0 and i + 1 < len(self.steps) and self.steps[i + 1] == DOWN:
                out.append(i // 2 + 1)
            height += s
        return tuple(out)


@dataclass(frozen=True)
class PlaneTree:
    """Rooted ordered tree; vertex i is the i-th vertex visited in preorder."""

    children: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        kids = tuple(tuple(int(c) for c in row) for row in self.children)
        object.__setattr__(self, "children", kids)
        n = len(kids)
        if n == 0:
            raise ValueError("tree must have at least one vertex")
        # walking the structure depth-first must visit 0, 1, ..., n-1 in order
        stack = [0]
        count = 0
        while stack:
            v = stack.pop()
            if v != count:
                raise ValueError("children lists are not consistent with preorder ids")
            count += 1
            row = kids[v] if 0 <= v < n else ()
            stack.extend(reversed(row))
        if count != n:
            raise ValueError("children lists leave vertices unreachable")

    @property
    def size(self) -> int:
        return len(self.children)

    @property
    def root_degree(self) -> int:
        return len(self.children[0])

    @cached_property
    def parents(self) -> tuple[int, ...]:
        out = [-1] * self.size
        for v, kids in enumerate(self.children):
            for c in kids:
                out[c] = v
        return tuple(out)

    @cached_property
    def depths(self) -> tuple[int, ...]:
        out = [0] * self.size
        for v in range(1, self.size):
            out[v] = out[self.parents[v]] + 1
        return tuple(out)

    def leaves(self) -> tuple[int, ...]:
        """Leaf ids; preorder ids are increasing, so this is depth-first order."""
        return tuple(v for v, kids in enumerate(self.children) if not kids)

    def subtree_sizes(self) -> tuple[int, ...]:
        sizes = [1] * self.size
        for v in range(self.size - 1, 0, -1):
            sizes[self.parents[v]] += sizes[v]
        return tuple(sizes)

    def to_dyck(self) -> "DyckPath":
        return dyck_from_tree(self)

    @classmethod
    def from_dyck(cls, path: DyckPath) -> "PlaneTree":
        return tree_from_dyck(path)


def tree_from_dyck(path: DyckPath) -> PlaneTree:
    """Tree whose contour walk is the given path: up opens a new edge, down
    retreats toward the root."""
    children: list[list[int]] = [[]]
    stack = [0]
    for s in path.steps:
        if s == UP:
            v = len(children)
            children.append([])
            children[stack[-1]].append(v)
            stack.append(v)
        else:
            stack.pop()
    return PlaneTree(tuple(tuple(row) for row in children))


def dyck_from_tree(tree: PlaneTree) -> DyckPath:
    """Contour walk of the tree (iterative: trees may be deeper than the
    recursion limit)."""
    steps: list[int] = []
    stack: list[Iterator[int]] = [iter(tree.children[0])]
    while stack:
        child = next(stack[-1], None)
        if child is None:
            stack.pop()
            if stack:
                steps.append(DOWN)
        else:
            steps.append(UP)
            stack.append(iter(tree.children[child]))
    return DyckPath(tuple(steps))


@dataclass(frozen=True)
class LeafStats:
    """Per-leaf quantities that drive the tree-to-permutation map.

    For the i-th leaf in preorder, preorder_ranks[i] counts the vertices
    strictly before it in preorder and depths[i] counts its proper ancestors.
    The associated permutation sends position preorder_ranks[i] - depths[i] + 1
    to value preorder_ranks[i]; those positions are its left-to-right maxima.
    """

    leaves: tuple[int, ...]
    preorder_ranks: tuple[int, ...]
    depths: tuple[int, ...]

    def __post_init__(self):
        s, p = self.preorder_ranks, self.depths
        if not (len(self.leaves) == len(s) == len(p)) or not s:
            raise ValueError("leaf statistics must be nonempty and aligned")
        if s[0] != p[0]:
            raise ValueError("the vertices before the first leaf are its ancestors")
        if any(not 1 <= pi <= si for si, pi in zip(s, p)):
            raise ValueError("depths must lie in 1..rank")
        if any(b >= a for a, b in zip(s[1:], s)):
            raise ValueError("preorder ranks must increase")
        positions = self.maxima_positions()
        if any(b >= a for a, b in zip(positions[1:], positions)):
            raise ValueError("maxima positions must increase")

    @property
    def count(self) -> int:
        return len(self.leaves)

    def maxima_positions(self) -> tuple[int, ...]:
        """Positions (rank - depth + 1) of the left-to-right maxima."""
        return tuple(s - p + 1 for s, p in zip(self.preorder_ranks, self.depths))


def leaf_stats(tree: PlaneTree) -> LeafStats:
    """Leaf statistics of a tree with at least two vertices."""
    if tree.size < 2:
        raise ValueError("the single-vertex tree has no leaf distinct from the root")
    leaves = tree.leaves()
    depths = tree.depths
    # a leaf's preorder rank is its preorder id
    return LeafStats(leaves, leaves, tuple(depths[v] for v in leaves))


def truncate_tree(tree: PlaneTree, height: int) -> PlaneTree:
    """Subtree of all vertices at depth <= height, order preserved."""
    if height < 0:
        raise ValueError("height must be >= 0")
    depths = tree.depths
    keep = [v for v in range(tree.size) if depths[v] <= height]
    remap = {v: i for i, v in enumerate(keep)}
    children = tuple(
        tuple(remap[c] for c in tree.children[v] if depths[c] <= height) for v in keep
    )
    return PlaneTree(children)


def fringe_decomposition(tree: PlaneTree) -> tuple[tuple[int, bool], ...]:
    """Per root child: size of the subtree above it and whether it is a single
    vertex. Sizes sum to tree.size - 1."""
    if tree.size < 2:
        raise ValueError("the single-vertex tree has no fringe decomposition")
    sizes = tree.subtree_sizes()
    return tuple((sizes[c], sizes[c] == 1) for c in tree.children[0])


def tree_fixed_point_measures(tree: PlaneTree) -> tuple[FixedPointMeasure, FixedPointMeasure]:
    """Front/back fixed-point measures read off the root decomposition.

    With fringe sizes f_1..f_d summing to n = size - 1 and the split index
    N = min{k : f_1 + ... + f_k > floor(n/2)}, each single-vertex fringe before
    N contributes a front atom at its prefix sum, and each one at or after N a
    back atom at its suffix sum. Equals fixed_point_measures of the permutation
    associated with the tree.
    """
    sizes = [s for s, _ in fringe_decomposition(tree)]
    n = tree.size - 1
    half = n // 2
    prefix = list(accumulate(sizes))
    split = next(i for i, acc in enumerate(prefix, 1) if acc > half)
    front = [prefix[i - 1] for i in range(1, split) if sizes[i - 1] == 1]
    back = [
        n - prefix[i - 1] + sizes[i - 1]
        for i in range(split, len(sizes) + 1)
        if sizes[i - 1] == 1
    ]
    return FixedPointMeasure(tuple(front)), FixedPointMeasure(tuple(reversed(back)))


def _dyck_step_words(edges: int) -> Iterator[tuple[int, ...]]:
    steps: list[int] = []

    def extend(ups_left: int, height: int) -> Iterator[tuple[int, ...]]:
        if ups_left == 0 and height == 0:
            yield tuple(steps)
            return
        if ups_left > 0:
            steps.append(UP)
            yield from extend(ups_left - 1, height + 1)
            steps.pop()
        if height > 0:
            steps.append(DOWN)
            yield from extend(ups_left, height - 1)
            steps.pop()

    yield from extend(edges, 0)


def enumerate_trees(vertices: int) -> Iterator[PlaneTree]:
    """All plane trees with the given vertex count (Catalan-many), each exactly
    once, ordered by their Dyck words with up before down."""
    if not 1 <= vertices <= MAX_TREE_ENUMERATION_VERTICES:
        raise ValueError(f"vertex count must be within 1..{MAX_TREE_ENUMERATION_VERTICES}")
    for steps in _dyck_step_words(vertices - 1):
        yield tree_from_dyck(DyckPath(steps))
