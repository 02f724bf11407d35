"""The bijection between plane trees on n+1 vertices and 321-avoiding
permutations of {1..n}.

Each leaf, taken in preorder, contributes a left-to-right maximum: if s counts
the vertices before the leaf and p its proper ancestors, the permutation sends
position s - p + 1 to value s, and the remaining positions receive the
remaining values in increasing order. Leaves hanging off the root (p = 1) land
on the diagonal, so they are exactly the fixed points.
"""

from __future__ import annotations

from .perms import Permutation, contains_321
from .trees import DOWN, UP, DyckPath, PlaneTree, leaf_stats, tree_from_dyck


def tree_to_perm(tree: PlaneTree) -> Permutation:
    """Map a tree with n+1 >= 2 vertices to its 321-avoiding permutation."""
    stats = leaf_stats(tree)  # rejects the single-vertex tree
    n = tree.size - 1
    values = [0] * n
    for s, p in zip(stats.preorder_ranks, stats.depths):
        values[s - p] = s
    maxima_values = set(stats.preorder_ranks)
    filler = (v for v in range(1, n + 1) if v not in maxima_values)
    for i in range(n):
        if values[i] == 0:
            values[i] = next(filler)
    return Permutation(tuple(values))


def perm_to_tree(perm: Permutation) -> PlaneTree:
    """Inverse map; rejects permutations containing the pattern 321.

    The contour is rebuilt from the left-to-right maxima: climb to depth p_1,
    then before each later maximum descend to the branch depth
    p_i - (s_i - s_{i-1}) and climb back to p_i, and finally return to depth 0.
    """
    if contains_321(perm):
        raise ValueError("permutation contains the pattern 321")
    indices, values = perm.left_to_right_maxima()
    s = values
    p = tuple(v - m + 1 for m, v in zip(indices, values))
    steps: list[int] = [UP] * p[0]
    for i in range(1, len(s)):
        branch = p[i] - (s[i] - s[i - 1])
        if branch < 0 or branch >= p[i - 1]:
            raise ValueError("left-to-right maxima do not describe a tree contour")
        steps += [DOWN] * (p[i - 1] - branch)
        steps += [UP] * (p[i] - branch)
    steps += [DOWN] * p[-1]
    return tree_from_dyck(DyckPath(tuple(steps)))
