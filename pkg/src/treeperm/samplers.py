"""Random generation: uniform plane trees and 321-avoiders, critical branching
trees, size-biased truncations, total-progeny draws, and the limiting
fixed-point process.

Geometric convention everywhere: support {0, 1, 2, ...} with P(k) = p (1-p)^k,
so the critical offspring law Geometric(1/2) has P(k) = 2^(-k-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bijection import tree_to_perm
from .distributions import Pmf, gw_progeny
from .perms import FixedPointMeasure, Permutation
from .rng import RngStream
from .trees import DOWN, UP, DyckPath, PlaneTree, tree_from_dyck

DEFAULT_NODE_CAP = 10**7
PROGENY_TABLE_ATOMS = 4096

_LN4 = math.log(4.0)
_LGAMMA_SAFE_MAX = 10**6  # beyond this, cancellation hurts lgamma; use the series


def _uniform_dyck_steps(num_edges: int, rng: RngStream) -> np.ndarray:
    """Uniform Dyck step sequence via the cycle lemma.

    Shuffle n up steps and n+1 down steps, rotate to start just past the first
    minimum of the prefix walk (the unique rotation whose proper prefixes are
    nonnegative), and drop the final down step. Exactly uniform, no rejection.
    """
    n = num_edges
    steps = np.full(2 * n + 1, DOWN, dtype=np.int8)
    if n > 0:
        # uniform n-subset of up positions: the n smallest of 2n+1 random keys
        ranks = rng.gen.random(2 * n + 1)
        steps[np.argpartition(ranks, n - 1)[:n]] = UP
    prefix = np.cumsum(steps, dtype=np.int64)
    pivot = int(np.argmin(prefix))  # first position attaining the minimum
    rotated = np.concatenate([steps[pivot + 1 :], steps[: pivot + 1]])
    return rotated[:-1]


def uniform_dyck_path(num_edges: int, rng: RngStream) -> DyckPath:
    """Uniformly random Dyck path with the given number of up steps."""
    if num_edges < 0:
        raise ValueError("edge count must be >= 0")
    return DyckPath(tuple(int(s) for s in _uniform_dyck_steps(num_edges, rng)))


def uniform_tree(vertices: int, rng: RngStream) -> PlaneTree:
    """Exactly uniform plane tree on the given number of vertices."""
    if vertices < 1:
        raise ValueError("vertex count must be >= 1")
    return tree_from_dyck(uniform_dyck_path(vertices - 1, rng))


def uniform_avoider_321(n: int, rng: RngStream) -> Permutation:
    """Uniformly random 321-avoiding permutation of {1..n}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return tree_to_perm(uniform_tree(n + 1, rng))


class GWOverflowError(RuntimeError):
    """Branching-process generation hit its node cap before dying out.

    Raised instead of silently truncating, so near-critical runaway growth is
    always observable.
    """

    def __init__(self, node_cap: int, generated: int):
        super().__init__(
            f"branching process exceeded node cap {node_cap} "
            f"(at least {generated} vertices)"
        )
        self.node_cap = node_cap
        self.generated = generated


def _check_offspring(offspring: Pmf) -> None:
    mean = offspring.mean()
    if not mean <= 1.0 + 1e-9:
        raise ValueError(f"offspring mean {mean} exceeds 1 (supercritical)")


def _offspring_drawer(offspring: Pmf):
    """Vectorized sampler for an offspring law.

    Geometric families are drawn natively; anything else goes through inverse
    CDF over the tabulated atoms, which requires a near-complete table.
    """
    if offspring.family and offspring.family[0] == "geometric":
        p = float(offspring.family[1])
        return lambda rng, size: rng.gen.geometric(p, size) - 1
    if offspring.tail_mass > 1e-9:
        raise ValueError("offspring law needs a near-complete atom table")
    support = np.array(offspring.support(), dtype=np.int64)
    cum = np.cumsum([offspring.prob(int(k)) for k in support])
    cum[-1] = 1.0  # residual rounding mass goes to the largest atom
    return lambda rng, size: support[np.searchsorted(cum, rng.gen.random(size), side="right")]


def _tree_from_bfs_degrees(degrees: list[int]) -> PlaneTree:
    """Children-list tree from a breadth-first degree sequence, renumbered so
    vertex ids are preorder indices."""
    n = len(degrees)
    first = [0] * n  # first BFS child id of each BFS vertex
    acc = 1
    for v, d in enumerate(degrees):
        first[v] = acc
        acc += d
    sizes = [1] * n
    for v in range(n - 1, -1, -1):
        f = first[v]
        sizes[v] += sum(sizes[f : f + degrees[v]])
    children: list[tuple[int, ...]] = [()] * n
    stack = [(0, 0)]  # (BFS id, preorder id)
    while stack:
        bfs_id, pre_id = stack.pop()
        row = []
        child_pre = pre_id + 1
        for c in range(first[bfs_id], first[bfs_id] + degrees[bfs_id]):
            row.append(child_pre)
            stack.append((c, child_pre))
            child_pre += sizes[c]
        children[pre_id] = tuple(row)
    return PlaneTree(tuple(children))


def gw_tree_truncated(offspring: Pmf, height: int | None, rng: RngStream,
                      node_cap: int = DEFAULT_NODE_CAP) -> PlaneTree:
    """Branching-process tree with the given offspring law, level by level.

    Vertices at depth == height get no children; height None means generation
    stops only at natural extinction or at the node cap, in which case
    GWOverflowError is raised. The offspring mean must be <= 1 (criticality).
    """
    if height is not None and height < 0:
        raise ValueError("height must be >= 0 (or None for unbounded)")
    if node_cap < 1:
        raise ValueError("node cap must be >= 1")
    _check_offspring(offspring)
    draw = _offspring_drawer(offspring)
    degrees: list[int] = []
    level = 1
    depth = 0
    total = 1
    while level > 0:
        if height is not None and depth == height:
            degrees.extend([0] * level)
            break
        d = draw(rng, level)
        degrees.extend(int(x) for x in d)
        level = int(d.sum())
        total += level
        if total > node_cap:
            raise GWOverflowError(node_cap, total)
        depth += 1
    return _tree_from_bfs_degrees(degrees)


def gw_total_progeny(offspring: Pmf, rng: RngStream,
                     node_cap: int = DEFAULT_NODE_CAP) -> int:
    """Total vertex count of an unbounded branching-process tree: the same
    level-by-level process as gw_tree_truncated without materializing it."""
    if node_cap < 1:
        raise ValueError("node cap must be >= 1")
    _check_offspring(offspring)
    draw = _offspring_drawer(offspring)
    level = 1
    total = 1
    while level > 0:
        level = int(draw(rng, level).sum())
        total += level
        if total > node_cap:
            raise GWOverflowError(node_cap, total)
    return total


def kesten_truncated(height: int, rng: RngStream) -> tuple[PlaneTree, tuple[int, ...]]:
    """Height-truncated size-biased critical Geometric(1/2) branching tree.

    The spine vertex at each depth below the cutoff gets a size-biased
    Geometric(1/2) number of children (P(k) = k 2^(-k-1)); the spine continues
    through a uniformly chosen child while the other children carry independent
    critical branching trees, everything cut at the absolute height. Returns
    the tree plus the spine as preorder ids (length height + 1). Finite by
    construction, so no cap is needed.
    """
    if height < 0:
        raise ValueError("height must be >= 0")

    def bush(levels_left: int) -> list:
        if levels_left == 0:
            return []
        k = int(rng.gen.geometric(0.5)) - 1
        return [bush(levels_left - 1) for _ in range(k)]

    spine_choices: list[int] = []  # 1-based index of the spine child per depth

    def spine_node(depth: int) -> list:
        if depth == height:
            return []
        x = int(rng.size_biased_geometric_half())
        j = int(rng.gen.integers(1, x + 1))
        spine_choices.append(j)
        kids = []
        for i in range(1, x + 1):
            if i == j:
                kids.append(spine_node(depth + 1))
            else:
                kids.append(bush(height - depth - 1))
        return kids

    nested_root = spine_node(0)

    def nested_size(node: list) -> int:
        return 1 + sum(nested_size(c) for c in node)

    def flatten_preorder(node: list) -> tuple[tuple[int, ...], ...]:
        stack = [(node, 0)]
        slots: dict[int, tuple[int, ...]] = {}
        while stack:
            current, my_id = stack.pop()
            row = []
            next_id = my_id + 1
            pending = []
            for c in current:
                row.append(next_id)
                pending.append((c, next_id))
                next_id += nested_size(c)
            slots[my_id] = tuple(row)
            stack.extend(reversed(pending))
        return tuple(slots[i] for i in range(len(slots)))

    tree = PlaneTree(flatten_preorder(nested_root))

    spine = [0]
    node = nested_root
    for depth, j in enumerate(spine_choices):
        vid = spine[-1] + 1
        for i in range(j - 1):
            vid += nested_size(node[i])
        spine.append(vid)
        node = node[j - 1]
    return tree, tuple(spine)


@lru_cache(maxsize=2)
def _progeny_cdf(table_atoms: int = PROGENY_TABLE_ATOMS) -> np.ndarray:
    """Cumulative P(progeny <= k) for k = 1..table_atoms, each entry rounded
    from the exact rational partial sum.

    Accumulates integer numerators over the common denominator 2^(2K-1); going
    through Fraction sums would grind on gcd normalization of huge operands.
    """
    law = gw_progeny(table_atoms)
    assert law.exact is not None
    shift = 2 * table_atoms - 1
    denominator = 1 << shift
    cdf = np.empty(table_atoms)
    acc = 0
    for i, k in enumerate(range(1, table_atoms + 1)):
        frac = law.exact[k]
        acc += frac.numerator << (shift - frac.denominator.bit_length() + 1)
        cdf[i] = acc / denominator
    return cdf


def _log_progeny_tail(k: int) -> float:
    """log P(progeny > k) = log(binom(2k, k) / 4^k), exact via lgamma for
    moderate k and by a Stirling expansion beyond (relative error < 1e-15)."""
    if k <= _LGAMMA_SAFE_MAX:
        return math.lgamma(2 * k + 1) - 2 * math.lgamma(k + 1) - k * _LN4
    return -0.5 * math.log(math.pi * k) - 1.0 / (8 * k) + 1.0 / (192 * k**3)


def _progeny_tail_quantile(w: float, table_atoms: int = PROGENY_TABLE_ATOMS) -> int:
    """Smallest k > table_atoms with P(progeny > k) < w (tail inversion)."""
    log_w = math.log(w)
    lo = table_atoms
    if _log_progeny_tail(lo) < log_w:
        return lo + 1
    hi = 2 * lo
    while _log_progeny_tail(hi) >= log_w:
        lo = hi
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _log_progeny_tail(mid) >= log_w:
            lo = mid
        else:
            hi = mid
    return hi


def sample_progeny_batch(count: int, rng: RngStream,
                         table_atoms: int = PROGENY_TABLE_ATOMS) -> np.ndarray:
    """Vectorized draws from the total-progeny law P(k) = Catalan(k-1)/2^(2k-1).

    Inverse CDF over the precomputed table, falling back to analytic tail
    inversion beyond it (the tail CDF binom(2k,k)/4^k is exact).
    """
    cdf = _progeny_cdf(table_atoms)
    u = rng.gen.random(count)
    out = np.searchsorted(cdf, u, side="right").astype(np.int64) + 1
    int64_max = np.iinfo(np.int64).max
    for i in np.flatnonzero(u >= cdf[-1]):
        value = _progeny_tail_quantile(1.0 - float(u[i]), table_atoms)
        if value > int64_max:
            raise OverflowError("progeny draw exceeds int64; use sample_progeny")
        out[i] = value
    return out


def sample_progeny(rng: RngStream) -> int:
    """One draw of the total progeny of the critical Geometric(1/2) process."""
    cdf = _progeny_cdf()
    u = float(rng.gen.random())
    if u < cdf[-1]:
        return int(np.searchsorted(cdf, u, side="right")) + 1
    return _progeny_tail_quantile(1.0 - u)


@dataclass(frozen=True)
class LimitProcessSample:
    """One draw of the limiting front/back fixed-point process.

    Each side has a Geometric(1/2) number of blocks whose sizes are independent
    total-progeny draws; an atom sits at every partial sum whose block is a
    single vertex.
    """

    front_blocks: tuple[int, ...]
    back_blocks: tuple[int, ...]
    front: FixedPointMeasure
    back: FixedPointMeasure

    @property
    def num_front_blocks(self) -> int:
        return len(self.front_blocks)

    @property
    def num_back_blocks(self) -> int:
        return len(self.back_blocks)


def measure_from_blocks(blocks: tuple[int, ...]) -> FixedPointMeasure:
    """Atoms at the partial sums of the blocks of size one."""
    atoms = []
    acc = 0
    for b in blocks:
        acc += b
        if b == 1:
            atoms.append(acc)
    return FixedPointMeasure(tuple(atoms))


def sample_limit_process(rng: RngStream) -> LimitProcessSample:
    """Draw the limiting fixed-point process (front and back sides).

    Draw order: front block count, back block count, then the front block
    sizes followed by the back block sizes.
    """
    n_front = int(rng.geometric0(0.5))
    n_back = int(rng.geometric0(0.5))
    front_blocks = tuple(int(x) for x in sample_progeny_batch(n_front, rng))
    back_blocks = tuple(int(x) for x in sample_progeny_batch(n_back, rng))
    return LimitProcessSample(
        front_blocks,
        back_blocks,
        measure_from_blocks(front_blocks),
        measure_from_blocks(back_blocks),
    )
