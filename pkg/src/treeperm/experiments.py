"""Vectorized Monte Carlo cores for the fixed-point experiments.

Statistics of a uniform 321-avoider are read straight off the contour of its
tree: the returns to zero of the Dyck walk delimit the root subtrees, and the
prefix vertex counts at the single-vertex subtrees are exactly the fixed
points of the permutation. That identity is established exhaustively in the
bijection tests; these helpers just exploit it so desk-scale runs (n in the
thousands, 1e5+ samples) stay cheap.
"""

from __future__ import annotations

import numpy as np

from .rng import RngStream
from .samplers import _uniform_dyck_steps, sample_progeny_batch


def fixed_positions_from_steps(steps: np.ndarray) -> np.ndarray:
    """Fixed-point positions of the avoider whose tree has this contour.

    Positions are the prefix vertex counts at returns to zero whose excursion
    has length two (single-vertex root subtrees).
    """
    heights = np.cumsum(steps, dtype=np.int64)
    zeros = np.flatnonzero(heights == 0)
    bounds = (zeros + 1) // 2  # vertices consumed by the first i root subtrees
    sizes = np.diff(bounds, prepend=0)
    return bounds[sizes == 1]


def root_degree_from_steps(steps: np.ndarray) -> int:
    """Root degree of the tree with this contour: returns to zero."""
    heights = np.cumsum(steps, dtype=np.int64)
    return int((heights == 0).sum())


def sample_fixed_point_positions(n: int, count: int, rng: RngStream) -> list[np.ndarray]:
    """Fixed-point position sets of uniform 321-avoiders of {1..n}."""
    if n < 1 or count < 1:
        raise ValueError("need n >= 1 and count >= 1")
    return [
        fixed_positions_from_steps(_uniform_dyck_steps(n, rng)) for _ in range(count)
    ]


def sample_root_degrees(vertices: int, count: int, rng: RngStream) -> np.ndarray:
    """Root degrees of uniform trees on the given number of vertices."""
    if vertices < 2 or count < 1:
        raise ValueError("need vertices >= 2 and count >= 1")
    out = np.empty(count, dtype=np.int64)
    for i in range(count):
        out[i] = root_degree_from_steps(_uniform_dyck_steps(vertices - 1, rng))
    return out


def split_front_back(positions: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Front atoms (positions <= floor(n/2)) and back atoms (n+1-i for the
    rest), both increasing."""
    half = n // 2
    front = positions[positions <= half]
    back = (n + 1 - positions[positions > half])[::-1]
    return front, back


def window_tuple(atoms: np.ndarray, lo: int, hi: int) -> tuple[int, ...]:
    """The atoms inside [lo, hi] as a hashable outcome."""
    kept = atoms[(atoms >= lo) & (atoms <= hi)]
    return tuple(int(a) for a in kept)


def limit_front_batch(count: int, rng: RngStream) -> tuple[list[np.ndarray], np.ndarray]:
    """Front measures of limit-process draws.

    Returns the per-draw atom arrays and the block counts. Only the front side
    is drawn (block count, then all block sizes in one vectorized batch), so
    the draw sequence differs from sample_limit_process but the front law is
    identical.
    """
    if count < 1:
        raise ValueError("need count >= 1")
    nblocks = rng.geometric0(0.5, count)
    total = int(nblocks.sum())
    sizes = sample_progeny_batch(total, rng)
    ends = np.cumsum(nblocks)
    starts = ends - nblocks
    fronts = []
    for s, e in zip(starts, ends):
        blocks = sizes[s:e]
        sums = np.cumsum(blocks)
        fronts.append(sums[blocks == 1])
    return fronts, nblocks
