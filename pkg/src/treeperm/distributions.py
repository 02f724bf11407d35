"""Discrete laws for the fixed-point limit theory: pmfs, distances, tests,
and exact enumeration oracles.

All laws live on the nonnegative integers. Named constructors tabulate exact
rational atoms and carry closed-form tail mass and tail mean, so totals stay
exact even though the tables are finite.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any

import numpy as np
from scipy.stats import chi2

from .perms import Permutation, enumerate_avoiders
from .rng import RngStream

_MASS_SLACK = 1e-12
MAX_EXACT_N = 10


def catalan(m: int) -> int:
    """The m-th Catalan number binom(2m, m) / (m + 1)."""
    return math.comb(2 * m, m) // (m + 1)


@dataclass(frozen=True)
class Pmf:
    """Probability mass function on {0, 1, 2, ...} with an optional analytic tail.

    atoms maps outcome -> probability for the tabulated head of the law;
    tail_mass is the remaining mass beyond the largest tabulated outcome and
    tail_mean the remaining contribution to the mean (math.inf if divergent).
    exact, when present, holds the same atoms as Fractions.
    """

    atoms: dict[int, float]
    tail_mass: float = 0.0
    tail_mean: float = 0.0
    exact: dict[int, Fraction] | None = field(default=None, repr=False)
    name: str = ""
    family: tuple[Any, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "atoms", dict(sorted(self.atoms.items())))
        total = 0.0
        for k, prob in self.atoms.items():
            if k < 0:
                raise ValueError(f"outcome {k} is negative")
            if not 0.0 <= prob <= 1.0:
                raise ValueError(f"invalid probability {prob} at {k}")
            total += prob
        if self.tail_mass < -_MASS_SLACK:
            raise ValueError("negative tail mass")
        if total + self.tail_mass > 1.0 + _MASS_SLACK:
            raise ValueError(f"masses sum to {total + self.tail_mass} > 1")

    def prob(self, k: int) -> float:
        return self.atoms.get(k, 0.0)

    def support(self) -> tuple[int, ...]:
        return tuple(self.atoms)

    def max_tabulated(self) -> int:
        return max(self.atoms)

    def partial_sum(self, k: int) -> float:
        """P(X <= k) over the tabulated atoms."""
        return sum(p for outcome, p in self.atoms.items() if outcome <= k)

    def total_mass(self) -> float:
        return sum(self.atoms.values()) + self.tail_mass

    def mean(self) -> float:
        head = sum(k * p for k, p in self.atoms.items())
        return head + self.tail_mean


def _exact_pmf(
    exact: dict[int, Fraction],
    total_mass: Fraction,
    total_mean: Fraction | float,
    name: str,
    family: tuple[Any, ...] | None = None,
) -> Pmf:
    """Assemble a Pmf from exact atoms plus the law's exact total mass/mean;
    the tail fields are the exact complements of the tabulated head."""
    head_mass = sum(exact.values())
    tail_mass = float(total_mass - head_mass)
    if total_mean == math.inf:
        tail_mean = math.inf
    else:
        head_mean = sum(k * v for k, v in exact.items())
        tail_mean = float(total_mean - head_mean)
    atoms = {k: float(v) for k, v in exact.items()}
    return Pmf(atoms, tail_mass, tail_mean, exact, name, family)


def geometric(p: float | Fraction, num_atoms: int = 256) -> Pmf:
    """Geometric law on {0, 1, ...}: P(k) = p (1-p)^k, mean (1-p)/p.

    Pass p as a Fraction for exact rational atoms.
    """
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    pf = Fraction(p)
    q = 1 - pf
    exact = {k: pf * q**k for k in range(num_atoms)}
    return _exact_pmf(exact, Fraction(1), q / pf, f"geometric({p})", ("geometric", float(p)))


def size_biased_geometric_half(num_atoms: int = 256) -> Pmf:
    """Size-biased Geometric(1/2): P(k) = k 2^(-k-1) on {1, 2, ...}, mean 3."""
    exact = {k: Fraction(k, 2 ** (k + 1)) for k in range(1, num_atoms + 1)}
    return _exact_pmf(exact, Fraction(1), Fraction(3), "size_biased_geom_half",
                      ("size_biased_geometric_half",))


@lru_cache(maxsize=8)
def gw_progeny(num_atoms: int = 4096) -> Pmf:
    """Total-progeny law of the critical Geometric(1/2) branching process.

    P(k) = Catalan(k-1) / 2^(2k-1) on {1, 2, ...}; the tail mass is exactly
    P(X > k) = binom(2k, k) / 4^k and the mean diverges.
    """
    # Catalan numbers by recurrence; calling comb() per atom is quadratic pain
    exact: dict[int, Fraction] = {}
    cat = 1
    for k in range(1, num_atoms + 1):
        exact[k] = Fraction(cat, 2 ** (2 * k - 1))
        cat = cat * (4 * k - 2) // (k + 1)
    # closed-form tail avoids summing thousands of huge-denominator fractions
    tail = Fraction(math.comb(2 * num_atoms, num_atoms), 4**num_atoms)
    atoms = {k: float(v) for k, v in exact.items()}
    return Pmf(atoms, float(tail), math.inf, exact, "progeny", ("gw_progeny",))


def negative_binomial_2_one_third(num_atoms: int = 256) -> Pmf:
    """NegativeBinomial(2, 1/3): P(k) = (4/9)(k+1)(1/3)^k, the law of the sum
    of two independent Geometric(2/3) variables; mean 1."""
    exact = {k: Fraction(4 * (k + 1), 9 * 3**k) for k in range(num_atoms)}
    return _exact_pmf(exact, Fraction(1), Fraction(1), "negbin_2_one_third",
                      ("negative_binomial", 2, Fraction(1, 3)))


def delta(outcome: int) -> Pmf:
    """Point mass at a single outcome."""
    if outcome < 0:
        raise ValueError("outcome must be >= 0")
    return _exact_pmf({outcome: Fraction(1)}, Fraction(1), Fraction(outcome), f"delta({outcome})")


def theoretical_pmf(name: str, p: float | Fraction | None = None,
                    num_atoms: int | None = None) -> Pmf:
    """Named-law dispatcher: "geometric" (requires p), "size_biased_geom_half",
    "progeny", or "negbin_2_one_third"."""
    if name == "geometric":
        if p is None:
            raise ValueError("geometric requires the parameter p")
        return geometric(p, num_atoms or 256)
    if p is not None:
        raise ValueError(f"{name} takes no parameter")
    if name == "size_biased_geom_half":
        return size_biased_geometric_half(num_atoms or 256)
    if name == "progeny":
        return gw_progeny(num_atoms or 4096)
    if name == "negbin_2_one_third":
        return negative_binomial_2_one_third(num_atoms or 256)
    raise ValueError(f"unknown pmf name {name!r}")


def convolve_pmf(a: Pmf, b: Pmf, support_cap: int) -> Pmf:
    """Exact convolution of the tabulated atoms on {0..support_cap}.

    When both inputs carry exact atoms the result does too. The mass the window
    misses (including the inputs' tails) becomes the result's tail; its mean
    contribution is not tracked.
    """
    if support_cap < 0:
        raise ValueError("support cap must be >= 0")
    if a.exact is not None and b.exact is not None:
        exact: dict[int, Fraction] = {}
        for i, pa in a.exact.items():
            if i > support_cap:
                continue
            for j, pb in b.exact.items():
                if i + j > support_cap:
                    continue
                exact[i + j] = exact.get(i + j, Fraction(0)) + pa * pb
        head = sum(exact.values())
        atoms = {k: float(v) for k, v in sorted(exact.items())}
        return Pmf(atoms, float(1 - head), 0.0, dict(sorted(exact.items())),
                   f"convolve({a.name},{b.name})")
    atoms_f: dict[int, float] = {}
    for i, pa in a.atoms.items():
        if i > support_cap:
            continue
        for j, pb in b.atoms.items():
            if i + j > support_cap:
                continue
            atoms_f[i + j] = atoms_f.get(i + j, 0.0) + pa * pb
    head_f = sum(atoms_f.values())
    return Pmf(dict(sorted(atoms_f.items())), max(0.0, 1 - head_f), 0.0, None,
               f"convolve({a.name},{b.name})")


@dataclass
class EmpiricalDist:
    """Tallied outcomes of a finite sample; outcomes may be any hashable value."""

    counts: dict[Any, int]
    total: int

    def __post_init__(self):
        if self.total < 0 or sum(self.counts.values()) != self.total:
            raise ValueError("tallies must sum to the sample size")
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("negative tally")

    @classmethod
    def from_samples(cls, samples: Iterable[Any]) -> "EmpiricalDist":
        counts = Counter(
            int(s) if isinstance(s, np.integer) else s for s in samples
        )
        return cls(dict(counts), sum(counts.values()))

    def freq(self, outcome: Any) -> float:
        return self.counts.get(outcome, 0) / self.total if self.total else 0.0

    def merge(self, other: "EmpiricalDist") -> "EmpiricalDist":
        counts = Counter(self.counts)
        counts.update(other.counts)
        return EmpiricalDist(dict(counts), self.total + other.total)

    __add__ = merge

    def to_prob(self) -> dict[Any, float]:
        return {k: c / self.total for k, c in self.counts.items()}


def _prob_table(dist: Pmf | EmpiricalDist, cap: int | None) -> tuple[dict[Any, float], float]:
    """Outcome probabilities plus the mass folded beyond the cap (analytic
    tails always fold). Non-integer outcomes fold when a cap is given."""
    folded = 0.0
    probs: dict[Any, float] = {}
    if isinstance(dist, Pmf):
        for k, p in dist.atoms.items():
            if cap is not None and k > cap:
                folded += p
            else:
                probs[k] = p
        folded += dist.tail_mass
        return probs, folded
    if isinstance(dist, EmpiricalDist):
        if dist.total == 0:
            raise ValueError("empty empirical distribution")
        for k, c in dist.counts.items():
            if cap is not None and (not isinstance(k, (int, np.integer)) or k > cap):
                folded += c / dist.total
            else:
                probs[k] = c / dist.total
        return probs, folded
    raise TypeError(f"unsupported distribution type {type(dist)!r}")


def tv_distance(a: Pmf | EmpiricalDist, b: Pmf | EmpiricalDist,
                cap: int | None = None) -> float:
    """Total variation distance: half the l1 distance over the union support.

    Analytic tails (and, when cap is given, all outcomes above the cap) are
    folded into one final bucket per side.
    """
    pa, ta = _prob_table(a, cap)
    pb, tb = _prob_table(b, cap)
    keys = set(pa) | set(pb)
    head = sum(abs(pa.get(k, 0.0) - pb.get(k, 0.0)) for k in keys)
    return 0.5 * (head + abs(ta - tb))


def chi_square_gof(observed: EmpiricalDist, expected: Pmf | dict[Any, float],
                   bin_floor: float = 5.0) -> tuple[float, int, float]:
    """Pearson goodness-of-fit statistic, degrees of freedom, and p-value.

    Integer outcomes are tail-merged from the top until every expected count
    reaches the floor; missing expected mass forms one extra bucket.
    """
    n = observed.total
    if isinstance(expected, Pmf):
        exp_probs: dict[Any, float] = dict(expected.atoms)
        extra = expected.tail_mass
    else:
        exp_probs = dict(expected)
        extra = max(0.0, 1.0 - sum(exp_probs.values()))
    if extra <= 1e-9:  # rounding residue, not a real tail
        extra = 0.0
    keys = sorted(set(exp_probs) | set(observed.counts))
    mergeable = all(isinstance(k, (int, np.integer)) for k in keys)
    obs = [observed.counts.get(k, 0) for k in keys]
    exp = [n * exp_probs.get(k, 0.0) for k in keys]
    if extra > 0:
        obs.append(0)  # fold bucket for the expected law's tail
        exp.append(n * extra)
    while len(obs) > 1 and min(exp) < bin_floor:
        if not mergeable:
            raise ValueError("cannot tail-merge non-integer outcome cells")
        obs[-2] += obs[-1]
        exp[-2] += exp[-1]
        obs.pop()
        exp.pop()
    if len(obs) < 2:
        raise ValueError("fewer than two cells after merging")
    stat = sum((o - e) ** 2 / e for o, e in zip(obs, exp))
    dof = len(obs) - 1
    return stat, dof, float(chi2.sf(stat, dof))


def chi_square_independence(joint: EmpiricalDist, bin_floor: float = 5.0
                            ) -> tuple[float, int, float]:
    """Pearson independence test of a joint empirical law over integer pairs.

    Tests the table against the product of its marginals; trailing rows/columns
    are merged until every expected cell reaches the floor. Returns
    (statistic, degrees of freedom, p-value).
    """
    pairs = sorted(joint.counts)
    rows = sorted({a for a, _ in pairs})
    cols = sorted({b for _, b in pairs})
    if len(rows) < 2 or len(cols) < 2:
        raise ValueError("degenerate table: need at least two rows and columns")
    table = np.zeros((len(rows), len(cols)))
    rindex = {r: i for i, r in enumerate(rows)}
    cindex = {c: j for j, c in enumerate(cols)}
    for (a, b), count in joint.counts.items():
        table[rindex[a], cindex[b]] += count

    def expected(t: np.ndarray) -> np.ndarray:
        return np.outer(t.sum(axis=1), t.sum(axis=0)) / t.sum()

    while True:
        exp = expected(table)
        if exp.min() >= bin_floor or (table.shape[0] <= 2 and table.shape[1] <= 2):
            break
        # merge the trailing index of the axis whose end is thinnest
        last_row = exp[-1].min()
        last_col = exp[:, -1].min()
        if (last_row <= last_col and table.shape[0] > 2) or table.shape[1] <= 2:
            table[-2] += table[-1]
            table = table[:-1]
        else:
            table[:, -2] += table[:, -1]
            table = table[:, :-1]
    exp = expected(table)
    stat = float(((table - exp) ** 2 / exp).sum())
    dof = (table.shape[0] - 1) * (table.shape[1] - 1)
    return stat, dof, float(chi2.sf(stat, dof))


def exact_fp_distribution(n: int, pattern: Permutation) -> Pmf:
    """Exact rational law of the fixed-point count over the avoiders of the
    pattern in S_n (enumeration; n is capped at MAX_EXACT_N)."""
    if not 1 <= n <= MAX_EXACT_N:
        raise ValueError(f"exact enumeration is limited to n <= {MAX_EXACT_N}")
    counts = Counter(len(p.fixed_points()) for p in enumerate_avoiders(n, pattern))
    total = sum(counts.values())
    exact = {k: Fraction(c, total) for k, c in sorted(counts.items())}
    return _exact_pmf(exact, Fraction(1),
                      sum(Fraction(k * c, total) for k, c in counts.items()),
                      f"fp[n={n},pattern={''.join(map(str, pattern.values))}]")


def exact_front_back_joint(n: int) -> dict[tuple[int, int], Fraction]:
    """Exact joint law of (front count, back count) over the 321-avoiders of
    S_n, the counts being fixed points up to / beyond floor(n/2)."""
    if not 1 <= n <= MAX_EXACT_N:
        raise ValueError(f"exact enumeration is limited to n <= {MAX_EXACT_N}")
    pattern = Permutation((3, 2, 1))
    counts: Counter[tuple[int, int]] = Counter()
    total = 0
    for perm in enumerate_avoiders(n, pattern):
        front, back = perm.fixed_point_measures()
        counts[(len(front), len(back))] += 1
        total += 1
    return {key: Fraction(c, total) for key, c in sorted(counts.items())}


def exact_window_probability(n: int, lo: int, hi: int) -> float:
    """Exact P(some fixed point of a uniform 321-avoider of {1..n} lies in
    [lo, hi]), by dynamic programming over the root decomposition.

    The root subtree sizes of the uniform tree form a renewal sequence with
    per-block weight (1/2) P(progeny = x), conditioned to sum to n, and the
    fixed points are the partial sums at single-vertex blocks. Forbidding
    singletons from landing in the window and normalizing gives the
    complementary probability in O(n^2) float operations. Agrees with
    exhaustive enumeration wherever that is feasible.
    """
    if not 1 <= lo <= hi <= n:
        raise ValueError("need 1 <= lo <= hi <= n")
    law = gw_progeny(max(2048, n))
    pmf = np.zeros(n + 1)
    for k, p in law.atoms.items():
        if k <= n:
            pmf[k] = p
    half = 0.5 * pmf
    unconstrained = np.zeros(n + 1)
    unconstrained[n] = 1.0
    constrained = np.zeros(n + 1)
    constrained[n] = 1.0
    for s in range(n - 1, -1, -1):
        weights = half[1 : n - s + 1]
        unconstrained[s] = float(weights @ unconstrained[s + 1 : n + 1])
        constrained[s] = float(weights @ constrained[s + 1 : n + 1])
        if lo <= s + 1 <= hi:  # a singleton here would be a fixed point at s+1
            constrained[s] -= half[1] * constrained[s + 1]
    return 1.0 - constrained[0] / unconstrained[0]


def midrange_fp_probability(n: int, a: int, b: int, samples: int,
                            rng: RngStream) -> tuple[float, float]:
    """Monte Carlo estimate of P(some fixed point lies in [a, b]) for a uniform
    321-avoider of {1..n}, with a 95% normal-approximation half-width."""
    if not 1 <= a <= b <= n:
        raise ValueError("need 1 <= a <= b <= n")
    if samples < 1:
        raise ValueError("need at least one sample")
    from .experiments import sample_fixed_point_positions

    hits = 0
    for positions in sample_fixed_point_positions(n, samples, rng):
        inside = positions[(positions >= a) & (positions <= b)]
        if inside.size:
            hits += 1
    estimate = hits / samples
    half_width = 1.96 * math.sqrt(estimate * (1.0 - estimate) / samples)
    return estimate, half_width
