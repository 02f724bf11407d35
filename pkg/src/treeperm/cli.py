"""Command-line interface: sampling, enumeration, bijection, exact
distributions, and verification experiments with reproducible outputs.

Every randomized command requires --seed; identical argv plus seed (and
package version) reproduce byte-identical outputs. Results carry a JSON
metadata header; --format picks csv (default, header as a '# ' comment line)
or json (one document with "meta" and "rows").

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .acceptance import criterion_names, run_all
from .bijection import perm_to_tree, tree_to_perm
from .distributions import (
    EmpiricalDist,
    exact_fp_distribution,
    midrange_fp_probability,
    negative_binomial_2_one_third,
    tv_distance,
)
from .experiments import sample_fixed_point_positions
from .perms import Permutation, enumerate_avoiders
from .rng import RngStream
from .samplers import sample_limit_process, uniform_avoider_321, uniform_tree
from .trees import DyckPath, dyck_from_tree, tree_from_dyck

_PATTERNS = {"321": (3, 2, 1), "132": (1, 3, 2), "213": (2, 1, 3)}


def _split_counts(total: int, streams: int) -> list[int]:
    base, extra = divmod(total, streams)
    return [base + (1 if i < extra else 0) for i in range(streams)]


def _meta(args: argparse.Namespace, **extra) -> dict:
    meta = {"command": args.command, "version": __version__}
    for key in ("seed", "streams", "n", "count"):
        if hasattr(args, key):
            meta[key] = getattr(args, key)
    meta.update(extra)
    return {k: v for k, v in meta.items() if v is not None}


def emit_report(meta: dict, header: list[str], rows: list[tuple], fmt: str) -> str:
    """Render a result table with its metadata header; byte-stable for
    identical inputs (floats via repr, keys sorted)."""
    if fmt == "json":
        doc = {
            "meta": meta,
            "header": header,
            "rows": [list(r) for r in rows],
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    lines = ["# " + json.dumps(meta, sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def emit_lines(meta: dict, lines: list[str], fmt: str) -> str:
    """Render one-object-per-line output with its metadata header."""
    if fmt == "json":
        doc = {"meta": meta, "samples": lines}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    out = ["# " + json.dumps(meta, sort_keys=True)]
    out.extend(lines)
    return "\n".join(out) + "\n"


def _write(args: argparse.Namespace, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _pattern(args: argparse.Namespace) -> Permutation:
    return Permutation(_PATTERNS[args.pattern])


def _union_support_overlay(empirical: EmpiricalDist, law, header: list[str]) -> list[tuple]:
    """Two aligned probability columns over the union support (plot-ready)."""
    support = sorted(set(empirical.counts) | set(law.atoms), key=int)
    return [(int(k), empirical.freq(k), law.prob(k)) for k in support]


def _cmd_sample_perm(args) -> int:
    lines = []
    for stream, share in enumerate(_split_counts(args.count, args.streams)):
        rng = RngStream(args.seed, stream)
        lines.extend(str(uniform_avoider_321(args.n, rng)) for _ in range(share))
    _write(args, emit_lines(_meta(args), lines, args.format))
    return 0


def _cmd_sample_tree(args) -> int:
    lines = []
    for stream, share in enumerate(_split_counts(args.count, args.streams)):
        rng = RngStream(args.seed, stream)
        lines.extend(
            dyck_from_tree(uniform_tree(args.n, rng)).word() for _ in range(share)
        )
    _write(args, emit_lines(_meta(args), lines, args.format))
    return 0


def _cmd_sample_limit(args) -> int:
    lines = []
    for stream, share in enumerate(_split_counts(args.count, args.streams)):
        rng = RngStream(args.seed, stream)
        for _ in range(share):
            draw = sample_limit_process(rng)
            lines.append(json.dumps({
                "front_blocks": list(draw.front_blocks),
                "back_blocks": list(draw.back_blocks),
                "front": list(draw.front.positions),
                "back": list(draw.back.positions),
            }, sort_keys=True))
    _write(args, emit_lines(_meta(args), lines, args.format))
    return 0


def _cmd_biject(args) -> int:
    if args.direction == "tree-to-perm":
        tree = tree_from_dyck(DyckPath.from_word(args.input))
        sys.stdout.write(str(tree_to_perm(tree)) + "\n")
    else:
        perm = Permutation.from_text(args.input)
        sys.stdout.write(dyck_from_tree(perm_to_tree(perm)).word() + "\n")
    return 0


def _cmd_enumerate(args) -> int:
    lines = [str(p) for p in enumerate_avoiders(args.n, _pattern(args))]
    _write(args, emit_lines(_meta(args, pattern=args.pattern), lines, args.format))
    return 0


def _cmd_exact_dist(args) -> int:
    law = exact_fp_distribution(args.n, _pattern(args))
    rows = [(k, float(v)) for k, v in sorted(law.exact.items())]
    text = emit_report(
        _meta(args, pattern=args.pattern), ["fixed_points", "probability"], rows, args.format
    )
    _write(args, text)
    return 0


def _cmd_midrange(args) -> int:
    b = args.b if args.b is not None else args.n - args.a
    rng = RngStream(args.seed, 0)
    estimate, half_width = midrange_fp_probability(args.n, args.a, b, args.count, rng)
    rows = [(args.a, b, estimate, half_width)]
    text = emit_report(
        _meta(args, a=args.a, b=b), ["a", "b", "estimate", "half_width"], rows, args.format
    )
    _write(args, text)
    return 0


def _cmd_convergence(args) -> int:
    """Total-fixed-point-count convergence: TV to the limiting negative
    binomial law per n, with an approximate multinomial noise scale."""
    ns = sorted(int(tok) for tok in args.n.split(","))
    law = negative_binomial_2_one_third()
    rows = []
    overlays = {}
    for i, n in enumerate(ns):
        rng = RngStream(args.seed, i)
        totals = [p.size for p in sample_fixed_point_positions(n, args.count, rng)]
        emp = EmpiricalDist.from_samples(totals)
        tv = tv_distance(emp, law)
        noise = 0.5 * sum(
            (f * (1 - f) / args.count) ** 0.5 for f in emp.to_prob().values()
        )
        rows.append((n, tv, noise))
        overlays[n] = _union_support_overlay(emp, law, [])
    text = emit_report(_meta(args, n=None, n_values=ns), ["n", "tv", "ci"], rows, args.format)
    _write(args, text)
    if args.out:
        for n, overlay in overlays.items():
            path = f"{args.out}.n{n}.overlay.csv"
            body = emit_report(
                _meta(args, n=n, law=law.name),
                ["count", "empirical", "limit"],
                overlay,
                "csv",
            )
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(body)
    return 0


def _cmd_verify(args) -> int:
    numbers = None
    if args.only:
        numbers = {int(tok) for tok in args.only.split(",")}
        known = {num for num, _ in criterion_names()}
        if not numbers <= known:
            raise SystemExit(f"unknown criterion numbers {sorted(numbers - known)}")
    results = run_all(
        seed=args.seed,
        tolerance_scale=args.tolerance,
        numbers=numbers,
        report=lambda line: print(line, flush=True),
    )
    if args.out:
        rows = [(r.number, r.name, "pass" if r.passed else "fail", r.detail) for r in results]
        body = emit_report(
            _meta(args), ["criterion", "name", "status", "detail"], rows, "csv"
        )
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treeperm",
        description="Plane trees <-> 321-avoiding permutations: samplers, "
        "bijection, and fixed-point limit-law experiments.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, seed=True, n=None, count=None):
        if n:
            p.add_argument("--n", type=int, required=True, help=n)
        if count:
            p.add_argument("--count", type=int, default=1, help=count)
        if seed:
            p.add_argument("--seed", type=int, required=True, help="RNG seed (required)")
            p.add_argument("--streams", type=int, default=1,
                           help="split the draws over this many RNG streams")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("sample-perm", help="uniform 321-avoiding permutations")
    add_common(p, n="permutation length", count="number of samples")
    p.set_defaults(func=_cmd_sample_perm)

    p = sub.add_parser("sample-tree", help="uniform plane trees (Dyck words)")
    add_common(p, n="vertex count", count="number of samples")
    p.set_defaults(func=_cmd_sample_tree)

    p = sub.add_parser("sample-limit", help="draws of the limiting fixed-point process")
    add_common(p, count="number of samples")
    p.set_defaults(func=_cmd_sample_limit)

    p = sub.add_parser("biject", help="apply the tree <-> permutation bijection")
    p.add_argument("--direction", choices=("tree-to-perm", "perm-to-tree"), required=True)
    p.add_argument("--in", dest="input", required=True,
                   help="a Dyck word (tree-to-perm) or one-line permutation (perm-to-tree)")
    p.set_defaults(func=_cmd_biject)

    p = sub.add_parser("enumerate", help="list all pattern-avoiding permutations")
    p.add_argument("--pattern", choices=sorted(_PATTERNS), default="321")
    add_common(p, seed=False, n="permutation length")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("exact-dist", help="exact fixed-point-count distribution")
    p.add_argument("--pattern", choices=sorted(_PATTERNS), default="321")
    add_common(p, seed=False, n="permutation length")
    p.set_defaults(func=_cmd_exact_dist)

    p = sub.add_parser("midrange", help="P(some fixed point in [a, b]) by Monte Carlo")
    add_common(p, n="permutation length", count="number of samples")
    p.add_argument("--a", type=int, default=50, help="window start")
    p.add_argument("--b", type=int, default=None, help="window end (default n - a)")
    p.set_defaults(func=_cmd_midrange)

    p = sub.add_parser("convergence",
                       help="TV of the total fixed-point count to its limit law, per n")
    p.add_argument("--n", required=True, help="comma-separated lengths, e.g. 50,200,1000")
    p.add_argument("--count", type=int, default=10000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--streams", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_convergence)

    p = sub.add_parser("verify", help="run the acceptance suite (one line per criterion)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tolerance", type=float, default=1.0,
                   help="scale factor on the Monte Carlo tolerances")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--out", help="also write a CSV report here")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
