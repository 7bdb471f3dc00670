"""Command-line front end: build caches, run verification suites, trace paths.

Exit codes: 0 all checks pass, 1 verification failure, 2 usage or parse
error, 3 resource exhaustion.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .construction import (
    ConstructionCache,
    ExpLadder,
    build_tree,
    cache_stats,
    check_properties,
    export_cache,
)
from .errors import PreconditionError, ResourceLimitError
from .grid import pair
from .reduction import (
    AlphaSpec,
    EventuallyOne,
    FiniteOnes,
    PeriodicOnes,
    alpha_bit,
    bad_row,
    continuity_check,
    divergence_witness,
    f_blocks,
    in_p3,
    join_blocks,
    stabilization_check,
    standard_corpus,
    unit_ball_check,
)
from .reports import CheckReport
from .seqspace import DEFAULT_ETA, Margin, pnorm_pow
from .witness import DEFAULT_STEP_BUDGET

CORPUS_BLOCK_DEPTH = 12
DIVERGENCE_TARGET = 3.0
STABILIZATION_ROWS = 3  # i = 0, 1, 2
CONTINUITY_PAIRS = 20
CONTINUITY_EXTRA = 2


def _default_out():
    return Path(os.environ.get("LPRL_OUT", "out"))


@dataclass
class RunConfig:
    a: float = 0.0
    q: float = 2.0
    ladder_override: tuple = ()
    max_len: int = 10
    eta: float = DEFAULT_ETA
    step_budget: int = DEFAULT_STEP_BUDGET
    output_dir: Path = field(default_factory=_default_out)
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.a < self.q):
            raise ValueError(f"need 0 <= a < q, got a={self.a}, q={self.q}")
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")
        if self.eta < 0:
            raise ValueError("eta must be >= 0")
        self.output_dir = Path(self.output_dir)


def make_cache(config):
    ladder = ExpLadder(config.a, config.q, tuple(config.ladder_override))
    return ConstructionCache(ladder, Margin(config.eta), config.step_budget)


# ---------------------------------------------------------------------------
# AlphaSpec serialization grammar
# ---------------------------------------------------------------------------

class SpecParseError(ValueError):
    pass


_FINITE = re.compile(r"^row=(\d+):finite\{([0-9,\s]*)\}$")
_EVENTUALLY = re.compile(r"^row=(\d+):eventually\((\d+)\)$")
_PERIODIC = re.compile(r"^row=(\d+):periodic\((\d+),(\d+),(\d+)\)$")


def parse_alpha_spec(text):
    """Parse ``row=<i>:finite{j,...} | eventually(<j>) | periodic(<r>,<m>,<j>)``.

    Clauses are semicolon-separated; the empty string is the all-zero
    point. Undeclared rows are all-zero.
    """
    rows = {}
    text = text.strip()
    if not text:
        return AlphaSpec.from_rows(rows)
    for pos, raw in enumerate(text.split(";")):
        clause = raw.strip()
        m = _FINITE.match(clause)
        if m:
            cols = frozenset(int(c) for c in m.group(2).replace(" ", "").split(",") if c)
            row, pat = int(m.group(1)), FiniteOnes(cols)
        else:
            m = _EVENTUALLY.match(clause)
            if m:
                row, pat = int(m.group(1)), EventuallyOne(int(m.group(2)))
            else:
                m = _PERIODIC.match(clause)
                if m:
                    row = int(m.group(1))
                    pat = PeriodicOnes(int(m.group(2)), int(m.group(3)), int(m.group(4)))
                else:
                    raise SpecParseError(f"clause {pos}: unrecognized token {clause!r}")
        if row in rows:
            raise SpecParseError(f"clause {pos}: duplicate row {row}")
        rows[row] = pat
    return AlphaSpec.from_rows(rows)


def format_alpha_spec(spec):
    parts = []
    for i, pat in spec.rows:
        if isinstance(pat, FiniteOnes):
            cols = ",".join(str(c) for c in sorted(pat.cols))
            parts.append(f"row={i}:finite{{{cols}}}")
        elif isinstance(pat, EventuallyOne):
            parts.append(f"row={i}:eventually({pat.j_start})")
        else:
            parts.append(f"row={i}:periodic({pat.residue},{pat.modulus},{pat.j_min})")
    return ";".join(parts)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_build(config):
    """Populate the full tree to max_len and export it deterministically."""
    cache = make_cache(config)
    build_tree(cache, config.max_len)
    stats = cache_stats(cache)
    path = config.output_dir / f"cache_a{config.a}_q{config.q}_len{config.max_len}.txt"
    export_cache(cache, path)
    print(f"nodes cached: {stats['nodes']}")
    print(f"max phi length: {stats['max_phi_length']}")
    print(f"stored literal entries: {stats['literal_entries']}")
    print(f"window segments: {stats['window_segments']} "
          f"(covering {stats['window_entries']} entries as descriptors)")
    print(f"cache written to {path}")
    return 0


def _seeded_continuity_pairs(rng, count):
    """Spec pairs agreeing on all positions <= their agree_to.

    The mutated cell is the first grid cell past the agreement window (its
    index never exceeds 9), which keeps the differing witness blocks short
    enough to materialize for the exact distance computation.
    """
    pairs = []
    while len(pairs) < count:
        agree_to = rng.randrange(3, 9)
        rows_a = {}
        for _ in range(rng.randrange(0, 3)):
            rows_a[rng.randrange(0, 3)] = FiniteOnes(
                frozenset(rng.sample(range(0, 3), rng.randrange(0, 3))))
        spec_a = AlphaSpec.from_rows(rows_a)
        mutation = min(
            ((i, j) for i in range(3) for j in range(5)
             if agree_to < pair(i, j) <= 9),
            key=lambda cell: pair(*cell))
        i, j = mutation
        base = rows_a.get(i)
        cols = set(base.cols) if isinstance(base, FiniteOnes) else set()
        cols.add(j)
        rows_b = dict(rows_a)
        rows_b[i] = FiniteOnes(frozenset(cols))
        spec_b = AlphaSpec.from_rows(rows_b)
        if any(alpha_bit(spec_a, n) != alpha_bit(spec_b, n) for n in range(agree_to + 1)):
            continue
        pairs.append((spec_a, spec_b, agree_to))
    return pairs


def run_verification_suites(config, cache=None):
    """All finite-scale suites over the standard corpus; list of reports."""
    if cache is None:
        cache = make_cache(config)
    reports = [check_properties(cache, config.max_len)]
    corpus = standard_corpus()
    depth = min(CORPUS_BLOCK_DEPTH, max(config.max_len, 1) + 2)
    for spec in corpus:
        reports.append(unit_ball_check(f_blocks(cache, spec, depth), cache.margin))
    for spec in corpus:
        if in_p3(spec):
            for i in range(STABILIZATION_ROWS):
                reports.append(stabilization_check(cache, spec, i, depth))
        else:
            row = bad_row(spec)
            witness = divergence_witness(cache, spec, row, DIVERGENCE_TARGET)
            rep_ok = witness.norm_value > DIVERGENCE_TARGET
            rep = CheckReport(f"divergence row={row}", keep_passing=True)
            rep.add("target-cleared", rep_ok, witness.norm_value, DIVERGENCE_TARGET,
                    note=f"prefix_len={witness.prefix_len}")
            reports.append(rep)
    rng = random.Random(config.seed)
    for spec_a, spec_b, agree_to in _seeded_continuity_pairs(rng, CONTINUITY_PAIRS):
        reports.append(continuity_check(cache, spec_a, spec_b, agree_to, CONTINUITY_EXTRA))
    return reports


def cmd_verify(config):
    """Run every suite, write the machine-readable report, exit by outcome."""
    cache = make_cache(config)
    reports = run_verification_suites(config, cache)
    payload = {
        "config": {
            "a": config.a, "q": config.q, "max_len": config.max_len,
            "eta": config.eta, "seed": config.seed,
        },
        "suites": [r.to_dict() for r in reports],
        "ok": all(r.ok for r in reports),
    }
    config.output_dir.mkdir(parents=True, exist_ok=True)
    out = config.output_dir / "verify_report.json"
    out.write_text(json.dumps(payload, indent=2) + "\n")
    for r in reports:
        print(r.summary())
    print(f"report written to {out}")
    return 0 if payload["ok"] else 1


TRACE_COLUMNS = [
    "k", "bit", "block_len", "block_q_pow",
    "cum_q_pow", "cum_p0_pow", "cum_p1_pow", "cum_p2_pow", "cum_p3_pow",
]


def cmd_trace(config, spec_text, k, target=None):
    """Emit the block table of a path as CSV (full-precision values)."""
    spec = parse_alpha_spec(spec_text)
    cache = make_cache(config)
    bd = f_blocks(cache, spec, k)
    ladder = cache.ladder
    rows = []
    for t in range(k + 1):
        prefix = join_blocks(bd.blocks[:t + 1])
        row = [
            t,
            alpha_bit(spec, t),
            bd.blocks[t].length,
            repr(pnorm_pow(bd.blocks[t], ladder.q)),
            repr(pnorm_pow(prefix, ladder.q)),
        ]
        row += [repr(pnorm_pow(prefix, ladder.exponent(i))) for i in range(4)]
        rows.append(row)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    out = config.output_dir / "trace.csv"
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        writer.writerows(rows)
    print(",".join(TRACE_COLUMNS))
    for row in rows:
        print(",".join(str(c) for c in row))
    print(f"trace written to {out}")
    if in_p3(spec):
        for i in range(STABILIZATION_ROWS):
            rep = stabilization_check(cache, spec, i, k)
            print(rep.summary())
    else:
        row_i = bad_row(spec)
        witness = divergence_witness(
            cache, spec, row_i, DIVERGENCE_TARGET if target is None else target)
        print(f"divergence at row {row_i}: power sum {witness.norm_value!r} "
              f"after prefix of length {witness.prefix_len}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_common(parser):
    parser.add_argument("--a", type=float, default=0.0, help="lower exponent limit (>= 0)")
    parser.add_argument("--q", type=float, default=2.0, help="ambient exponent (> a)")
    parser.add_argument("--max-len", type=int, default=10, help="tree depth to build/check")
    parser.add_argument("--eta", type=float, default=DEFAULT_ETA,
                        help="strictness margin for certified comparisons")
    parser.add_argument("--step-budget", type=int, default=DEFAULT_STEP_BUDGET,
                        help="cap on explicit summation steps per search")
    parser.add_argument("--ladder", type=str, default="",
                        help="explicit leading ladder exponents, comma-separated")
    parser.add_argument("--out", type=str, default=None,
                        help="output directory (default $LPRL_OUT or ./out)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")


def _config_from(args):
    ladder = tuple(float(p) for p in args.ladder.split(",") if p) if args.ladder else ()
    out = Path(args.out) if args.out else _default_out()
    return RunConfig(a=args.a, q=args.q, ladder_override=ladder, max_len=args.max_len,
                     eta=args.eta, step_budget=args.step_budget,
                     output_dir=out, seed=args.seed)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="lprl",
        description="Certified finite-scale checks for the sequence-space construction. "
                    "Trace CSV columns: " + ", ".join(TRACE_COLUMNS) + ".")
    sub = parser.add_subparsers(dest="command", required=True)
    p_build = sub.add_parser("build", help="build the tree and export the cache")
    _add_common(p_build)
    p_verify = sub.add_parser("verify", help="run all verification suites")
    _add_common(p_verify)
    p_trace = sub.add_parser("trace", help="emit the block table of one path")
    _add_common(p_trace)
    p_trace.add_argument("--spec", type=str, required=True,
                         help="point spec, e.g. 'row=0:finite{1,2};row=2:eventually(0)'")
    p_trace.add_argument("--k", type=int, default=CORPUS_BLOCK_DEPTH,
                         help="number of blocks to trace")
    p_trace.add_argument("--target", type=float, default=None,
                         help="divergence target for non-member specs")

    try:
        args = parser.parse_args(argv)
        config = _config_from(args)
        if args.command == "build":
            return cmd_build(config)
        if args.command == "verify":
            return cmd_verify(config)
        return cmd_trace(config, args.spec, args.k, args.target)
    except ResourceLimitError as err:
        print(f"resource limit: {err}", file=sys.stderr)
        return 3
    except (SpecParseError, PreconditionError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
