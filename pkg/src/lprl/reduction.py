"""Path reductions: block decompositions and the membership dichotomy.

A point of the binary sequence space is described finitely by an
AlphaSpec: per-row one-patterns under the diagonal grid, all-zero by
default. The pattern classes keep membership in the target class
decidable: a point is "eventually zero in every row" exactly when every
declared row has finitely many ones.

Following a point's bits through the tree construction yields a block
decomposition u_0, u_1, ... whose q-costs are geometrically summable;
the checks here certify, at finite scale, the block bound, unit-ball
containment, continuity modulus, cap stabilization along good rows, and
forced divergence along bad ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .construction import build_node
from .grid import pair, unpair
from .reports import CheckReport
from .seqspace import (
    DEFAULT_MARGIN,
    MATERIALIZE_LIMIT,
    FinSeq,
    certified_less,
    pnorm_pow,
    scale,
    _padded_arrays,
)


# ---------------------------------------------------------------------------
# Row patterns and point specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteOnes:
    """Ones exactly at the given (finite) set of columns."""

    cols: frozenset

    def __post_init__(self):
        object.__setattr__(self, "cols", frozenset(int(c) for c in self.cols))
        if any(c < 0 for c in self.cols):
            raise ValueError("columns must be naturals")

    infinite = False

    def bit(self, j):
        return 1 if j in self.cols else 0

    def ones(self):
        yield from sorted(self.cols)

    def zero_from(self):
        return max(self.cols) + 1 if self.cols else 0


@dataclass(frozen=True)
class EventuallyOne:
    """Ones at every column from j_start on."""

    j_start: int = 0

    def __post_init__(self):
        if self.j_start < 0:
            raise ValueError("j_start must be a natural")

    infinite = True

    def bit(self, j):
        return 1 if j >= self.j_start else 0

    def ones(self):
        j = self.j_start
        while True:
            yield j
            j += 1


@dataclass(frozen=True)
class PeriodicOnes:
    """Ones at columns j >= j_min with j = residue (mod modulus)."""

    residue: int
    modulus: int
    j_min: int = 0

    def __post_init__(self):
        if self.modulus < 1 or not (0 <= self.residue < self.modulus) or self.j_min < 0:
            raise ValueError(
                f"need modulus >= 1, 0 <= residue < modulus, j_min >= 0: {self}")

    infinite = True

    def bit(self, j):
        return 1 if j >= self.j_min and j % self.modulus == self.residue else 0

    def ones(self):
        j = self.j_min + (self.residue - self.j_min) % self.modulus
        while True:
            yield j
            j += self.modulus


@dataclass(frozen=True)
class AlphaSpec:
    """Finite description of a full binary point: row index -> pattern."""

    rows: tuple  # sorted ((index, pattern), ...)

    @classmethod
    def from_rows(cls, mapping):
        items = []
        for i, pat in dict(mapping).items():
            i = int(i)
            if i < 0:
                raise ValueError("row indices must be naturals")
            if not isinstance(pat, (FiniteOnes, EventuallyOne, PeriodicOnes)):
                raise TypeError(f"unknown row pattern {pat!r}")
            items.append((i, pat))
        return cls(tuple(sorted(items)))

    def row_pattern(self, i):
        for idx, pat in self.rows:
            if idx == i:
                return pat
        return None


def alpha_bit(spec, n):
    """The point's bit at position n: unpair and evaluate the row pattern."""
    i, j = unpair(n)
    pat = spec.row_pattern(i)
    return pat.bit(j) if pat is not None else 0


def in_p3(spec):
    """True iff every declared row has finitely many ones."""
    return all(not pat.infinite for _, pat in spec.rows)


def path_bits(spec, k):
    """The first k+1 bits of the point described by spec."""
    return tuple(alpha_bit(spec, n) for n in range(k + 1))


# ---------------------------------------------------------------------------
# Block decomposition and prefix certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockDecomposition:
    """Blocks u_0..u_k along a point's path; concatenation is phi of the path."""

    blocks: tuple
    spec: AlphaSpec
    k: int
    q: float


@dataclass(frozen=True)
class PrefixCertificate:
    """An initial segment of the reduced point with its q-cost tail bound.

    Any longer truncation exceeds this prefix's q power sum by at most
    tail_q_bound.
    """

    prefix: FinSeq
    blocks_used: int
    tail_q_bound: float
    q: float


def f_blocks(cache, spec, k):
    """Blocks u_0..u_k of the reduced point, straight from the tree cache."""
    if k < 0:
        raise ValueError("k must be >= 0")
    bits = path_bits(spec, k)
    blocks = tuple(build_node(cache, bits[:j + 1]).block for j in range(k + 1))
    return BlockDecomposition(blocks, spec, k, cache.ladder.q)


def join_blocks(blocks):
    return FinSeq(sum((b.segments for b in blocks), ()))


def prefix_certificate(cache, spec, k):
    bd = f_blocks(cache, spec, k)
    return PrefixCertificate(join_blocks(bd.blocks), k, 2.0 ** -(k + 1), bd.q)


def scale_prefix(pc, delta):
    """Entrywise scaling; the q-cost tail bound scales by delta**q."""
    delta = float(delta)
    if not (math.isfinite(delta) and delta > 0):
        raise ValueError(f"delta must be positive, got {delta!r}")
    return PrefixCertificate(
        scale(pc.prefix, delta), pc.blocks_used,
        pc.tail_q_bound * delta ** pc.q, pc.q)


def export_prefix(pc, path, limit=MATERIALIZE_LIMIT):
    """Write the prefix one value per line (round-trip exact), header first."""
    lines = [f"# blocks_used={pc.blocks_used} q={pc.q!r} tail_q_bound={pc.tail_q_bound!r}"]
    lines.extend(repr(v) for v in pc.prefix.iter_entries(limit))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def unit_ball_check(bd, margin=DEFAULT_MARGIN):
    """Certify the per-block q-cost bound and unit-ball containment.

    Each block must cost strictly less than 2**-(t+1) in q power, so the
    cumulative cost stays under the geometric partial sum, hence under 1.
    """
    rep = CheckReport(f"unit-ball k={bd.k}", keep_passing=False)
    costs = [pnorm_pow(u, bd.q) for u in bd.blocks]
    for t, c in enumerate(costs):
        rep.add("block-q-bound", certified_less(c, 2.0 ** -(t + 1), margin),
                c, 2.0 ** -(t + 1), note=f"t={t}")
    cumulative = math.fsum(costs)
    geometric = 1.0 - 2.0 ** -(bd.k + 1)
    rep.add("cumulative-under-geometric", cumulative <= geometric,
            cumulative, geometric)
    rep.add("cumulative-under-one", cumulative <= 1.0, cumulative, 1.0)
    return rep


def continuity_check(cache, spec_a, spec_b, agree_to, k_extra, margin=DEFAULT_MARGIN):
    """Certify the continuity modulus on two points agreeing to position agree_to.

    The prefixes computed to agree_to + k_extra blocks share their first
    agree_to + 1 blocks; the truncated distance (an underestimate of the
    true one) must sit under 2 * 2**-(agree_to+1)/q for q >= 1, or under
    2 * 2**-(agree_to+1) in the power-sum metric for q < 1.
    """
    for n in range(agree_to + 1):
        if alpha_bit(spec_a, n) != alpha_bit(spec_b, n):
            raise ValueError(f"specs disagree at position {n} <= agree_to={agree_to}")
    k_total = agree_to + k_extra
    bd_a = f_blocks(cache, spec_a, k_total)
    bd_b = f_blocks(cache, spec_b, k_total)
    rep = CheckReport(f"continuity agree_to={agree_to} k_extra={k_extra}", keep_passing=True)
    shared = all(bd_a.blocks[t] == bd_b.blocks[t] for t in range(agree_to + 1))
    rep.add("shared-blocks-identical", shared, note=f"t<={agree_to}")
    ax, ay = _padded_arrays(join_blocks(bd_a.blocks), join_blocks(bd_b.blocks))
    dist_pow = float(np.sum(np.abs(ax - ay) ** bd_a.q))
    if bd_a.q >= 1:
        dist = dist_pow ** (1.0 / bd_a.q)
        bound = 2.0 * 2.0 ** (-(agree_to + 1) / bd_a.q)
    else:
        dist = dist_pow
        bound = 2.0 * 2.0 ** -(agree_to + 1)
    rep.add("truncated-distance", certified_less(dist, bound, margin), dist, bound)
    return rep


class DivergenceWitness(NamedTuple):
    prefix_len: int
    norm_value: float


def divergence_witness(cache, spec, row, target, margin=None):
    """Walk the ones of a bad row until the row-exponent power sum beats target.

    Each one-bit at grid cell (row, j) forces the power sum at that row's
    exponent past the cell index plus one, so the walk certifiably clears
    any finite target; the returned value is an independent re-summation
    of the winning prefix.
    """
    if margin is None:
        margin = cache.margin
    pat = spec.row_pattern(row)
    if pat is None or not pat.infinite:
        raise ValueError(f"row {row} does not carry infinitely many ones")
    p_row = cache.ladder.exponent(row)
    for j in pat.ones():
        n = pair(row, j)
        node = build_node(cache, path_bits(spec, n))
        value = pnorm_pow(node.phi, p_row)
        if certified_less(target, value, margin):
            return DivergenceWitness(node.phi.length, value)
    raise AssertionError("unreachable: targets grow past any bound")


def stabilization_check(cache, spec, i, max_k, margin=None):
    """Certify that the cap at row i freezes along a good point's path.

    From the first position where rows 0..i have gone permanently zero,
    every longer prefix must keep the identical cap M_i, and every prefix
    power sum at p_i must stay certifiably below it.
    """
    if margin is None:
        margin = cache.margin
    if not in_p3(spec):
        raise ValueError("stabilization applies only to eventually-zero-row specs")
    j0 = 0
    for r in range(i + 1):
        pat = spec.row_pattern(r)
        if pat is not None:
            j0 = max(j0, pat.zero_from())
    n_stable = pair(i, j0)
    rep = CheckReport(f"stabilization i={i} j0={j0}", keep_passing=False)
    if n_stable > max_k:
        rep.add("in-range", True, n_stable, max_k,
                note="stabilization index beyond max_k; nothing to check")
        return rep
    p_i = cache.ladder.exponent(i)
    bits = path_bits(spec, max_k)
    m_ref = build_node(cache, bits[:n_stable + 1]).M[i]
    for k in range(n_stable, max_k + 1):
        node = build_node(cache, bits[:k + 1])
        rep.add("cap-stable", node.M[i] == m_ref, node.M[i], m_ref, note=f"k={k}")
        s = pnorm_pow(node.phi, p_i)
        rep.add("prefix-bounded", certified_less(s, float(m_ref), margin),
                s, m_ref, note=f"k={k}")
    return rep


# ---------------------------------------------------------------------------
# Fixed verification corpus
# ---------------------------------------------------------------------------

def standard_corpus():
    """Eight fixed specs: four with every row eventually zero, four without.

    Rows at index <= 2 keep their ones in columns <= 1, which pins the
    stabilization positions for i <= 2 inside a depth-12 path.
    """
    return (
        AlphaSpec.from_rows({}),
        AlphaSpec.from_rows({0: FiniteOnes(frozenset({0}))}),
        AlphaSpec.from_rows({1: FiniteOnes(frozenset({0, 1})), 3: FiniteOnes(frozenset({0}))}),
        AlphaSpec.from_rows({0: FiniteOnes(frozenset({1})), 2: FiniteOnes(frozenset({0}))}),
        AlphaSpec.from_rows({0: EventuallyOne(0)}),
        AlphaSpec.from_rows({1: PeriodicOnes(0, 2, 0)}),
        AlphaSpec.from_rows({2: PeriodicOnes(1, 3, 0)}),
        AlphaSpec.from_rows({0: FiniteOnes(frozenset({0, 1})), 3: EventuallyOne(1)}),
    )


def bad_row(spec):
    """The least row with infinitely many ones, or None."""
    for i, pat in spec.rows:
        if pat.infinite:
            return i
    return None
