"""The recursive tree construction over binary strings.

Every binary string sigma gets a non-negative finite sequence phi(sigma)
and a vector of natural caps M_0..M_{d(sigma)}, one per grid row reached:

  * extending by 0 appends a literal zero and keeps every cap;
  * extending by 1 appends a witness block that pushes the power sum at
    the new level's exponent past lh(sigma)+1 while respecting the caps
    below that level and a q-cost budget of 2**-(lh(sigma)+1).

``check_properties`` re-verifies the whole bundle of invariants over the
populated tree by independent re-summation: prefix coherence, per-block
q-cost, cap discipline, cap stability under both extensions, forced
growth, and the cap-vector length bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from pathlib import Path

from .errors import ResourceLimitError
from .grid import bitstring, depth, level
from .reports import CheckReport
from .seqspace import (
    DEFAULT_MARGIN,
    EMPTY,
    ExpLadder,
    FinSeq,
    Literal,
    Margin,
    PowerWindow,
    certified_less,
    concat,
    finseq,
    pnorm_pow,
)
from .witness import DEFAULT_STEP_BUDGET, ClaimRequest, extend

__all__ = [
    "ExpLadder",
    "Node",
    "ConstructionCache",
    "build_node",
    "build_tree",
    "check_properties",
    "least_natural_above",
    "export_cache",
    "import_cache",
    "cache_stats",
]


def least_natural_above(x, margin=DEFAULT_MARGIN):
    """Smallest natural strictly above x, robust to rounding at the boundary.

    If x sits within the margin of the next integer the larger choice is
    taken, so the strict domination survives independent re-summation.
    """
    if x < 0:
        raise ValueError(f"expected a non-negative value, got {x!r}")
    cand = math.floor(x) + 1
    if x + margin.eta >= cand:
        cand += 1
    return int(cand)


@dataclass(frozen=True)
class Node:
    """State at one string: phi value, cap vector, and the appended block."""

    sigma: tuple
    phi: FinSeq
    M: tuple
    block: FinSeq


class ConstructionCache:
    """Memoized, prefix-closed store of construction nodes.

    Nodes are pure functions of (ladder, margin, step budget, sigma), so
    population order never changes values. Completed nodes are immutable
    and safe to read concurrently.
    """

    def __init__(self, ladder, margin=DEFAULT_MARGIN, step_budget=DEFAULT_STEP_BUDGET):
        if not isinstance(ladder, ExpLadder):
            raise TypeError("ladder must be an ExpLadder")
        if not isinstance(margin, Margin):
            margin = Margin(float(margin))
        self.ladder = ladder
        self.margin = margin
        self.step_budget = int(step_budget)
        self._nodes = {(): Node((), EMPTY, (), EMPTY)}

    def node(self, sigma):
        return build_node(self, sigma)

    def __len__(self):
        return len(self._nodes)

    def __contains__(self, sigma):
        return bitstring(sigma) in self._nodes


def build_node(cache, sigma):
    """Return the node at sigma, building all missing prefixes first."""
    sigma = bitstring(sigma)
    nodes = cache._nodes
    hit = nodes.get(sigma)
    if hit is not None:
        return hit
    for length in range(1, len(sigma) + 1):
        prefix = sigma[:length]
        if prefix not in nodes:
            nodes[prefix] = _extend_node(cache, nodes[sigma[:length - 1]], prefix[-1])
    return nodes[sigma]


def _extend_node(cache, parent, bit):
    sigma = parent.sigma
    tau = sigma + (bit,)
    ladder = cache.ladder
    d_tau = depth(tau)

    if bit == 0:
        block = finseq((0.0,))
        phi = concat(parent.phi, block)
        if not sigma:
            caps = (1,)
        else:
            caps = parent.M
            if d_tau == len(caps):  # depth grew by one row
                p_new = ladder.exponent(d_tau)
                caps = caps + (least_natural_above(pnorm_pow(phi, p_new), cache.margin),)
        return Node(tau, phi, caps, block)

    l_tau = level(tau)
    req = ClaimRequest(
        u=parent.phi,
        q=ladder.q,
        exps=ladder.exponents(l_tau + 1),
        caps=tuple(float(c) for c in parent.M[:l_tau]),
        M=float(len(sigma) + 1),
        eps=2.0 ** -(len(sigma) + 1),
        step_budget=cache.step_budget,
    )
    try:
        w = extend(req, cache.margin)
    except ResourceLimitError as err:
        err.sigma = tau
        raise
    phi = concat(parent.phi, w.v)
    caps = tuple(parent.M[:l_tau]) + tuple(
        least_natural_above(pnorm_pow(phi, ladder.exponent(i)), cache.margin)
        for i in range(l_tau, d_tau + 1)
    )
    return Node(tau, phi, caps, w.v)


def build_tree(cache, max_len):
    """Populate every node with lh(sigma) <= max_len (2**(max_len+1)-1 nodes)."""
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    for length in range(1, max_len + 1):
        for bits in product((0, 1), repeat=length):
            build_node(cache, bits)
    return cache


def check_properties(cache, max_len):
    """Re-verify all construction properties over the tree up to max_len.

    Every quantity is re-summed from the stored sequences; nothing is
    trusted from the bookkeeping that produced them. Violations carry the
    offending string.
    """
    ladder = cache.ladder
    margin = cache.margin
    q = ladder.q
    rep = CheckReport(f"construction-properties max_len={max_len}")
    root = cache.node(())
    rep.add("bookkeeping", len(root.M) == depth(()) + 1, len(root.M), 0, note="sigma=()")

    for length in range(1, max_len + 1):
        for bits in product((0, 1), repeat=length):
            node = build_node(cache, bits)
            parent = cache._nodes[bits[:-1]]
            tag = "".join(map(str, bits))
            d = depth(bits)

            rep.add("bookkeeping", len(node.M) == d + 1, len(node.M), d + 1, note=tag)
            rep.add("phi-nonempty", node.phi.length >= 1, node.phi.length, 1, note=tag)
            rep.add("p1-prefix", parent.phi.is_prefix_of(node.phi, proper=True), note=tag)

            block_cost = pnorm_pow(node.block, q)
            bound = 2.0 ** -length
            rep.add("p2-block-cost", certified_less(block_cost, bound, margin),
                    block_cost, bound, note=tag)

            for i in range(d + 1):
                s = pnorm_pow(node.phi, ladder.exponent(i))
                rep.add("p3-caps", certified_less(s, float(node.M[i]), margin),
                        s, node.M[i], note=f"{tag} i={i}")

            if bits[-1] == 0 and length >= 2:
                rep.add("p4-zero-stable", node.M[:len(parent.M)] == parent.M,
                        node.M, parent.M, note=tag)
            if bits[-1] == 1:
                l = level(bits)
                if l > 0:
                    rep.add("p5-one-stable", node.M[:l] == parent.M[:l],
                            node.M[:l], parent.M[:l], note=tag)
                growth = pnorm_pow(node.phi, ladder.exponent(l))
                rep.add("p6-forced-growth", certified_less(float(length), growth, margin),
                        growth, length, note=tag)
    return rep


def cache_stats(cache):
    """Node count plus size measures (window lengths are exact ints)."""
    max_phi = 0
    literal_entries = 0
    window_entries = 0
    windows = 0
    for node in cache._nodes.values():
        if node.phi.length > max_phi:
            max_phi = node.phi.length
        for seg in node.block.segments:
            if isinstance(seg, Literal):
                literal_entries += seg.length
            else:
                windows += 1
                window_entries += seg.length
    return {
        "nodes": len(cache._nodes),
        "max_phi_length": max_phi,
        "literal_entries": literal_entries,
        "window_segments": windows,
        "window_entries": window_entries,
    }


# ---------------------------------------------------------------------------
# Cache export / import
# ---------------------------------------------------------------------------

def _format_segments(fs):
    parts = []
    for seg in fs.segments:
        if isinstance(seg, Literal):
            parts.append("L:" + ",".join(repr(v) for v in seg.values))
        else:
            parts.append(f"W:{seg.p_bottom!r},{seg.scale!r},{seg.n_start},{seg.n_end}")
    return ";".join(parts)


def _parse_segments(text):
    segs = []
    if text:
        for part in text.split(";"):
            kind, _, body = part.partition(":")
            if kind == "L":
                segs.append(Literal(tuple(float(v) for v in body.split(","))))
            elif kind == "W":
                pb, sc, n0, n1 = body.split(",")
                segs.append(PowerWindow(float(pb), int(n0), int(n1), float(sc)))
            else:
                raise ValueError(f"unknown segment kind {kind!r}")
    return FinSeq(tuple(segs))


def export_cache(cache, path):
    """Write every cached node as structured text, deterministically.

    One record per string: bits, cap vector, and the phi segments at full
    (round-trip exact) precision. Records are sorted by (length, bits), so
    identical configurations export byte-identical files.
    """
    ladder = cache.ladder
    lines = ["# lprl-cache v1"]
    explicit = ",".join(repr(p) for p in ladder.explicit) if ladder.explicit else "-"
    lines.append(f"# a={ladder.a!r} q={ladder.q!r} explicit={explicit}")
    lines.append(f"# eta={cache.margin.eta!r} step_budget={cache.step_budget}")
    for sigma in sorted(cache._nodes, key=lambda s: (len(s), s)):
        node = cache._nodes[sigma]
        bits = "".join(map(str, sigma)) or "-"
        mvec = ",".join(str(m) for m in node.M)
        lines.append(f"{bits}|M={mvec}|phi={_format_segments(node.phi)}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def import_cache(path):
    """Rebuild a ConstructionCache from an exported file."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "# lprl-cache v1":
        raise ValueError(f"{path}: not a cache file")
    meta = {}
    body = []
    for line in lines[1:]:
        if line.startswith("# "):
            for tok in line[2:].split():
                key, _, val = tok.partition("=")
                meta[key] = val
        elif line:
            body.append(line)
    explicit = () if meta["explicit"] == "-" else tuple(
        float(v) for v in meta["explicit"].split(","))
    ladder = ExpLadder(float(meta["a"]), float(meta["q"]), explicit)
    cache = ConstructionCache(ladder, Margin(float(meta["eta"])), int(meta["step_budget"]))
    for line in body:
        bits_text, m_text, phi_text = line.split("|")
        sigma = () if bits_text == "-" else bitstring(bits_text)
        caps = tuple(int(v) for v in m_text[2:].split(",")) if m_text[2:] else ()
        phi = _parse_segments(phi_text[4:])
        if sigma == ():
            continue  # root is pre-seeded
        parent = cache._nodes.get(sigma[:-1])
        if parent is None:
            raise ValueError(f"{path}: record for {bits_text} appears before its parent")
        if not parent.phi.is_prefix_of(phi):
            raise ValueError(f"{path}: phi at {bits_text} does not extend its parent")
        block = FinSeq(phi.segments[len(parent.phi.segments):])
        cache._nodes[sigma] = Node(sigma, phi, caps, block)
    return cache
