"""Finite-sequence numerics: power sums, metrics, and certified comparison.

Sequences are finite lists of reals, identified with their zero-padded
infinite extensions whenever two sequences of different length meet in a
binary operation. A sequence is stored as a tuple of segments: explicit
float runs, or descriptor windows of the canonical generator
``x_n = scale * (n+1)**(-1/p_bottom)``. Window descriptors let the tree
construction carry blocks whose entry counts are far beyond anything that
can be materialized; their power sums are evaluated analytically (Hurwitz
zeta / digamma differences) once the window is too long for direct
summation.

Every strict inequality that matters downstream goes through
``certified_less`` with an explicit margin, so a float rounding step can
never silently flip a strictness claim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf

from .errors import PreconditionError, ResourceLimitError

# Windows at most this long are summed directly (fsum below FSUM_CUTOFF,
# vectorized beyond); longer windows go through the analytic path.
FSUM_CUTOFF = 4096
DIRECT_CUTOFF = 1 << 22
# Largest index whose float64 image is still exact; windows beyond this
# can never be materialized entry by entry.
MAX_EXACT_INDEX = 1 << 52
# Default cap on explicit materialization (entries).
MATERIALIZE_LIMIT = 1 << 26

DEFAULT_ETA = 2.0 ** -20


@dataclass(frozen=True)
class Margin:
    """Slack for strict inequalities under floating-point evaluation."""

    eta: float = DEFAULT_ETA

    def __post_init__(self):
        if not (self.eta >= 0.0 and math.isfinite(self.eta)):
            raise ValueError(f"margin eta must be finite and >= 0, got {self.eta!r}")


DEFAULT_MARGIN = Margin()


def certified_less(lhs, rhs, margin=DEFAULT_MARGIN):
    """True iff ``lhs + eta < rhs``: strictness that survives rounding noise."""
    return lhs + margin.eta < rhs


# ---------------------------------------------------------------------------
# Segments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    """An explicit run of float entries."""

    values: tuple

    @property
    def length(self):
        return len(self.values)


@dataclass(frozen=True)
class PowerWindow:
    """Entries ``scale * (n+1)**(-1/p_bottom)`` for n in [n_start, n_end]."""

    p_bottom: float
    n_start: int
    n_end: int
    scale: float = 1.0

    def __post_init__(self):
        if self.n_end < self.n_start or self.n_start < 0:
            raise ValueError(f"bad window range [{self.n_start}, {self.n_end}]")
        if not (self.p_bottom > 0 and self.scale >= 0):
            raise ValueError("window needs p_bottom > 0 and scale >= 0")

    @property
    def length(self):
        return self.n_end - self.n_start + 1

    def entry(self, t):
        n = self.n_start + t
        if n + 1 > MAX_EXACT_INDEX:
            raise ResourceLimitError(
                f"window index {n} exceeds exact float range; entries of this "
                "window exist only as a descriptor")
        return self.scale * (n + 1.0) ** (-1.0 / self.p_bottom)

    def max_entry(self):
        # entries are positive and decreasing in n
        return self.scale * (self.n_start + 1.0) ** (-1.0 / self.p_bottom)


def _segment_length(seg):
    return seg.length


# --- power sums -------------------------------------------------------------

# Window power sums repeat across every descendant node that re-verifies a
# cap, so they are memoized by (descriptor, exponent).
_WINDOW_SUM_CACHE = {}


def _window_power_sum(win, p):
    key = (win.p_bottom, win.n_start, win.n_end, win.scale, p)
    cached = _WINDOW_SUM_CACHE.get(key)
    if cached is not None:
        return cached
    c = p / win.p_bottom
    factor = win.scale ** p
    if factor == 0.0:
        return 0.0
    length = win.length
    if length <= DIRECT_CUTOFF and win.n_end + 2 <= MAX_EXACT_INDEX:
        if length <= FSUM_CUTOFF:
            s = math.fsum((n + 1.0) ** (-c) for n in range(win.n_start, win.n_end + 1))
        else:
            m = np.arange(win.n_start + 1, win.n_end + 2, dtype=np.float64)
            s = float(np.sum(m ** (-c)))
    else:
        s = _analytic_range_sum(c, win.n_start + 1, win.n_end + 1)
    out = factor * s
    _WINDOW_SUM_CACHE[key] = out
    return out


def _analytic_range_sum(c, a, b):
    """sum_{m=a}^{b} m**(-c) via Hurwitz zeta / harmonic differences.

    Valid for every c > 0 (for c < 1 the Hurwitz zeta terms are the
    analytic continuation; their difference still equals the finite sum).
    Working precision scales with the magnitude of the endpoints so that
    the cancellation between the two tails never eats the answer.
    """
    digits = int(math.log10(b + 2)) + 1
    dps = 40 + 2 * digits
    if c != 1.0 and abs(c - 1.0) < 1e-3:
        dps += int(-math.log10(abs(c - 1.0))) + 10
    with mp.workdps(dps):
        if c == 1.0:
            s = mp.harmonic(mpf(b)) - mp.harmonic(mpf(a - 1))
        else:
            s = mp.zeta(mpf(c), a) - mp.zeta(mpf(c), b + 1)
        return float(s)


def _generator_tail(c, n0):
    """sum_{n >= n0} (n+1)**(-c) for c > 1, i.e. zeta(c, n0+1)."""
    digits = int(math.log10(n0 + 2)) + 1
    with mp.workdps(40 + 2 * digits):
        return float(mp.zeta(mpf(c), n0 + 1))


# ---------------------------------------------------------------------------
# FinSeq
# ---------------------------------------------------------------------------

class FinSeq:
    """A finite sequence of reals, stored as a tuple of segments.

    Immutable by convention. ``length`` is an exact int and may exceed
    anything materializable; entry access and materialization guard against
    that explicitly instead of overflowing.
    """

    __slots__ = ("segments", "length")

    def __init__(self, segments=()):
        segs = tuple(s for s in segments if _segment_length(s) > 0)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "length", sum(_segment_length(s) for s in segs))

    def __setattr__(self, *a):
        raise AttributeError("FinSeq is immutable")

    # -- basic access --------------------------------------------------------

    def entry(self, i):
        if not (0 <= i < self.length):
            raise IndexError(f"index {i} out of range for length {self.length}")
        for seg in self.segments:
            n = _segment_length(seg)
            if i < n:
                if isinstance(seg, Literal):
                    return seg.values[i]
                return seg.entry(i)
            i -= n
        raise AssertionError("unreachable")

    def iter_entries(self, limit=MATERIALIZE_LIMIT):
        if self.length > limit:
            raise ResourceLimitError(
                f"refusing to enumerate {self.length} entries (limit {limit})")
        for seg in self.segments:
            if isinstance(seg, Literal):
                yield from seg.values
            else:
                for t in range(seg.length):
                    yield seg.entry(t)

    def materialize(self, limit=MATERIALIZE_LIMIT):
        return tuple(self.iter_entries(limit))

    def to_array(self, limit=MATERIALIZE_LIMIT):
        if self.length > limit:
            raise ResourceLimitError(
                f"refusing to materialize {self.length} entries (limit {limit})")
        parts = []
        for seg in self.segments:
            if isinstance(seg, Literal):
                parts.append(np.asarray(seg.values, dtype=np.float64))
            else:
                if seg.n_end + 1 > MAX_EXACT_INDEX:
                    raise ResourceLimitError(
                        "window indices exceed exact float range; cannot materialize")
                m = np.arange(seg.n_start + 1, seg.n_end + 2, dtype=np.float64)
                parts.append(seg.scale * m ** (-1.0 / seg.p_bottom))
        if not parts:
            return np.zeros(0, dtype=np.float64)
        return np.concatenate(parts)

    # -- structural comparison -----------------------------------------------

    def _runs(self):
        return list(self.segments)

    def is_prefix_of(self, other, proper=False):
        """Entrywise initial-segment test, done on segment structure.

        Window runs are split at boundaries; a window piece equals a literal
        piece only if the (bounded) entrywise comparison says so.
        """
        if self.length > other.length:
            return False
        if proper and self.length == other.length:
            return False
        need = self.length
        mine = self._runs()
        theirs = other._runs()
        i = j = 0
        off_i = off_j = 0  # consumed entries inside current run
        while need > 0:
            a, b = mine[i], theirs[j]
            take = min(_segment_length(a) - off_i, _segment_length(b) - off_j, need)
            if not _pieces_equal(a, off_i, b, off_j, take):
                return False
            need -= take
            off_i += take
            off_j += take
            if off_i == _segment_length(a):
                i += 1
                off_i = 0
            if off_j == _segment_length(b):
                j += 1
                off_j = 0
        return True

    def __eq__(self, other):
        if not isinstance(other, FinSeq):
            return NotImplemented
        return self.length == other.length and self.is_prefix_of(other)

    # equality is entrywise (a window can equal a literal run), so there is
    # no cheap hash consistent with it
    __hash__ = None

    def __repr__(self):
        if self.length <= 8:
            return f"FinSeq({self.materialize()!r})"
        return f"FinSeq(<{self.length} entries, {len(self.segments)} segments>)"


def _pieces_equal(a, off_a, b, off_b, count):
    if isinstance(a, Literal) and isinstance(b, Literal):
        return a.values[off_a:off_a + count] == b.values[off_b:off_b + count]
    if isinstance(a, PowerWindow) and isinstance(b, PowerWindow):
        return (a.p_bottom == b.p_bottom and a.scale == b.scale
                and a.n_start + off_a == b.n_start + off_b)
    # mixed literal/window: compare entries, bounded
    if count > FSUM_CUTOFF:
        return False
    get_a = (lambda t: a.values[off_a + t]) if isinstance(a, Literal) else (lambda t: a.entry(off_a + t))
    get_b = (lambda t: b.values[off_b + t]) if isinstance(b, Literal) else (lambda t: b.entry(off_b + t))
    return all(get_a(t) == get_b(t) for t in range(count))


EMPTY = FinSeq(())


def finseq(values):
    """Build an explicit FinSeq from an iterable of reals, validating finiteness."""
    vals = tuple(float(v) for v in values)
    for v in vals:
        if not math.isfinite(v):
            raise ValueError(f"non-finite entry {v!r} in sequence")
    if not vals:
        return EMPTY
    return FinSeq((Literal(vals),))


def as_finseq(x):
    if isinstance(x, FinSeq):
        return x
    return finseq(x)


def window_seq(p_bottom, n_start, n_end, scale=1.0):
    """A FinSeq consisting of one generator window."""
    return FinSeq((PowerWindow(p_bottom, n_start, n_end, scale),))


# ---------------------------------------------------------------------------
# Exponent ladders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpLadder:
    """A strictly decreasing exponent sequence p_0 > p_1 > ... with limit a.

    The default rule is ``p_i = a + (q - a) * 2**-(i+1)``, so p_0 = (a+q)/2.
    An ``explicit`` prefix may override the first entries; past the prefix
    the geometric descent continues from the last explicit value.
    """

    a: float
    q: float
    explicit: tuple = ()

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.q)):
            raise ValueError("a and q must be finite")
        if not (0.0 <= self.a < self.q):
            raise ValueError(f"need 0 <= a < q, got a={self.a}, q={self.q}")
        object.__setattr__(self, "explicit", tuple(float(p) for p in self.explicit))
        prev = self.q
        for p in self.explicit:
            if not (self.a < p < prev):
                raise ValueError(
                    f"explicit ladder must decrease strictly inside ({self.a}, {self.q}): {self.explicit}")
            prev = p

    def exponent(self, i):
        if i < 0:
            raise ValueError("ladder index must be >= 0")
        k = len(self.explicit)
        if i < k:
            return self.explicit[i]
        if k:
            return self.a + (self.explicit[-1] - self.a) * 2.0 ** -(i - k + 1)
        return self.a + (self.q - self.a) * 2.0 ** -(i + 1)

    def exponents(self, count):
        return tuple(self.exponent(i) for i in range(count))


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def pnorm_pow(x, p):
    """sum_n |x(n)|**p, the p-th power sum of the zero-padded sequence.

    This is the workhorse quantity: for p >= 1 it is the p-th power of the
    p-norm, for 0 < p < 1 it is the translation-invariant metric distance
    to zero.
    """
    if not (isinstance(p, (int, float)) and math.isfinite(p) and p > 0):
        raise ValueError(f"exponent must be a finite positive real, got {p!r}")
    x = as_finseq(x)
    parts = []
    for seg in x.segments:
        if isinstance(seg, Literal):
            parts.append(math.fsum(abs(v) ** p for v in seg.values))
        else:
            parts.append(_window_power_sum(seg, p))
    return math.fsum(parts)


def concat(u, v):
    """u followed by v; power sums are additive across the join."""
    u = as_finseq(u)
    v = as_finseq(v)
    return FinSeq(u.segments + v.segments)


def scale(x, c):
    """Entrywise scaling by c >= 0."""
    c = float(c)
    if not (math.isfinite(c) and c >= 0):
        raise ValueError(f"scale factor must be finite and >= 0, got {c!r}")
    x = as_finseq(x)
    segs = []
    for seg in x.segments:
        if isinstance(seg, Literal):
            segs.append(Literal(tuple(c * v for v in seg.values)))
        else:
            segs.append(PowerWindow(seg.p_bottom, seg.n_start, seg.n_end, seg.scale * c))
    return FinSeq(tuple(segs))


def _padded_arrays(x, y, limit=MATERIALIZE_LIMIT):
    ax = as_finseq(x).to_array(limit)
    ay = as_finseq(y).to_array(limit)
    n = max(len(ax), len(ay))
    if len(ax) < n:
        ax = np.concatenate([ax, np.zeros(n - len(ax))])
    if len(ay) < n:
        ay = np.concatenate([ay, np.zeros(n - len(ay))])
    return ax, ay


def difference(x, y):
    """The explicit zero-padded difference x - y as a FinSeq."""
    ax, ay = _padded_arrays(x, y)
    return finseq(ax - ay)


def dp_metric(x, y, p):
    """The metric sum_n |x_n - y_n|**p for 0 < p < 1 (zero-padded)."""
    if not (0 < p < 1):
        raise ValueError(f"dp_metric needs 0 < p < 1 (got p={p!r}); use norms for p >= 1")
    ax, ay = _padded_arrays(x, y)
    return math.fsum(abs(float(d)) ** p for d in ax - ay)


def sup_norm(x):
    """max_n |x(n)|, 0 for the empty sequence. Never materializes windows."""
    x = as_finseq(x)
    best = 0.0
    for seg in x.segments:
        if isinstance(seg, Literal):
            m = max((abs(v) for v in seg.values), default=0.0)
        else:
            m = seg.max_entry()
        if m > best:
            best = m
    return best


def frechet_metric(x, y, ladder, terms):
    """Truncated product-style metric for the exponent family of ``ladder``.

    Returns ``(value, tail_bound)`` where value is
    ``sum_{i<terms} 2**-(i+1) * t_i / (1 + t_i)`` with t_i the p_i-norm of
    the difference when the base exponent is >= 1, and the p_i power-sum
    distance when it is < 1. Each summand is below 2**-(i+1), so the
    remaining tail is certified below 2**-terms.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    b = ladder.a
    if b < 1 and not ladder.exponent(0) < 1:
        raise PreconditionError(
            f"base {b} < 1 requires a ladder with p_0 < 1, got p_0={ladder.exponent(0)}")
    ax, ay = _padded_arrays(x, y)
    diff = np.abs(ax - ay)
    vals = []
    for i in range(terms):
        p = ladder.exponent(i)
        t = math.fsum(float(d) ** p for d in diff)
        if b >= 1:
            t = t ** (1.0 / p)
        vals.append(2.0 ** -(i + 1) * t / (1.0 + t))
    return math.fsum(vals), 2.0 ** -terms
