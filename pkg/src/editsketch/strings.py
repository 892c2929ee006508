"""Core string machinery: fragments, alignments, edit distance, edit information,
self-edit distance, and periodicity utilities.

Strings are 1-D int32 numpy arrays of symbol codes. Public functions accept
``str``/``bytes``/sequences and coerce, so tests can say ``edit_distance("ab", "ba")``.

An alignment is a monotone lattice path ``(x_i, y_i)`` from the source
fragment's span onto the target fragment's span; steps are (+1,+1) align,
(+1,0) delete, (0,+1) insert. Cost counts insertions, deletions, and
substitutions (an align step on unequal symbols).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import ceil

import numpy as np

from .errors import (
    CompositionMismatchError,
    InvalidPeriodError,
    InvariantViolationError,
    MalformedEditInfoError,
)

Symbols = np.ndarray

# step kinds
MATCH, SUB, DEL, INS = "match", "sub", "del", "ins"


def as_symbols(x) -> Symbols:
    """Coerce str/bytes/sequence/ndarray to an int32 code array."""
    if isinstance(x, np.ndarray):
        return x.astype(np.int32, copy=False)
    if isinstance(x, str):
        return np.array([ord(c) for c in x], dtype=np.int32)
    if isinstance(x, (bytes, bytearray)):
        return np.frombuffer(bytes(x), dtype=np.uint8).astype(np.int32)
    return np.array(list(x), dtype=np.int32)


@dataclass(frozen=True)
class Alphabet:
    """Per-instance alphabet: sorted raw byte values; codes index into the table."""

    table: bytes

    def __post_init__(self) -> None:
        if list(self.table) != sorted(set(self.table)):
            raise ValueError("alphabet table must be strictly increasing")

    @property
    def size(self) -> int:
        return len(self.table)

    @classmethod
    def from_instance(cls, *chunks: bytes) -> "Alphabet":
        present = set()
        for chunk in chunks:
            present.update(chunk)
        return cls(bytes(sorted(present)))

    def encode(self, data: bytes) -> Symbols:
        lut = {b: i for i, b in enumerate(self.table)}
        return np.array([lut[b] for b in data], dtype=np.int32)

    def decode(self, codes) -> bytes:
        return bytes(self.table[int(c)] for c in codes)


@dataclass(frozen=True, eq=False)
class Fragment:
    """Half-open fragment seq[start:end]; the underlying array is part of the value."""

    seq: Symbols
    start: int
    end: int

    def __post_init__(self) -> None:
        if not (0 <= self.start <= self.end <= len(self.seq)):
            raise ValueError("fragment bounds out of range")

    def __len__(self) -> int:
        return self.end - self.start

    @property
    def chars(self) -> Symbols:
        return self.seq[self.start:self.end]

    def sub(self, start: int, end: int) -> "Fragment":
        return Fragment(self.seq, start, end)


def whole(x) -> Fragment:
    arr = as_symbols(x)
    return Fragment(arr, 0, len(arr))


def _frag(x) -> Fragment:
    return x if isinstance(x, Fragment) else whole(x)


@dataclass(frozen=True, eq=False)
class AlignmentPath:
    """Monotone lattice path aligning ``source`` onto ``target``."""

    source: Fragment
    target: Fragment
    pairs: tuple

    @cached_property
    def cost(self) -> int:
        return sum(1 for _ in self.edit_steps())

    def steps(self):
        """Yields (kind, x, y) per step; x/y are the positions consumed."""
        ps = self.pairs
        src, tgt = self.source.seq, self.target.seq
        for (x0, y0), (x1, y1) in zip(ps, ps[1:]):
            if x1 == x0 + 1 and y1 == y0 + 1:
                yield (MATCH if src[x0] == tgt[y0] else SUB, x0, y0)
            elif x1 == x0 + 1:
                yield (DEL, x0, y0)
            else:
                yield (INS, x0, y0)

    def edit_steps(self):
        for step in self.steps():
            if step[0] != MATCH:
                yield step

    @cached_property
    def edit_step_indices(self) -> frozenset:
        return frozenset(i for i, s in enumerate(self.steps()) if s[0] != MATCH)

    def validate(self) -> None:
        ps = self.pairs
        if ps[0] != (self.source.start, self.target.start):
            raise InvariantViolationError("path does not start at the fragment origins")
        if ps[-1] != (self.source.end, self.target.end):
            raise InvariantViolationError("path does not end at the fragment ends")
        for (x0, y0), (x1, y1) in zip(ps, ps[1:]):
            if (x1 - x0, y1 - y0) not in ((1, 1), (1, 0), (0, 1)):
                raise InvariantViolationError(f"illegal step {(x0, y0)} -> {(x1, y1)}")
        # drift bound: length difference never exceeds cost
        dx = len(self.source)
        dy = len(self.target)
        if abs(dy - dx) > self.cost:
            raise InvariantViolationError("drift bound violated")

    def prefix_costs(self) -> list:
        """prefix_costs()[i] = edits among the first i steps; O(1) restriction costs."""
        acc = [0]
        for step in self.steps():
            acc.append(acc[-1] + (step[0] != MATCH))
        return acc


def _dp_matrix(x: Symbols, y: Symbols) -> np.ndarray:
    """Full (|x|+1) x (|y|+1) edit-distance table, rows built with vector ops."""
    m, n = len(x), len(y)
    col = np.arange(n + 1, dtype=np.int32)
    D = np.empty((m + 1, n + 1), dtype=np.int32)
    D[0] = col
    for i in range(1, m + 1):
        prev = D[i - 1]
        cand = np.empty(n + 1, dtype=np.int32)
        cand[0] = i
        if n:
            np.minimum(prev[1:] + 1, prev[:-1] + (y != x[i - 1]), out=cand[1:])
        t = cand - col
        np.minimum.accumulate(t, out=t)
        D[i] = t + col
    return D


def _suffix_dp_matrix(x: Symbols, y: Symbols) -> np.ndarray:
    """R[i][j] = edit distance of x[i:] vs y[j:]."""
    m, n = len(x), len(y)
    col = np.arange(n + 1, dtype=np.int32)
    R = np.empty((m + 1, n + 1), dtype=np.int32)
    R[m] = n - col
    for i in range(m - 1, -1, -1):
        nxt = R[i + 1]
        cand = np.empty(n + 1, dtype=np.int32)
        cand[n] = m - i
        if n:
            np.minimum(nxt[:-1] + 1, nxt[1:] + (y != x[i]), out=cand[:-1])
        t = cand + col
        np.minimum.accumulate(t[::-1], out=t[::-1])
        R[i] = t - col
    return R


def _backtrace(D: np.ndarray, x: Symbols, y: Symbols) -> list:
    """One optimal path, preferring align over delete over insert (applied from the end)."""
    i, j = len(x), len(y)
    rev = [(i, j)]
    while i or j:
        here = D[i, j]
        if i and j and D[i - 1, j - 1] + (1 if x[i - 1] != y[j - 1] else 0) == here:
            i, j = i - 1, j - 1
        elif i and D[i - 1, j] + 1 == here:
            i -= 1
        else:
            j -= 1
        rev.append((i, j))
    rev.reverse()
    return rev


def edit_distance(x, y) -> tuple:
    """Edit (Levenshtein) distance plus one optimal alignment path.

    Tie-break: the backtrace prefers align over delete over insert, making the
    returned path deterministic.
    """
    fx, fy = _frag(x), _frag(y)
    cx, cy = fx.chars, fy.chars
    D = _dp_matrix(cx, cy)
    local = _backtrace(D, cx, cy)
    pairs = tuple((i + fx.start, j + fy.start) for i, j in local)
    path = AlignmentPath(fx, fy, pairs)
    return int(D[len(cx), len(cy)]), path


def _optimal_paths_local(x: Symbols, y: Symbols, R: np.ndarray, cap: int, j0: int = 0) -> list:
    """All optimal paths from (0, j0) to (|x|, |y|) in lexicographic pair order,
    truncated at cap. R is the suffix-cost table for (x, y)."""
    m, n = len(x), len(y)
    total = int(R[0, j0])
    results = []

    def successors(i, j, g):
        out = []
        if j < n and g + 1 + R[i, j + 1] == total:
            out.append((i, j + 1, g + 1))
        if i < m and g + 1 + R[i + 1, j] == total:
            out.append((i + 1, j, g + 1))
        if i < m and j < n:
            c = 1 if x[i] != y[j] else 0
            if g + c + R[i + 1, j + 1] == total:
                out.append((i + 1, j + 1, g + c))
        return out

    if (m, n) == (0, j0):
        return [((0, j0),)]
    path = [(0, j0)]
    stack = [iter(successors(0, j0, 0))]
    while stack and len(results) < cap:
        step = next(stack[-1], None)
        if step is None:
            stack.pop()
            path.pop()
            continue
        i, j, g = step
        path.append((i, j))
        if (i, j) == (m, n):
            results.append(tuple(path))
            path.pop()
        else:
            stack.append(iter(successors(i, j, g)))
    return results


def enumerate_optimal_alignments(x, y, cap: int) -> tuple:
    """All optimal alignments in lexicographic order of their pair sequences,
    truncated at cap. Returns (paths, truncated)."""
    if cap < 1:
        raise ValueError("cap must be positive")
    fx, fy = _frag(x), _frag(y)
    cx, cy = fx.chars, fy.chars
    R = _suffix_dp_matrix(cx, cy)
    locals_ = _optimal_paths_local(cx, cy, R, cap + 1)
    truncated = len(locals_) > cap
    paths = [
        AlignmentPath(fx, fy, tuple((i + fx.start, j + fy.start) for i, j in local))
        for local in locals_[:cap]
    ]
    return paths, truncated


def edit_info(path: AlignmentPath) -> tuple:
    """Ordered 4-tuples (x, cx, y, cy) for the non-match steps; None stands for the
    empty side of an insertion/deletion."""
    src, tgt = path.source.seq, path.target.seq
    out = []
    for kind, x, y in path.edit_steps():
        if kind == DEL:
            out.append((x, int(src[x]), y, None))
        elif kind == INS:
            out.append((x, None, y, int(tgt[y])))
        else:
            out.append((x, int(src[x]), y, int(tgt[y])))
    return tuple(out)


def reconstruct_target(source, info, x_start: int, x_end: int, y_start: int, y_end: int) -> Symbols:
    """Inverse of edit_info given the source characters: rebuilds Y[y_start:y_end).

    Raises MalformedEditInfoError when the tuples are inconsistent with the
    endpoints (out of range, order violation, or gap mismatch).
    """
    src = as_symbols(source)
    out = []
    x, y = x_start, y_start
    for tup in info:
        if len(tup) != 4:
            raise MalformedEditInfoError("edit tuple must have four entries")
        tx, cx, ty, cy = tup
        if tx < x or ty < y or tx - x != ty - y:
            raise MalformedEditInfoError(f"tuple {tup} breaks the match-gap structure")
        while x < tx:
            if x >= x_end or x >= len(src):
                raise MalformedEditInfoError("match run exceeds the source span")
            out.append(int(src[x]))
            x += 1
            y += 1
        if cx is None and cy is None:
            raise MalformedEditInfoError("empty-empty tuple")
        if cx is not None and cy is not None and cx == cy:
            raise MalformedEditInfoError("substitution of identical symbols")
        if cx is not None:
            if x >= x_end or x >= len(src) or int(src[x]) != cx:
                raise MalformedEditInfoError("source character mismatch")
            x += 1
        if cy is not None:
            out.append(int(cy))
            y += 1
    if x_end - x != y_end - y or x_end < x:
        raise MalformedEditInfoError("trailing match run inconsistent with endpoints")
    while x < x_end:
        if x >= len(src):
            raise MalformedEditInfoError("trailing run exceeds the source")
        out.append(int(src[x]))
        x += 1
        y += 1
    return np.array(out, dtype=np.int32)


def restrict_alignment(path: AlignmentPath, start: int, end: int) -> tuple:
    """Restriction of the path to source positions [start, end).

    The image follows the min-convention: its left end is the least y paired
    with ``start``; its right end is the least y paired with ``end`` unless
    ``end`` is the source's end, in which case it is the target's end.
    Returns (subpath, image fragment).
    """
    if not (path.source.start <= start <= end <= path.source.end):
        raise ValueError("restriction outside the source span")
    ps = path.pairs
    i0 = next(i for i, (x, _) in enumerate(ps) if x == start)
    if end == path.source.end:
        i1 = len(ps) - 1
    else:
        i1 = next(i for i, (x, _) in enumerate(ps) if x == end)
    sub = ps[i0:i1 + 1]
    image = Fragment(path.target.seq, sub[0][1], sub[-1][1])
    return AlignmentPath(path.source.sub(start, end), image, sub), image


def invert_alignment(path: AlignmentPath) -> AlignmentPath:
    return AlignmentPath(path.target, path.source, tuple((y, x) for x, y in path.pairs))


def compose_alignments(a: AlignmentPath, b: AlignmentPath) -> AlignmentPath:
    """Product alignment of a: X->Y and b: Y->Z; every pair factors through Y."""
    if (a.target.start, a.target.end) != (b.source.start, b.source.end):
        raise CompositionMismatchError("middle fragments differ")
    if a.target.seq is not b.source.seq and not np.array_equal(a.target.seq, b.source.seq):
        raise CompositionMismatchError("middle strings differ")
    pa, pb = a.pairs, b.pairs
    i = j = 0
    x, z = pa[0][0], pb[0][1]
    pairs = [(x, z)]
    while i < len(pa) - 1 or j < len(pb) - 1:
        if i < len(pa) - 1 and pa[i + 1][1] == pa[i][1]:
            i += 1
            x += 1  # a deletes: no y movement
            pairs.append((x, z))
        elif j < len(pb) - 1 and pb[j + 1][0] == pb[j][0]:
            j += 1
            z += 1  # b inserts: no y movement
            pairs.append((x, z))
        else:
            # both advance through the same y position
            dx = pa[i + 1][0] - pa[i][0]
            dz = pb[j + 1][1] - pb[j][1]
            i += 1
            j += 1
            if dx or dz:
                x += dx
                z += dz
                pairs.append((x, z))
    return AlignmentPath(a.source, b.target, tuple(pairs))


def shift_target(path: AlignmentPath, delta: int) -> AlignmentPath:
    """Re-anchors the target span by delta within the same underlying string.
    Valid only when the shifted span holds identical characters (periodic case)."""
    tgt = path.target
    moved = Fragment(tgt.seq, tgt.start + delta, tgt.end + delta)
    if not np.array_equal(tgt.chars, moved.chars):
        raise InvariantViolationError("shift target does not preserve characters")
    return AlignmentPath(path.source, moved, tuple((x, y + delta) for x, y in path.pairs))


# ---------------------------------------------------------------------------
# self-edit distance


def _selfed_rows(x: Symbols, limit=None):
    """Row generator for the constrained DP (no align step departs (i, i))."""
    n = len(x)
    col = np.arange(n + 1, dtype=np.int32)
    big = np.int32(4 * n + 8)
    row = col.copy()
    yield row
    for i in range(1, n + 1):
        prev = row
        cand = np.empty(n + 1, dtype=np.int32)
        cand[0] = i
        if n:
            diag = prev[:-1] + (x != x[i - 1])
            diag[i - 1] = big  # aligning x[i-1] to itself is forbidden
            np.minimum(prev[1:] + 1, diag, out=cand[1:])
        t = cand - col
        np.minimum.accumulate(t, out=t)
        row = t + col
        if limit is not None and row.min() > limit:
            yield None
            return
        yield row


def selfed(x) -> int:
    """Self-edit distance: minimum cost of an alignment of x onto itself that
    aligns no character to itself."""
    arr = _frag(x).chars
    row = None
    for row in _selfed_rows(arr):
        pass
    return int(row[len(arr)])


def selfed_bounded(x, limit: int):
    """selfed(x) if it is <= limit, else None; abandons early."""
    arr = _frag(x).chars
    last = None
    for last in _selfed_rows(arr, limit=limit):
        if last is None:
            return None
    v = int(last[len(arr)])
    return v if v <= limit else None


def selfed_prefix_values(x, limit: int) -> np.ndarray:
    """vals[l] = selfed(x[:l]) for every prefix, clamped to limit+1 beyond the
    early-abandon horizon. One DP serves all prefixes because cell (l, l)
    depends only on the l x l sub-grid; row minima are non-decreasing, so once
    a row exceeds the limit every longer prefix does too."""
    arr = _frag(x).chars
    n = len(arr)
    vals = np.full(n + 1, limit + 1, dtype=np.int64)
    for i, row in enumerate(_selfed_rows(arr, limit=limit)):
        if row is None:
            break
        vals[i] = min(int(row[i]), limit + 1)
    return vals


def self_edit_distance(x) -> tuple:
    """(selfed(x), optimal self-alignment) with every pair normalized to x >= y,
    so matched runs copy strictly from the left."""
    frag = _frag(x)
    arr = frag.chars
    n = len(arr)
    D = np.empty((n + 1, n + 1), dtype=np.int32)
    for i, row in enumerate(_selfed_rows(arr)):
        D[i] = row
    big = 4 * n + 8
    i = j = n
    rev = [(n, n)]
    while i or j:
        here = D[i, j]
        if i and j and i != j and D[i - 1, j - 1] + (1 if arr[i - 1] != arr[j - 1] else 0) == here \
                and D[i - 1, j - 1] < big:
            i, j = i - 1, j - 1
        elif i and D[i - 1, j] + 1 == here:
            i -= 1
        else:
            j -= 1
        rev.append((i, j))
    rev.reverse()
    pairs = tuple((max(a, b) + frag.start, min(a, b) + frag.start) for a, b in rev)
    path = AlignmentPath(frag, frag, pairs)
    return int(D[n, n]), path


def lz_phrases(path: AlignmentPath) -> list:
    """Left-copy factorization of the self-alignment's source span.

    Returns phrases in source order: ("lit", char) for deleted/substituted
    positions, ("copy", delta, length) for maximal matched runs, where the copy
    source starts delta positions to the left (delta >= 1, overlap allowed).
    """
    phrases = []
    run = None  # (x0, y0, len)
    for kind, x, y in path.steps():
        if kind == MATCH:
            if run is not None and run[0] + run[2] == x and run[1] + run[2] == y:
                run = (run[0], run[1], run[2] + 1)
            else:
                if run is not None:
                    phrases.append(("copy", run[0] - run[1], run[2]))
                run = (x, y, 1)
        else:
            if run is not None:
                phrases.append(("copy", run[0] - run[1], run[2]))
                run = None
            if kind != INS:
                phrases.append(("lit", int(path.source.seq[x])))
    if run is not None:
        phrases.append(("copy", run[0] - run[1], run[2]))
    return phrases


def apply_lz_phrases(phrases, length: int) -> Symbols:
    """Replays a left-copy factorization; rejects forward or out-of-range copies."""
    out = np.empty(length, dtype=np.int32)
    pos = 0
    for phrase in phrases:
        if phrase[0] == "lit":
            if pos >= length:
                raise MalformedEditInfoError("literal beyond the declared length")
            out[pos] = phrase[1]
            pos += 1
        else:
            _, delta, plen = phrase
            if delta < 1 or plen < 1 or pos - delta < 0 or pos + plen > length:
                raise MalformedEditInfoError("copy phrase out of range")
            for t in range(plen):
                out[pos + t] = out[pos + t - delta]
            pos += plen
    if pos != length:
        raise MalformedEditInfoError("factorization does not cover the span")
    return out


# ---------------------------------------------------------------------------
# distances to periodic extensions


def _require_period(q) -> Symbols:
    arr = _frag(q).chars
    if len(arr) == 0:
        raise InvalidPeriodError("period string must be non-empty")
    return arr


def _tiled(q: Symbols, length: int) -> Symbols:
    reps = ceil(max(length, 1) / len(q))
    return np.tile(q, reps)[:length]


def edp(s, q) -> int:
    """min over j of the edit distance between s and Q^inf[0:j)."""
    return edp_with_length(s, q)[0]


def edp_with_length(s, q) -> tuple:
    """(edp(s, q), smallest prefix length attaining it). Prefixes longer than
    2|s| only lose, so the search window is bounded."""
    arr = _frag(s).chars
    qa = _require_period(q)
    window = 2 * len(arr) + 1
    row = _dp_matrix(arr, _tiled(qa, window))[len(arr)]
    j = int(np.argmin(row))
    return int(row[j]), j


def edl(s, q) -> int:
    """min over i <= j of the edit distance between s and Q^inf[i:j)."""
    arr = _frag(s).chars
    qa = _require_period(q)
    window = 2 * len(arr) + 1
    tape = _tiled(qa, len(qa) + window)
    best = len(arr)
    for i in range(len(qa)):
        row = _dp_matrix(arr, tape[i:i + window])[len(arr)]
        best = min(best, int(row.min()))
    return best


def eds(s, q) -> int:
    """min over i <= j*|q| of the edit distance between s and Q^inf[i:j*|q|)."""
    arr = _frag(s).chars
    qa = _require_period(q)
    window = 2 * len(arr) + len(qa) + 1
    tape = _tiled(qa, len(qa) + window)
    best = len(arr)
    for i in range(len(qa)):
        row = _dp_matrix(arr, tape[i:i + window])[len(arr)]
        # admissible ends: absolute positions i + off divisible by |q|
        first = (-i) % len(qa)
        ends = np.arange(first, len(row), len(qa))
        best = min(best, int(row[ends].min()))
    return best


def period(x) -> int:
    """Smallest p with x[i] == x[i+p] for all valid i."""
    arr = _frag(x).chars
    n = len(arr)
    if n == 0:
        raise ValueError("period of the empty string is undefined")
    fail = [0] * (n + 1)
    k = 0
    for i in range(1, n):
        while k and arr[i] != arr[k]:
            k = fail[k]
        if arr[i] == arr[k]:
            k += 1
        fail[i + 1] = k
    return n - fail[n]


def is_primitive(x) -> bool:
    """True iff x is not a non-trivial power of a shorter string."""
    arr = _frag(x).chars
    p = period(arr)
    n = len(arr)
    return not (p < n and n % p == 0)


def exact_occurrences(pat, txt) -> list:
    """Starting positions of exact occurrences (brute scan; test-scale helper)."""
    p = _frag(pat).chars
    t = _frag(txt).chars
    m, n = len(p), len(t)
    if m == 0:
        return list(range(n + 1))
    out = []
    for i in range(n - m + 1):
        if np.array_equal(t[i:i + m], p):
            out.append(i)
    return out
