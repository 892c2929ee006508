"""Ground-truth discovery of k-error occurrences with their optimal edit information.

The distance pass is a banded DP (band 2k+1) vectorized across every start
position at once; path enumeration then runs per fragment against a full
suffix-cost table shared by all occurrences with the same right endpoint. The
agreement of the two tables is asserted for every reported fragment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolationError
from .strings import _frag, _suffix_dp_matrix, as_symbols


@dataclass(frozen=True)
class Occurrence:
    """One fragment T[start:end) with distance <= k and its optimal edit infos."""

    start: int
    end: int
    dist: int
    edit_infos: tuple
    truncated: bool


@dataclass(frozen=True)
class OccurrenceReport:
    occurrences: tuple

    def __iter__(self):
        return iter(self.occurrences)

    def __len__(self):
        return len(self.occurrences)

    @property
    def start_set(self) -> tuple:
        return tuple(sorted({o.start for o in self.occurrences}))

    def spans(self) -> list:
        return [(o.start, o.end, o.dist) for o in self.occurrences]


def occurrence_spans(pattern, text, k: int) -> list:
    """All (start, end, dist) with edit distance dist <= k, distances only.

    Banded DP over offsets d = i - j + kb, vectorized over every start at
    once; kb clamps k at m + n since no distance can exceed that. Cells beyond
    a start's text suffix run against sentinel characters: since i never
    decreases along a path they cannot feed an in-range cell, so they are
    filtered only at the end.
    """
    p = _frag(pattern).chars
    t = _frag(text).chars
    m, n = len(p), len(t)
    kb = min(k, m + n)
    width = 2 * kb + 1
    inf = np.int32(kb + 1)
    dcol = np.arange(width, dtype=np.int32)[None, :]

    # gather[s, c] = t[s + c - kb], sentinel -1 outside the text
    padded = np.full(n + m + 2 * kb, -1, dtype=np.int32)
    padded[kb:kb + n] = t
    if m:
        gather = np.lib.stride_tricks.sliding_window_view(padded, m + 2 * kb)[:n + 1]

    row = np.empty((n + 1, width), dtype=np.int32)
    row[:] = np.where(dcol - kb >= 0, dcol - kb, inf)
    mismatch = np.empty((n + 1, width), dtype=bool)
    for j in range(1, m + 1):
        # diag from (j-1, i-1): same offset, char at text index s + j - 1 + d - kb
        np.not_equal(gather[:, j - 1:j - 1 + width], p[j - 1], out=mismatch)
        diag = row + mismatch
        # deletion from (j-1, i): offset shifts down by one
        np.minimum(diag[:, :-1], row[:, 1:] + 1, out=diag[:, :-1])
        # insertion closure within the row: running minimum of (cand - d) + d
        diag -= dcol
        np.minimum.accumulate(diag, axis=1, out=diag)
        diag += dcol
        row = diag

    limit = min(k, kb)
    hit_s, hit_d = np.nonzero(row <= limit)
    out = []
    for s, d in zip(hit_s.tolist(), hit_d.tolist()):
        i = m + d - kb
        if 0 <= i <= n - s:
            out.append((s, s + i, int(row[s, d])))
    out.sort()
    return out


def free_start_min_dists(pattern, text) -> np.ndarray:
    """row[e] = min over s of the edit distance between P and T[s:e); O(nm)."""
    p = _frag(pattern).chars
    t = _frag(text).chars
    n = len(t)
    row = np.zeros(n + 1, dtype=np.int32)
    col = np.arange(n + 1, dtype=np.int32)
    for j in range(1, len(p) + 1):
        cand = np.empty(n + 1, dtype=np.int32)
        cand[0] = j
        if n:
            np.minimum(row[1:] + 1, row[:-1] + (t != p[j - 1]), out=cand[1:])
        acc = cand - col
        np.minimum.accumulate(acc, out=acc)
        row = acc + col
    return row


def _enumerate_infos(p_list, w_list, suffix_rows, j0: int, p_lo: int, cap: int) -> list:
    """Edit infos of all optimal alignments from (0, j0) to the grid corner, in
    lexicographic order of the underlying pair sequences (insert < delete <
    align at every divergence), truncated at cap. Builds the info tuples during
    the DFS itself; text positions are absolute via p_lo. Every explored node
    lies on an optimal path, so the walk is output-sensitive."""
    m = len(p_list)
    n = len(w_list)
    total = suffix_rows[0][j0]
    if m == 0 and n == j0:
        return [()]
    results: list = []
    ops: list = []
    # explicit frames: position, cost so far, next move to try, op pushed on entry
    fi, fj, fg = [0], [j0], [0]
    fphase, fpushed = [0], [False]
    while fi and len(results) < cap:
        phase = fphase[-1]
        if phase == 3:
            fi.pop(); fj.pop(); fg.pop(); fphase.pop()
            if fpushed.pop():
                ops.pop()
            continue
        fphase[-1] = phase + 1
        i = fi[-1]; j = fj[-1]; g = fg[-1]
        if phase == 0:  # insert
            if j >= n or g + 1 + suffix_rows[i][j + 1] != total:
                continue
            op = (i, None, p_lo + j, w_list[j])
            i2, j2, g2 = i, j + 1, g + 1
        elif phase == 1:  # delete
            if i >= m or g + 1 + suffix_rows[i + 1][j] != total:
                continue
            op = (i, p_list[i], p_lo + j, None)
            i2, j2, g2 = i + 1, j, g + 1
        else:  # align
            if i >= m or j >= n:
                continue
            if p_list[i] != w_list[j]:
                if g + 1 + suffix_rows[i + 1][j + 1] != total:
                    continue
                op = (i, p_list[i], p_lo + j, w_list[j])
                g2 = g + 1
            else:
                if g + suffix_rows[i + 1][j + 1] != total:
                    continue
                op = None
                g2 = g
            i2, j2 = i + 1, j + 1
        if op is not None:
            ops.append(op)
        if i2 == m and j2 == n:
            results.append(tuple(ops))
            if op is not None:
                ops.pop()
        else:
            fi.append(i2); fj.append(j2); fg.append(g2)
            fphase.append(0); fpushed.append(op is not None)
    return results


def find_occurrences(pattern, text, k: int, cap: int = 64) -> OccurrenceReport:
    """Every fragment with distance <= k, each with all optimal edit infos in
    lexicographic path order, truncated at cap (recorded, never silent)."""
    if cap < 1:
        raise ValueError("cap must be positive")
    pf = _frag(pattern)
    tf = _frag(text)
    p, t = pf.chars, tf.chars
    m = len(p)
    kb = min(k, m + len(t))
    spans = occurrence_spans(p, t, k)
    p_list = p.tolist()
    t_list = t.tolist()

    by_end: dict = {}
    for s, e, d in spans:
        by_end.setdefault(e, []).append((s, d))

    occurrences = []
    for end in sorted(by_end):
        p_lo = max(0, end - m - kb)
        window = t[p_lo:end]
        suffix = _suffix_dp_matrix(p, window)
        suffix_rows = suffix.tolist()
        w_list = t_list[p_lo:end]
        for s, d in by_end[end]:
            j0 = s - p_lo
            if suffix_rows[0][j0] != d:
                raise InvariantViolationError(
                    f"banded distance {d} disagrees with the full table at ({s}, {end})")
            infos = _enumerate_infos(p_list, w_list, suffix_rows, j0, p_lo, cap + 1)
            truncated = len(infos) > cap
            occurrences.append(Occurrence(s, end, d, tuple(infos[:cap]), truncated))
    occurrences.sort(key=lambda o: (o.start, o.end))
    return OccurrenceReport(tuple(occurrences))


def occurrence_buckets(report: OccurrenceReport, k: int) -> set:
    """Set of floor(start / k) over occurrence starts."""
    if k < 1:
        raise ValueError("bucket width k must be >= 1")
    return {s // k for s in report.start_set}


def span_buckets(spans, k: int) -> set:
    if k < 1:
        raise ValueError("bucket width k must be >= 1")
    return {s // k for s, _, _ in spans}


def as_report_input(x) -> np.ndarray:
    return as_symbols(x)
