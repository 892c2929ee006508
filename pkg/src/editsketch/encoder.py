"""Sender side: instance normalization, block planning, the iterative
construction of a succinctly enclosing alignment set, the periodic workaround,
and assembly of the serialized sketch.

Blocks of length ceil(m/3)-k tile the text; every k-error occurrence lives in
the block of its start, and its end stays within the ceil(4m/3) window, so the
per-block sub-instances always have prefix and suffix occurrences. A block is
encoded from the trimmed span [min start, max end] of its occurrences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, gcd, log2

import numpy as np

from .bitio import BitWriter
from .cover import PeriodCover, build_period_cover
from .errors import EncoderInvariantError, ProtocolMisuseError
from .graph import (
    AlignmentSet,
    BlackIndexing,
    InferenceGraph,
    black_indexing,
    build_graph,
    check_succinct_enclosure,
    uncaptured_starts,
    validate_partition,
)
from .matcher import occurrence_spans, span_buckets
from .strings import (
    Alphabet,
    Fragment,
    as_symbols,
    compose_alignments,
    edit_distance,
    edp_with_length,
    is_primitive,
    lz_phrases,
    restrict_alignment,
    self_edit_distance,
    shift_target,
)
from .wire import (
    MODE_BC_ZERO,
    MODE_EMPTY,
    MODE_GENERAL,
    MODE_PERIODIC,
    MODE_RAW,
    BlockSketch,
    Sketch,
    char_bits,
    write_alignment_set,
    write_cover_runs,
    write_phrases,
    write_raw,
)

BUCKET_FACTOR = 963068
PERIOD_LENGTH_DIVISOR = 128


@dataclass(frozen=True)
class NormalizationRecord:
    pad: int
    k_original: int
    k_encoded: int


@dataclass(frozen=True)
class BlockPlan:
    index: int
    start: int            # b_i
    window_lo: int
    window_hi: int        # inclusive end of the candidate window
    spans: tuple          # home occurrences (start, end, dist), absolute


@dataclass
class BuildTrace:
    heads: list = field(default_factory=list)       # per-iteration state snapshots
    selections: list = field(default_factory=list)  # chosen uncaptured occurrences


@dataclass
class BuildResult:
    aset: AlignmentSet
    graph: InferenceGraph
    indexing: object          # BlackIndexing or None when bc == 0
    weights: object           # WeightCover or None
    cover: object             # PeriodCover or None
    captured_all: bool
    trace: BuildTrace


def machinery_threshold(m: int) -> int:
    """Largest k for which the block machinery's preconditions hold: windows of
    ceil(4m/3) must fit under 2m-2k and blocks must be non-empty."""
    if m == 0:
        return -1
    return min((2 * m - ceil(4 * m / 3)) // 2, ceil(m / 3) - 1)


def block_length(m: int, k: int) -> int:
    return ceil(m / 3) - k


def window_span(m: int) -> int:
    return ceil(4 * m / 3)


def normalize_instance(pattern, text, k: int) -> tuple:
    """Pads the text with leading 0-symbols when it is shorter than the pattern
    and clamps the threshold to min(m, max(k, 1)); the record lets the decoder
    shift positions back and re-filter to the original k."""
    p = as_symbols(pattern)
    t = as_symbols(text)
    m, n = len(p), len(t)
    pad = max(0, m - n)
    if pad:
        t = np.concatenate([np.zeros(pad, dtype=np.int32), t])
    k_encoded = min(m, max(k, 1)) if m else 0
    return p, t, k_encoded, NormalizationRecord(pad=pad, k_original=k, k_encoded=k_encoded)


# ---------------------------------------------------------------------------
# Algorithm 1: iterative construction of S


def _optimal_window_alignment(pattern, window, lo, hi, expect=None):
    dist, path = edit_distance(Fragment(pattern, 0, len(pattern)),
                               Fragment(window, lo, hi))
    if expect is not None and dist != expect:
        raise EncoderInvariantError("scan distance disagrees with the pairwise DP")
    return dist, path


def _assert_period_halving(path, idx: BlackIndexing) -> None:
    """An optimal uncaptured alignment may not align any pattern character of a
    black component with a text character of the same component."""
    comp_p = {int(p): i % idx.bc for i, p in enumerate(idx.pi)}
    comp_t = {int(t): i % idx.bc for i, t in enumerate(idx.tau)}
    for kind, x, y in path.steps():
        if kind in ("match", "sub"):
            cp = comp_p.get(x)
            if cp is not None and comp_t.get(y) == cp:
                raise EncoderInvariantError("uncaptured alignment touches a component twice")


def build_alignment_set(pattern, window, k: int, spans) -> BuildResult:
    """Iteratively adds uncaptured occurrences to S = {pref, suf, A*, B*} until
    every occurrence is captured or the period cover is full.

    spans lists every (start, end, dist <= k) occurrence within the window.
    Loop invariants are asserted each iteration: succinct enclosure, the
    doubling of the smallest component, and the period-halving property of
    each selected alignment.
    """
    p = as_symbols(pattern)
    w_arr = as_symbols(window)
    m, n = len(p), len(w_arr)
    if n > 2 * m - 2 * k:
        raise ProtocolMisuseError("window longer than 2m-2k")
    prefix_ends = sorted(e for t, e, _ in spans if t == 0)
    suffix_starts = sorted(t for t, e, _ in spans if e == n)
    if not prefix_ends or not suffix_starts:
        raise ProtocolMisuseError("window lacks a prefix or suffix occurrence")

    _, x_pref = _optimal_window_alignment(p, w_arr, 0, prefix_ends[0])
    _, x_suf = _optimal_window_alignment(p, w_arr, suffix_starts[-1], n)
    aset = AlignmentSet(x_pref=x_pref, x_suf=x_suf, threshold=k)
    trace = BuildTrace()
    spans = sorted(spans)
    starts = np.array(sorted({t for t, _, _ in spans}), dtype=np.int64)

    max_rounds = int(ceil(log2(max(m, 2)))) + 8
    for _ in range(max_rounds):
        graph = build_graph(m, n, aset.all())
        ok, chain = check_succinct_enclosure(aset, graph)
        if not ok:
            raise EncoderInvariantError("alignment set stopped succinctly enclosing the window")
        bc = graph.bc
        if bc == 0:
            trace.heads.append({"bc": 0, "s_p": None, "cover_full": False,
                                "captured_all": True, "w": 0, "cost": aset.total_cost()})
            return BuildResult(aset, graph, None, None, None, True, trace)
        idx = black_indexing(graph, aset)
        validate_partition(aset, graph, idx)
        from .weights import build_weight_cover

        weights = build_weight_cover(graph, idx, aset)
        cover = build_period_cover(w_arr, idx, weights, k)
        mask = uncaptured_starts(idx, weights.total, starts, k)
        captured_all = not bool(mask.any())
        trace.heads.append({"bc": bc, "s_p": idx.s_p, "cover_full": cover.full,
                            "captured_all": captured_all, "w": weights.total,
                            "cost": aset.total_cost()})
        if captured_all or cover.full:
            return BuildResult(aset, graph, idx, weights, cover, captured_all, trace)

        bad = set(starts[mask].tolist())
        t_sel, e_sel, d_sel = next(sp for sp in spans if sp[0] in bad)
        _, y_path = _optimal_window_alignment(p, w_arr, t_sel, e_sel, expect=d_sel)
        _assert_period_halving(y_path, idx)

        if len(aset.a_list) < 2:
            aset.a_list.append(y_path)
            trace.selections.append({"phase": "A", "ell": len(aset.a_list),
                                     "start": t_sel, "end": e_sel, "cost": d_sel})
        else:
            m0 = idx.m0
            if m0 < 3:
                raise EncoderInvariantError("partial-alignment selection needs m0 >= 3")
            first_pair_at = {}
            for pos, (x, _) in enumerate(y_path.pairs):
                first_pair_at.setdefault(x, pos)
            pc = y_path.prefix_costs()
            best_j, best_cost = None, None
            for j in range(m0 - 2):
                lo = idx.pi_jc(j, 0)
                hi = idx.pi_jc(j + 2, 0)
                cost = pc[first_pair_at[hi]] - pc[first_pair_at[lo]]
                if best_cost is None or cost < best_cost:
                    best_j, best_cost = j, cost
            lo = idx.pi_jc(best_j, 0)
            hi = idx.pi_jc(best_j + 2, 0)
            b_path, _ = restrict_alignment(y_path, lo, hi)
            aset.b_list.append(b_path)
            trace.selections.append({"phase": "B", "ell": len(aset.b_list),
                                     "start": t_sel, "end": e_sel, "cost": best_cost,
                                     "j": best_j})
    raise EncoderInvariantError("alignment-set construction did not converge")


# ---------------------------------------------------------------------------
# periodic workaround


def find_approximate_period(pattern, k: int):
    """Searches for a primitive Q with |Q| <= m/(128k) and edp(P, Q) <= 2k by
    probing the first three |Q|-length windows of P for each candidate length.
    Returning None is always safe (the caller falls back to the general path)."""
    if k < 1:
        raise ValueError("k must be positive")
    p = as_symbols(pattern)
    m = len(p)
    max_len = m // (PERIOD_LENGTH_DIVISOR * k)
    for q_len in range(1, max_len + 1):
        for j in range(3):
            lo, hi = j * q_len, (j + 1) * q_len
            if hi > m:
                break
            q = p[lo:hi]
            if is_primitive(q) and edp_with_length(p, q)[0] <= 2 * k:
                return q
    return None


def build_periodic_alignment_set(pattern, window, k: int, q):
    """Three alignments of cost <= 14k built by composing an optimal alignment
    of P onto a Q^inf prefix with restrictions of an optimal alignment of a
    Q^inf prefix onto the window, at shifts 0, q_T - q_P, and |Q|.

    Returns None when no admissible q_T exists (caller falls back)."""
    p = as_symbols(pattern)
    w_arr = as_symbols(window)
    q_arr = as_symbols(q)
    m, n = len(p), len(w_arr)
    if 2 * n > 3 * m - 56 * k:
        raise ProtocolMisuseError("window too long for the periodic construction")
    d_p, q_p = edp_with_length(p, q_arr)
    if d_p > 2 * k:
        raise ProtocolMisuseError("pattern is not 2k-close to a prefix of Q^inf")

    horizon = n + 12 * k + len(q_arr) + 1
    horizon = max(horizon, q_p + 1)
    reps = ceil(horizon / len(q_arr))
    qinf = np.tile(q_arr, reps + 2)
    from .strings import _dp_matrix

    row = _dp_matrix(w_arr, qinf[:horizon])[n]
    q_t = None
    for cand in range(q_p, horizon, len(q_arr)):
        if int(row[cand]) <= 12 * k:
            q_t = cand
            break
    if q_t is None:
        return None

    _, align_a = edit_distance(Fragment(p, 0, m), Fragment(qinf, 0, q_p))
    _, align_z = edit_distance(Fragment(qinf, 0, q_t), Fragment(w_arr, 0, n))

    def composed(shift: int):
        z_part, _ = restrict_alignment(align_z, shift, shift + q_p)
        return compose_alignments(shift_target(align_a, shift), z_part)

    x_pref = composed(0)
    x_suf = composed(q_t - q_p)
    a_list = []
    if q_t > q_p:
        a_list.append(composed(len(q_arr)))
    aset = AlignmentSet(x_pref=x_pref, x_suf=x_suf, a_list=a_list, threshold=14 * k)
    for path in aset.all():
        if path.cost > 14 * k:
            raise EncoderInvariantError("periodic alignment exceeds the 14k budget")
    return aset


# ---------------------------------------------------------------------------
# block encoding


@dataclass
class BlockStats:
    mode: int
    set_size: int = 0
    set_cost: int = 0
    bc: int = 0
    weight: int = 0
    cover_full: bool = False


def _finish_block(pattern, window, aset, spans_local, sigma: int,
                  preferred_mode: int, precomputed: "BuildResult | None" = None) -> tuple:
    """Given a final alignment set for the window, derives the graph, weights,
    and cover, verifies every occurrence is determined, and emits the payload."""
    m, n = len(pattern), len(window)
    k_eff = aset.threshold
    bits = char_bits(sigma)
    if precomputed is not None:
        graph, idx = precomputed.graph, precomputed.indexing
        weights, cover = precomputed.weights, precomputed.cover
        if not precomputed.captured_all and not (cover and cover.full):
            return None
    elif (graph := build_graph(m, n, aset.all())).bc == 0:
        idx = weights = cover = None
    else:
        idx = black_indexing(graph, aset)
        validate_partition(aset, graph, idx)
        from .weights import build_weight_cover

        weights = build_weight_cover(graph, idx, aset)
        cover = build_period_cover(window, idx, weights, k_eff)
        if not cover.full:
            starts = np.array(sorted({t for t, _, _ in spans_local}), dtype=np.int64)
            if bool(uncaptured_starts(idx, weights.total, starts, k_eff).any()):
                return None  # not every occurrence is determined; caller falls back
    w = BitWriter()
    mode = MODE_BC_ZERO if graph.bc == 0 else preferred_mode
    write_alignment_set(w, (aset.x_pref, aset.x_suf, aset.a_list, aset.b_list),
                        m, n, bits)
    if mode != MODE_BC_ZERO:
        runs = cover.runs()
        write_cover_runs(w, runs)
        for a, b in runs:
            frag = window[int(idx.tau[a]):int(idx.tau[b]) + 1]
            _, self_path = self_edit_distance(frag)
            write_phrases(w, lz_phrases(self_path), bits)
    stats = BlockStats(mode=mode, set_size=len(aset.all()), set_cost=aset.total_cost(),
                       bc=graph.bc, weight=weights.total if weights else 0,
                       cover_full=bool(cover.full) if cover else False)
    return w, stats


def encode_block(pattern, window, k: int, spans_local, sigma: int) -> tuple:
    """Dispatches one trimmed window: GENERAL via the iterative construction,
    PERIODIC when the occurrence buckets are dense and a short approximate
    period exists, BC_ZERO when the graph has no black component."""
    m, n = len(pattern), len(window)
    buckets = span_buckets(spans_local, k)
    general = len(buckets) <= BUCKET_FACTOR * k or k >= 2 * log2(max(m, 2))
    if not general and 2 * n <= 3 * m - 56 * k:
        q = find_approximate_period(pattern, k)
        if q is not None:
            aset = build_periodic_alignment_set(pattern, window, k, q)
            if aset is not None:
                finished = _finish_block(pattern, window, aset, spans_local, sigma,
                                         MODE_PERIODIC)
                if finished is not None:
                    return finished
    result = build_alignment_set(pattern, window, k, spans_local)
    finished = _finish_block(pattern, window, result.aset, spans_local, sigma,
                             MODE_GENERAL, precomputed=result)
    if finished is None:
        raise EncoderInvariantError("general construction left an occurrence uncaptured")
    return finished


def plan_blocks(m: int, n: int, k: int, spans) -> list:
    length = block_length(m, k)
    count = n // length + 1
    per_block: dict = {i: [] for i in range(count)}
    for t, e, d in spans:
        per_block[t // length].append((t, e, d))
    plans = []
    span = window_span(m)
    for i in range(count):
        b_i = i * length
        plans.append(BlockPlan(index=i, start=b_i, window_lo=b_i,
                               window_hi=min(b_i + span, n),
                               spans=tuple(sorted(per_block[i]))))
    return plans


def encode_codes(pattern, text, k: int, sigma: int, table: bytes | None = None,
                 collect_stats: list | None = None) -> Sketch:
    """Builds a sketch from symbol-code arrays; table defaults to the identity
    byte table of size sigma."""
    p = as_symbols(pattern)
    t = as_symbols(text)
    if sigma > 256:
        raise ValueError("alphabet size above 256 is not serializable")
    if (len(p) and int(p.max()) >= sigma) or (len(t) and int(t.max()) >= sigma):
        raise ValueError("symbol code out of range")
    if table is None:
        table = bytes(range(sigma))
    m, n = len(p), len(t)
    bits = char_bits(sigma)

    p_norm, t_norm, k_enc, record = normalize_instance(p, t, k)
    if m == 0 or k_enc > machinery_threshold(m):
        w = BitWriter()
        write_raw(w, p, t, bits)
        blocks = (BlockSketch(MODE_RAW, w.getvalue(), w.bit_length),)
        if collect_stats is not None:
            collect_stats.append(BlockStats(mode=MODE_RAW))
        return Sketch(n=n, m=m, k=k, sigma=sigma, table=table, blocks=blocks)

    blocks = []
    if n > 0:
        spans = occurrence_spans(p_norm, t_norm, k_enc)
        for plan in plan_blocks(m, len(t_norm), k_enc, spans):
            if not plan.spans:
                blocks.append(BlockSketch(MODE_EMPTY, b"", 0))
                if collect_stats is not None:
                    collect_stats.append(BlockStats(mode=MODE_EMPTY))
                continue
            lo = min(s for s, _, _ in plan.spans)
            hi = max(e for _, e, _ in plan.spans)
            window = t_norm[lo:hi]
            local = [(s - lo, e - lo, d) for s, e, d in spans
                     if s >= lo and e <= hi]
            writer, stats = encode_block(p_norm, window, k_enc, local, sigma)
            if collect_stats is not None:
                collect_stats.append(stats)
            head = BitWriter()
            head.write_gamma(lo - plan.start)
            head.write_gamma(hi - lo)
            head.write_bits(writer)
            blocks.append(BlockSketch(stats.mode, head.getvalue(), head.bit_length))
    return Sketch(n=n, m=m, k=k, sigma=sigma, table=table, blocks=tuple(blocks))


def encode(pattern: bytes, text: bytes, k: int,
           collect_stats: list | None = None) -> Sketch:
    """One-way message for (pattern, text, k) over the instance's own alphabet."""
    alphabet = Alphabet.from_instance(bytes(pattern), bytes(text))
    p = alphabet.encode(bytes(pattern))
    t = alphabet.encode(bytes(text))
    return encode_codes(p, t, k, alphabet.size, alphabet.table, collect_stats)
