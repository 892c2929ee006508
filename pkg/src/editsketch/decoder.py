"""Receiver side: rebuild the inference graph from edit information alone,
materialize the sentinel-hashed strings, and answer by running the matcher on
them.

Characters in red components propagate along black edges from the explicitly
transmitted edit tuples; black components either receive their character from
the period-cover payload or a per-component sentinel. Any inconsistency in a
sketch raises CorruptSketchError rather than producing a wrong answer.
"""

from __future__ import annotations

import numpy as np

from .bitio import BitReader
from .encoder import block_length, machinery_threshold, normalize_instance
from .errors import CorruptSketchError
from .graph import AlignmentSet, InferenceGraph, black_indexing, build_graph
from .matcher import Occurrence, OccurrenceReport, find_occurrences
from .strings import MalformedEditInfoError, apply_lz_phrases
from .wire import (
    MODE_BC_ZERO,
    MODE_EMPTY,
    MODE_GENERAL,
    MODE_PERIODIC,
    MODE_RAW,
    Sketch,
    char_bits,
    read_alignment_set,
    read_cover_runs,
    read_phrases,
    read_raw,
)


def _char_facts(paths, m: int):
    """(vertex, char) pairs revealed by the edit tuples; pattern vertices are
    0..m-1, window vertices m..m+width-1."""
    for path in paths:
        for x, cx, y, cy in path.tuples:
            if cx is not None:
                yield x, cx
            if cy is not None:
                yield m + y, cy


def reconstruct_graph(payload: BitReader, m: int, width: int, bits: int):
    """Rebuilds the alignment set and inference graph for one block payload."""
    pref, suf, a_list, b_list = read_alignment_set(payload, m, width, bits)
    if pref.pairs[0] != (0, 0) or suf.pairs[-1] != (m, width):
        raise CorruptSketchError("prefix/suffix alignments are not anchored")
    aset = AlignmentSet(x_pref=pref, x_suf=suf, a_list=list(a_list), b_list=list(b_list))
    graph = build_graph(m, width, aset.all())
    return aset, graph


def _resolve_red_chars(graph: InferenceGraph, aset: AlignmentSet) -> np.ndarray:
    """Per-vertex characters for red components (-1 elsewhere): explicit tuple
    characters propagated along black-edge clusters."""
    m, n = graph.m, graph.n
    chars = np.full(m + n, -1, dtype=np.int64)
    cluster_char: dict = {}
    for vertex, value in _char_facts(aset.all(), m):
        root = int(graph.cluster[vertex])
        known = cluster_char.get(root)
        if known is not None and known != value:
            raise CorruptSketchError("conflicting characters in one black cluster")
        cluster_char[root] = value
    red = set(graph.red_roots)
    for v in range(m + n):
        if int(graph.comp[v]) in red:
            value = cluster_char.get(int(graph.cluster[v]))
            if value is None:
                raise CorruptSketchError("red component with an unresolved character")
            chars[v] = value
    return chars


def build_hashed_strings(graph: InferenceGraph, idx, cover_chars: dict,
                         red_chars: np.ndarray, sigma: int):
    """P# and T#: cover components carry their transmitted character, other
    black components a sentinel sigma+c, red positions their resolved character."""
    m, n = graph.m, graph.n
    p_hash = np.empty(m, dtype=np.int32)
    t_hash = np.empty(n, dtype=np.int32)
    comp_p = {int(p): i % idx.bc for i, p in enumerate(idx.pi)} if idx else {}
    comp_t = {int(t): i % idx.bc for i, t in enumerate(idx.tau)} if idx else {}
    for x in range(m):
        if graph.black_mask_p[x]:
            c = comp_p[x]
            p_hash[x] = cover_chars[c] if c in cover_chars else sigma + c
        else:
            p_hash[x] = red_chars[x]
    for y in range(n):
        if graph.black_mask_t[y]:
            c = comp_t[y]
            t_hash[y] = cover_chars[c] if c in cover_chars else sigma + c
        else:
            t_hash[y] = red_chars[m + y]
    return p_hash, t_hash


def decode_block(block, m: int, sigma: int, k: int, cap: int) -> tuple:
    """Occurrences of one non-empty block in window coordinates, plus the
    window offset relative to the block start."""
    bits = char_bits(sigma)
    r = BitReader(block.payload, block.payload_bits)
    lo_rel = r.read_gamma()
    width = r.read_gamma()
    aset, graph = reconstruct_graph(r, m, width, bits)
    red_chars = _resolve_red_chars(graph, aset)
    bc = graph.bc

    if block.mode == MODE_BC_ZERO:
        if bc != 0:
            raise CorruptSketchError("BC_ZERO block has black components")
        if np.any(red_chars < 0):
            raise CorruptSketchError("unresolved characters in a BC_ZERO block")
        pattern = red_chars[:m].astype(np.int32)
        window = red_chars[m:].astype(np.int32)
    else:
        if bc == 0:
            raise CorruptSketchError("general block without black components")
        idx = black_indexing(graph, aset)
        runs = read_cover_runs(r, bc)
        cover_chars: dict = {}
        for a, b in runs:
            lo, hi = int(idx.tau[a]), int(idx.tau[b])
            length = hi - lo + 1
            phrases = read_phrases(r, length, bits)
            try:
                frag = apply_lz_phrases(phrases, length)
            except MalformedEditInfoError as exc:
                raise CorruptSketchError(str(exc)) from exc
            for c in range(a, b + 1):
                cover_chars[c] = int(frag[int(idx.tau[c]) - lo])
            # transmitted fragments overlap red positions: cross-check them
            for off in range(length):
                known = red_chars[m + lo + off]
                if known >= 0 and known != int(frag[off]):
                    raise CorruptSketchError("cover characters contradict the edit info")
        pattern, window = build_hashed_strings(graph, idx, cover_chars, red_chars, sigma)
    if r.remaining:
        raise CorruptSketchError("trailing bits in a block payload")
    report = find_occurrences(pattern, window, k, cap)
    return lo_rel, tuple(report.occurrences)


def _shift_occurrence(occ: Occurrence, delta: int) -> Occurrence:
    infos = tuple(
        tuple((x, cx, y + delta, cy) for x, cx, y, cy in info)
        for info in occ.edit_infos
    )
    return Occurrence(occ.start + delta, occ.end + delta, occ.dist, infos, occ.truncated)


def decode(sketch: Sketch, cap: int = 64) -> OccurrenceReport:
    """Reconstructs every k-error occurrence with the edit information of all
    optimal alignments (cap-bounded), in original text coordinates."""
    n, m, k = sketch.n, sketch.m, sketch.k
    if any(b.mode == MODE_RAW for b in sketch.blocks):
        if len(sketch.blocks) != 1:
            raise CorruptSketchError("RAW sketch must hold exactly one block")
        block = sketch.blocks[0]
        r = BitReader(block.payload, block.payload_bits)
        p, t = read_raw(r, m, n, char_bits(sketch.sigma))
        if r.remaining:
            raise CorruptSketchError("trailing bits in a RAW payload")
        return find_occurrences(p, t, k, cap)

    _, _, k_enc, record = normalize_instance(np.zeros(m, dtype=np.int32),
                                             np.zeros(n, dtype=np.int32), k)
    if m == 0 or k_enc > machinery_threshold(m):
        raise CorruptSketchError("instance shape requires a RAW sketch")
    n_norm = max(n, m)
    expected = 0 if n == 0 else n_norm // block_length(m, k_enc) + 1
    if len(sketch.blocks) != expected:
        raise CorruptSketchError("block count disagrees with the instance shape")

    merged: dict = {}
    length = block_length(m, k_enc)
    for index, block in enumerate(sketch.blocks):
        if block.mode == MODE_EMPTY:
            if block.payload_bits:
                raise CorruptSketchError("EMPTY block with payload bits")
            continue
        if block.mode not in (MODE_BC_ZERO, MODE_GENERAL, MODE_PERIODIC):
            raise CorruptSketchError("unexpected block mode")
        lo_rel, occs = decode_block(block, m, sketch.sigma, k_enc, cap)
        offset = index * length + lo_rel
        if offset > n_norm:
            raise CorruptSketchError("window offset outside the text")
        for occ in occs:
            shifted = _shift_occurrence(occ, offset)
            if shifted.end > n_norm:
                raise CorruptSketchError("occurrence outside the text")
            key = (shifted.start, shifted.end)
            known = merged.get(key)
            if known is None:
                merged[key] = shifted
            elif known != shifted:
                raise CorruptSketchError("overlapping windows disagree on an occurrence")

    out = []
    for (start, _), occ in sorted(merged.items()):
        if start < record.pad:
            continue
        occ = _shift_occurrence(occ, -record.pad)
        if record.k_original < k_enc and occ.dist > record.k_original:
            continue
        out.append(occ)
    return OccurrenceReport(tuple(out))
