"""Normative sketch byte format and the payload codecs (see FORMAT.md).

Layout: magic "PMWE", version 0x01, CRC-32 of everything after the checksum,
then a bit stream holding gamma(n) gamma(m) gamma(k) gamma(sigma), the raw
alphabet table, gamma(block count), and the blocks. Every block is a 3-bit
mode tag, a gamma bit-length prefix, the payload, then padding to a byte
boundary.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

from .bitio import BitReader, BitWriter, gamma_bit_length
from .errors import CorruptSketchError, UnsupportedSketchError
from .strings import MalformedEditInfoError

MAGIC = b"PMWE"
VERSION = 1

MODE_EMPTY, MODE_RAW, MODE_BC_ZERO, MODE_GENERAL, MODE_PERIODIC = range(5)
MODE_NAMES = {
    MODE_EMPTY: "EMPTY",
    MODE_RAW: "RAW",
    MODE_BC_ZERO: "BC_ZERO",
    MODE_GENERAL: "GENERAL",
    MODE_PERIODIC: "PERIODIC",
}


def char_bits(sigma: int) -> int:
    return max(sigma - 1, 0).bit_length()


@dataclass(frozen=True)
class BlockSketch:
    mode: int
    payload: bytes
    payload_bits: int


@dataclass(frozen=True)
class Sketch:
    n: int
    m: int
    k: int
    sigma: int
    table: bytes
    blocks: tuple

    @property
    def total_bits(self) -> int:
        return size_breakdown(self)["total_bits"]


def serialize_sketch(sketch: Sketch) -> bytes:
    body = BitWriter()
    body.write_gamma(sketch.n)
    body.write_gamma(sketch.m)
    body.write_gamma(sketch.k)
    body.write_gamma(sketch.sigma)
    for byte in sketch.table:
        body.write_uint(byte, 8)
    body.write_gamma(len(sketch.blocks))
    body.align_to_byte()
    for block in sketch.blocks:
        body.write_uint(block.mode, 3)
        body.write_gamma(block.payload_bits)
        body.write_bytes_bits(block.payload, block.payload_bits)
        body.align_to_byte()
    payload = body.getvalue()
    crc = zlib.crc32(payload)
    return MAGIC + bytes([VERSION]) + crc.to_bytes(4, "big") + payload


def deserialize_sketch(data: bytes) -> Sketch:
    if len(data) < 9 or data[:4] != MAGIC:
        raise UnsupportedSketchError("bad magic")
    if data[4] != VERSION:
        raise UnsupportedSketchError(f"unsupported version {data[4]}")
    stored_crc = int.from_bytes(data[5:9], "big")
    payload = data[9:]
    if zlib.crc32(payload) != stored_crc:
        raise CorruptSketchError("checksum mismatch")
    r = BitReader(payload)
    n = r.read_gamma()
    m = r.read_gamma()
    k = r.read_gamma()
    sigma = r.read_gamma()
    if sigma > 256:
        raise CorruptSketchError("alphabet too large")
    table = bytes(r.read_uint(8) for _ in range(sigma))
    num_blocks = r.read_gamma()
    r.align_to_byte()
    blocks = []
    for _ in range(num_blocks):
        mode = r.read_uint(3)
        if mode not in MODE_NAMES:
            raise CorruptSketchError(f"unknown block mode {mode}")
        bits = r.read_gamma()
        if bits > r.remaining:
            raise CorruptSketchError("block payload overruns the stream")
        w = BitWriter()
        for _ in range(bits):
            w.write_bit(r.read_bit())
        blocks.append(BlockSketch(mode=mode, payload=w.getvalue(), payload_bits=bits))
        r.align_to_byte()
    return Sketch(n=n, m=m, k=k, sigma=sigma, table=table, blocks=tuple(blocks))


def size_breakdown(sketch: Sketch) -> dict:
    """Exact bit accounting of the serialized stream."""
    header = 8 * 9  # magic + version + crc
    header += gamma_bit_length(sketch.n) + gamma_bit_length(sketch.m)
    header += gamma_bit_length(sketch.k) + gamma_bit_length(sketch.sigma)
    alphabet_bits = 8 * sketch.sigma
    header += alphabet_bits + gamma_bit_length(len(sketch.blocks))
    header += (8 - header % 8) % 8
    block_bits = []
    for block in sketch.blocks:
        bits = 3 + gamma_bit_length(block.payload_bits) + block.payload_bits
        bits += (8 - bits % 8) % 8
        block_bits.append(bits)
    total = header + sum(block_bits)
    return {
        "total_bits": total,
        "header_bits": header,
        "alphabet_bits": alphabet_bits,
        "block_bits": block_bits,
        "payload_bits": sum(block_bits),
    }


# ---------------------------------------------------------------------------
# alignment-set payload

TAG_DEL, TAG_INS, TAG_SUB = 0, 1, 2


@dataclass(frozen=True)
class WirePath:
    """Alignment rebuilt from endpoints plus edit information."""

    pairs: tuple
    edit_step_indices: frozenset
    tuples: tuple  # (x, cx, y, cy) with None for the empty side


def write_edit_info(w: BitWriter, info, x_start: int, y_start: int, bits: int) -> None:
    """Stars-and-bars layout: gamma(cost), two monotone gamma-coded delta
    sequences for the x- and y-positions, then a 2-bit op tag and explicit
    characters per tuple. Zero-cost alignments therefore contribute one bit."""
    w.write_gamma(len(info))
    prev = x_start
    for x, _, _, _ in info:
        w.write_gamma(x - prev)
        prev = x
    prev = y_start
    for _, _, y, _ in info:
        w.write_gamma(y - prev)
        prev = y
    for _, cx, _, cy in info:
        if cy is None:
            w.write_uint(TAG_DEL, 2)
            w.write_uint(cx, bits)
        elif cx is None:
            w.write_uint(TAG_INS, 2)
            w.write_uint(cy, bits)
        else:
            w.write_uint(TAG_SUB, 2)
            w.write_uint(cx, bits)
            w.write_uint(cy, bits)


def read_edit_info(r: BitReader, x_start: int, y_start: int, bits: int) -> tuple:
    cost = r.read_gamma()
    xs, prev = [], x_start
    for _ in range(cost):
        prev += r.read_gamma()
        xs.append(prev)
    ys, prev = [], y_start
    for _ in range(cost):
        prev += r.read_gamma()
        ys.append(prev)
    out = []
    for x, y in zip(xs, ys):
        tag = r.read_uint(2)
        if tag == TAG_DEL:
            out.append((x, r.read_uint(bits), y, None))
        elif tag == TAG_INS:
            out.append((x, None, y, r.read_uint(bits)))
        elif tag == TAG_SUB:
            cx = r.read_uint(bits)
            cy = r.read_uint(bits)
            if cx == cy:
                raise CorruptSketchError("substitution of identical characters")
            out.append((x, cx, y, cy))
        else:
            raise CorruptSketchError("invalid edit tag")
    return tuple(out)


def pairs_from_info(x: int, x2: int, y: int, y2: int, info) -> tuple:
    """Reconstructs the full pair path: gaps between tuples are matches."""
    pairs = [(x, y)]
    edits = []
    cx, cy = x, y
    for tx, tcx, ty, tcy in info:
        if tx - cx != ty - cy or tx < cx:
            raise CorruptSketchError("edit tuple breaks the match-gap structure")
        while cx < tx:
            cx += 1
            cy += 1
            pairs.append((cx, cy))
        edits.append(len(pairs) - 1)
        if tcx is not None:
            cx += 1
        if tcy is not None:
            cy += 1
        pairs.append((cx, cy))
    if x2 - cx != y2 - cy or x2 < cx:
        raise CorruptSketchError("alignment endpoints disagree with the edit info")
    while cx < x2:
        cx += 1
        cy += 1
        pairs.append((cx, cy))
    return tuple(pairs), frozenset(edits)


def _role_headers(aset_paths, m: int, width: int):
    """(role, path) with role deciding which endpoint fields hit the wire."""
    pref, suf, a_list, b_list = aset_paths
    yield "pref", pref
    yield "suf", suf
    for a in a_list:
        yield "a", a
    for b in b_list:
        yield "b", b


def write_alignment_set(w: BitWriter, aset_paths, m: int, width: int, bits: int) -> None:
    """Endpoint headers for every alignment (role-specific fields; the known
    corner of a prefix/suffix alignment stays off the wire), then the edit
    information of each."""
    _, _, a_list, b_list = aset_paths
    w.write_gamma(len(a_list))
    w.write_gamma(len(b_list))
    infos = []
    for role, path in _role_headers(aset_paths, m, width):
        (x, y), (x2, y2) = path.pairs[0], path.pairs[-1]
        info = _path_info(path)
        if role == "pref":
            w.write_signed_gamma(y2 - m)
        elif role == "suf":
            w.write_signed_gamma(y - (width - m))
        elif role == "a":
            w.write_gamma(y)
            w.write_signed_gamma((y2 - y) - m)
        else:
            w.write_gamma(x)
            w.write_gamma(x2 - x)
            w.write_gamma(y)
            w.write_signed_gamma((y2 - y) - (x2 - x))
        infos.append((info, x, y))
    for info, x, y in infos:
        write_edit_info(w, info, x, y, bits)


def _path_info(path):
    if isinstance(path, WirePath):
        return path.tuples
    from .strings import edit_info

    return edit_info(path)


def read_alignment_set(r: BitReader, m: int, width: int, bits: int) -> tuple:
    """Returns (pref, suf, a_list, b_list) as WirePath objects."""
    a_count = r.read_gamma()
    b_count = r.read_gamma()
    if a_count > width + 1 or b_count > width + 1:
        raise CorruptSketchError("implausible alignment counts")
    headers = []
    roles = ["pref", "suf"] + ["a"] * a_count + ["b"] * b_count
    for role in roles:
        if role == "pref":
            x, x2, y = 0, m, 0
            y2 = m + r.read_signed_gamma()
        elif role == "suf":
            x, x2, y2 = 0, m, width
            y = (width - m) + r.read_signed_gamma()
        elif role == "a":
            x, x2 = 0, m
            y = r.read_gamma()
            y2 = y + m + r.read_signed_gamma()
        else:
            x = r.read_gamma()
            x2 = x + r.read_gamma()
            y = r.read_gamma()
            y2 = y + (x2 - x) + r.read_signed_gamma()
        for v, hi in ((x, m), (x2, m), (y, width), (y2, width)):
            if not (0 <= v <= hi):
                raise CorruptSketchError("alignment endpoint out of range")
        if x2 < x or y2 < y:
            raise CorruptSketchError("negative alignment span")
        headers.append((x, x2, y, y2))
    paths = []
    for x, x2, y, y2 in headers:
        info = read_edit_info(r, x, y, bits)
        try:
            pairs, edits = pairs_from_info(x, x2, y, y2, info)
        except (MalformedEditInfoError, CorruptSketchError) as exc:
            raise CorruptSketchError(str(exc)) from exc
        for px, py in (pairs[0], pairs[-1]):
            if px > m or py > width:
                raise CorruptSketchError("alignment leaves the window")
        paths.append(WirePath(pairs=pairs, edit_step_indices=edits, tuples=info))
    pref, suf = paths[0], paths[1]
    a_list = paths[2:2 + a_count]
    b_list = paths[2 + a_count:]
    return pref, suf, a_list, b_list


# ---------------------------------------------------------------------------
# period-cover payload

def write_cover_runs(w: BitWriter, runs) -> None:
    w.write_gamma(len(runs))
    prev = -1
    for a, b in runs:
        w.write_gamma(a - prev - 1)
        w.write_gamma(b - a)
        prev = b


def read_cover_runs(r: BitReader, bc: int) -> list:
    count = r.read_gamma()
    runs = []
    prev = -1
    for _ in range(count):
        a = prev + 1 + r.read_gamma()
        b = a + r.read_gamma()
        if b >= bc:
            raise CorruptSketchError("cover run beyond the component range")
        runs.append((a, b))
        prev = b
    return runs


def write_phrases(w: BitWriter, phrases, bits: int) -> None:
    for phrase in phrases:
        if phrase[0] == "lit":
            w.write_bit(0)
            w.write_uint(phrase[1], bits)
        else:
            _, delta, length = phrase
            w.write_bit(1)
            w.write_gamma(delta - 1)
            w.write_gamma(length - 1)


def read_phrases(r: BitReader, length: int, bits: int) -> list:
    phrases = []
    pos = 0
    while pos < length:
        if r.read_bit() == 0:
            phrases.append(("lit", r.read_uint(bits)))
            pos += 1
        else:
            delta = r.read_gamma() + 1
            plen = r.read_gamma() + 1
            if delta > pos or pos + plen > length:
                raise CorruptSketchError("copy phrase out of range")
            phrases.append(("copy", delta, plen))
            pos += plen
    return phrases


# ---------------------------------------------------------------------------
# raw payload

def write_raw(w: BitWriter, pattern, text, bits: int) -> None:
    for c in pattern:
        w.write_uint(int(c), bits)
    for c in text:
        w.write_uint(int(c), bits)


def read_raw(r: BitReader, m: int, n: int, bits: int):
    import numpy as np

    p = np.array([r.read_uint(bits) for _ in range(m)], dtype=np.int32)
    t = np.array([r.read_uint(bits) for _ in range(n)], dtype=np.int32)
    return p, t
