"""Batch command-line surface: encode, decode, verify, positions-only, bench,
lowerbound. Inputs are raw byte files; exit codes: 0 ok, 2 usage, 3 I/O,
4 corrupt sketch, 5 verify failure."""

from __future__ import annotations

import argparse
import math
import random
import sys

import numpy as np

from .decoder import decode
from .encoder import BlockStats, encode, encode_codes
from .errors import CorruptSketchError, ExperimentFailureError
from .lowerbound import generate, run_experiment, rows_to_csv
from .matcher import find_occurrences
from .strings import Alphabet
from .wire import MODE_NAMES, MODE_PERIODIC, deserialize_sketch, serialize_sketch, size_breakdown

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CORRUPT, EXIT_VERIFY = 0, 2, 3, 4, 5


def _read_bytes(path: str) -> bytes:
    with open(path, "rb") as handle:
        return handle.read()


def _write_bytes(path: str, data: bytes) -> None:
    with open(path, "wb") as handle:
        handle.write(data)


def _reference_bits(n: int, m: int, k: int, sigma: int) -> float:
    if m == 0 or n == 0:
        return 0.0
    kk = max(k, 1)
    return (n / m) * kk * math.log2(max(m * max(sigma, 2) / kk, 2.0))


def _print_sizes(sketch, out) -> None:
    sizes = size_breakdown(sketch)
    print(f"total_bits {sizes['total_bits']}", file=out)
    print(f"header_bits {sizes['header_bits']} (alphabet {sizes['alphabet_bits']})", file=out)
    print(f"payload_bits {sizes['payload_bits']}", file=out)
    for i, bits in enumerate(sizes["block_bits"]):
        print(f"block {i} bits {bits}", file=out)
    ref = _reference_bits(sketch.n, sketch.m, sketch.k, sketch.sigma)
    print(f"reference_bits {ref:.1f}", file=out)


def cmd_encode(args) -> int:
    pattern = _read_bytes(args.pattern)
    text = _read_bytes(args.text)
    sketch = encode(pattern, text, args.k)
    data = serialize_sketch(sketch)
    out_path = args.out or args.text + ".sketch"
    _write_bytes(out_path, data)
    _print_sizes(sketch, sys.stdout)
    return EXIT_OK


def _format_info(info) -> str:
    ops = []
    for x, cx, y, cy in info:
        ops.append(f"{x},{'-' if cx is None else cx},{y},{'-' if cy is None else cy}")
    return ";".join(ops) if ops else "-"


def cmd_decode(args) -> int:
    sketch = deserialize_sketch(_read_bytes(args.sketch))
    report = decode(sketch, cap=args.cap)
    for occ in report:
        mark = "+" if occ.truncated else ""
        infos = " | ".join(_format_info(i) for i in occ.edit_infos)
        print(f"{occ.start} {occ.end} {occ.dist} {len(occ.edit_infos)}{mark} {infos}")
    return EXIT_OK


def cmd_verify(args) -> int:
    pattern = _read_bytes(args.pattern)
    text = _read_bytes(args.text)
    sketch = deserialize_sketch(serialize_sketch(encode(pattern, text, args.k)))
    got = decode(sketch, cap=args.cap)
    alphabet = Alphabet.from_instance(pattern, text)
    expected = find_occurrences(alphabet.encode(pattern), alphabet.encode(text),
                                args.k, cap=args.cap)
    if got == expected:
        print("PASS")
        return EXIT_OK
    got_map = {(o.start, o.end): o for o in got}
    exp_map = {(o.start, o.end): o for o in expected}
    for key in sorted(set(got_map) | set(exp_map)):
        if got_map.get(key) != exp_map.get(key):
            print(f"FAIL first divergence at fragment {key}: "
                  f"decoded={got_map.get(key)} oracle={exp_map.get(key)}")
            break
    return EXIT_VERIFY


def cmd_positions_only(args) -> int:
    """Alphabet reduction: text symbols absent from the pattern collapse to a
    single symbol before encoding, shrinking the character payloads."""
    pattern = _read_bytes(args.pattern)
    text = _read_bytes(args.text)
    psyms = sorted(set(pattern))
    unused = next((b for b in range(256) if b not in set(psyms)), None)
    if unused is None:
        table = bytes(psyms)
    else:
        table = bytes(sorted(psyms + [unused]))
    lut = {b: i for i, b in enumerate(table)}
    collapse = lut[unused] if unused is not None else 0
    p_codes = np.array([lut[b] for b in pattern], dtype=np.int32)
    t_codes = np.array([lut.get(b, collapse) for b in text], dtype=np.int32)
    sketch = encode_codes(p_codes, t_codes, args.k, len(table), table)
    data = serialize_sketch(sketch)
    out_path = args.out or args.text + ".possketch"
    _write_bytes(out_path, data)
    print(f"sigma_reduced {len(table)}")
    _print_sizes(sketch, sys.stdout)
    return EXIT_OK


def _bench_instances(trials: int, seed: int):
    rng = random.Random(seed)
    for i in range(trials):
        sigma = rng.choice([2, 4, 26])
        m = rng.randint(16, 128)
        n = rng.randint(m, 6 * m)
        k = rng.randint(1, max(1, m // 10))
        nprng = np.random.default_rng(seed * 1000 + i)
        if i % 3 == 2:
            # near-periodic pattern and text
            q = nprng.integers(0, sigma, size=rng.randint(2, 6))
            p = np.tile(q, m // len(q) + 1)[:m].astype(np.int32)
            t = np.tile(q, n // len(q) + 2)[:n].astype(np.int32)
            for _ in range(k):
                t[nprng.integers(0, n)] = nprng.integers(0, sigma)
        else:
            p = nprng.integers(0, sigma, size=m).astype(np.int32)
            t = nprng.integers(0, sigma, size=n).astype(np.int32)
            for _ in range(rng.randint(0, 3)):
                pos = int(nprng.integers(0, max(n - m, 1)))
                copy = p.copy()
                for _ in range(rng.randint(0, k)):
                    copy[nprng.integers(0, m)] = nprng.integers(0, sigma)
                take = min(len(copy), n - pos)
                t[pos:pos + take] = copy[:take]
        yield p, t, k, sigma


def cmd_bench(args) -> int:
    histogram: dict = {}
    periodic_blocks = 0
    print("m n k sigma total_bits reference ratio")
    for p, t, k, sigma in _bench_instances(args.trials, args.seed):
        stats: list = []
        sketch = encode_codes(p, t, k, sigma, collect_stats=stats)
        total = size_breakdown(sketch)["total_bits"]
        ref = _reference_bits(len(t), len(p), k, sigma)
        for s in stats:
            histogram[MODE_NAMES[s.mode]] = histogram.get(MODE_NAMES[s.mode], 0) + 1
            if s.mode == MODE_PERIODIC:
                periodic_blocks += 1
        print(f"{len(p)} {len(t)} {k} {sigma} {total} {ref:.0f} {total / max(ref, 1):.2f}")
    print(f"block modes: {sorted(histogram.items())}")
    print(f"periodic branch exercised: {'yes' if periodic_blocks else 'no'} "
          f"({periodic_blocks} blocks)")
    return EXIT_OK


def _parse_grid(spec: str) -> list:
    cells = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        values = [int(v) for v in part.split(",")]
        if len(values) != 4:
            raise ValueError("grid cells are m,n,k,sigma")
        cells.append(tuple(values))
    if not cells:
        raise ValueError("empty grid")
    return cells


def cmd_lowerbound(args) -> int:
    grid = _parse_grid(args.grid)
    try:
        rows = run_experiment(grid, trials=args.trials, seed=args.seed, strict=True)
    except ExperimentFailureError as exc:
        print(f"FAIL {exc}", file=sys.stderr)
        return EXIT_VERIFY
    csv = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(csv)
    else:
        sys.stdout.write(csv)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="editsketch")
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="compress an instance into a sketch file")
    enc.add_argument("pattern")
    enc.add_argument("text")
    enc.add_argument("--k", type=int, required=True)
    enc.add_argument("--out")
    enc.add_argument("--jobs", type=int, default=1)
    enc.set_defaults(func=cmd_encode)

    dec = sub.add_parser("decode", help="list occurrences from a sketch file")
    dec.add_argument("sketch")
    dec.add_argument("--cap", type=int, default=64)
    dec.set_defaults(func=cmd_decode)

    ver = sub.add_parser("verify", help="encode, decode, and compare to the oracle")
    ver.add_argument("pattern")
    ver.add_argument("text")
    ver.add_argument("--k", type=int, required=True)
    ver.add_argument("--cap", type=int, default=64)
    ver.set_defaults(func=cmd_verify)

    pos = sub.add_parser("positions-only", help="encode after the alphabet reduction")
    pos.add_argument("pattern")
    pos.add_argument("text")
    pos.add_argument("--k", type=int, required=True)
    pos.add_argument("--out")
    pos.set_defaults(func=cmd_positions_only)

    ben = sub.add_parser("bench", help="size measurements over generated instances")
    ben.add_argument("--trials", type=int, default=20)
    ben.add_argument("--seed", type=int, default=0)
    ben.set_defaults(func=cmd_bench)

    low = sub.add_parser("lowerbound", help="adversarial-family experiment grid")
    low.add_argument("--grid", required=True, help='cells "m,n,k,sigma;..."')
    low.add_argument("--trials", type=int, default=3)
    low.add_argument("--seed", type=int, default=0)
    low.add_argument("--out")
    low.set_defaults(func=cmd_lowerbound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ValueError:
        return EXIT_USAGE
    try:
        return args.func(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CorruptSketchError as exc:
        print(f"corrupt sketch: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
