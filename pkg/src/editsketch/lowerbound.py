"""Adversarial family witnessing the information-theoretic floor: the pattern
is 0^m and the text is a run of length-m blocks, each holding at most k
non-zero symbols, so every block is recoverable from its (unique) optimal
edit information and the sketch cannot beat the counting bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decoder import decode
from .encoder import encode_codes
from .errors import ExperimentFailureError
from .matcher import find_occurrences
from .wire import deserialize_sketch, serialize_sketch, size_breakdown


@dataclass(frozen=True)
class AdversarialInstance:
    m: int
    n: int
    k: int
    sigma: int
    seed: int
    pattern: np.ndarray
    text: np.ndarray

    @property
    def block_count(self) -> int:
        return self.n // self.m


def generate(m: int, n: int, k: int, sigma: int, seed: int) -> AdversarialInstance:
    """T = S_0 ... S_{p-1} 0^{n-pm}, each S_q with a uniform count in [0, k] of
    non-zero symbols at uniform positions; deterministic in the seed."""
    if sigma < 2 or not (0 < k <= m <= n):
        raise ValueError("need sigma >= 2 and 0 < k <= m <= n")
    rng = np.random.default_rng(seed)
    text = np.zeros(n, dtype=np.int32)
    for q in range(n // m):
        count = int(rng.integers(0, k + 1))
        if count:
            positions = rng.choice(m, size=count, replace=False)
            values = rng.integers(1, sigma, size=count)
            text[q * m + positions] = values
    return AdversarialInstance(m=m, n=n, k=k, sigma=sigma, seed=seed,
                               pattern=np.zeros(m, dtype=np.int32), text=text)


def entropy_bound_bits(m: int, n: int, k: int, sigma: int) -> float:
    """floor(n/m) * log2(sum_{i<=k} C(m,i) (sigma-1)^i), big-integer exact."""
    if sigma < 2 or not (0 < k <= m <= n):
        raise ValueError("need sigma >= 2 and 0 < k <= m <= n")
    total = sum(math.comb(m, i) * (sigma - 1) ** i for i in range(k + 1))
    return (n // m) * math.log2(total)


def run_experiment(grid, trials: int, seed: int, cap: int = 4,
                   strict: bool = True) -> list:
    """Encode/decode every cell, assert oracle equality, and report sizes.

    grid is an iterable of (m, n, k, sigma); rows carry the CSV columns
    m,n,k,sigma,seed,bits_measured,bits_bound,ratio,decode_ok in grid order.
    """
    rows = []
    counter = 0
    for m, n, k, sigma in grid:
        bound = entropy_bound_bits(m, n, k, sigma)
        for _ in range(trials):
            cell_seed = seed + counter
            counter += 1
            inst = generate(m, n, k, sigma, cell_seed)
            sketch = encode_codes(inst.pattern, inst.text, k, sigma)
            data = serialize_sketch(sketch)
            measured = 8 * len(data)
            report = decode(deserialize_sketch(data), cap=cap)
            expected = find_occurrences(inst.pattern, inst.text, k, cap=cap)
            ok = report == expected
            rows.append({
                "m": m, "n": n, "k": k, "sigma": sigma, "seed": cell_seed,
                "bits_measured": measured, "bits_bound": bound,
                "ratio": measured / bound, "decode_ok": ok,
                "header_bits": size_breakdown(sketch)["header_bits"],
            })
            if strict and not ok:
                raise ExperimentFailureError(
                    f"decode mismatch at m={m} n={n} k={k} sigma={sigma} seed={cell_seed}")
    return rows


CSV_COLUMNS = ["m", "n", "k", "sigma", "seed", "bits_measured", "bits_bound",
               "ratio", "decode_ok"]


def rows_to_csv(rows) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(str(row[c]) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"
