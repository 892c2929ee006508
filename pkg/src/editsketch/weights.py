"""Covering weight function: every edit of every alignment in S is charged to
the nearest black component on its left (the wrap-around component bc-1 when
none exists), giving total weight <= cost(S)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import AlignmentSet, BlackIndexing, InferenceGraph, labeled_steps
from .strings import _dp_matrix


@dataclass
class WeightCover:
    weights: np.ndarray  # indexed by component c in [0, bc)

    @property
    def total(self) -> int:
        return int(self.weights.sum())

    def at(self, c: int) -> int:
        # w(-1) is defined as w(bc-1)
        return int(self.weights[c if c >= 0 else len(self.weights) - 1])

    def range_sum(self, a: int, b: int) -> int:
        """sum of w(c) for c in [a-1, b] under the wrap-around convention."""
        bc = len(self.weights)
        lo = a - 1
        total = int(self.weights[max(lo, 0):b + 1].sum())
        if lo < 0:
            total += int(self.weights[bc - 1])
        return total


def _predecessor_black(mask: np.ndarray) -> np.ndarray:
    """pred[x] = largest black position <= x, or -1."""
    idx = np.where(mask, np.arange(len(mask), dtype=np.int64), -1)
    if len(idx):
        np.maximum.accumulate(idx, out=idx)
    return idx


def build_weight_cover(graph: InferenceGraph, idx: BlackIndexing,
                       aset: AlignmentSet) -> WeightCover:
    """Deterministic charge pass: alignments in set order, edits in path order."""
    bc = idx.bc
    weights = np.zeros(bc, dtype=np.int64)
    pred_p = _predecessor_black(graph.black_mask_p)
    pred_t = _predecessor_black(graph.black_mask_t)
    comp_p = {int(p): i % bc for i, p in enumerate(idx.pi)}
    comp_t = {int(t): i % bc for i, t in enumerate(idx.tau)}
    for alignment in aset.all():
        for kind, x, y in labeled_steps(alignment):
            if kind == "match":
                continue
            if kind in ("del", "sub"):
                anchor = int(pred_p[x])
                weights[comp_p[anchor] if anchor >= 0 else bc - 1] += 1
            else:
                anchor = int(pred_t[y])
                weights[comp_t[anchor] if anchor >= 0 else bc - 1] += 1
    return WeightCover(weights=weights)


def verify_cover(w: WeightCover, pattern, window, idx: BlackIndexing) -> bool:
    """Exhaustively checks the five covering conditions (test-scale only).

    Conditions pair corresponding inter-component gaps of P and T; the two
    existential conditions scan the allowed endpoint range directly.
    """
    p = np.asarray(pattern)
    t = np.asarray(window)
    pi, tau, bc = idx.pi, idx.tau, idx.bc
    m_s, n_s = idx.m_s, idx.n_s

    def dist(a, b):
        return int(_dp_matrix(a, b)[len(a), len(b)])

    # (1) every aligned pair of interior gaps
    for j in range(m_s - 1):
        bound = w.at(j % bc)
        for i in range(j % bc, n_s - 1, bc):
            seg_p = p[pi[j]:pi[j + 1]]
            seg_t = t[tau[i]:tau[i + 1]]
            if dist(seg_p, seg_t) > bound:
                return False

    head_p = p[:pi[0]]
    # (2) leading gap against the text's leading gap
    if dist(head_p, t[:tau[0]]) > w.at(bc - 1):
        return False
    # (3) leading gap against a window ending at tau(i), start free in [tau(i-1), tau(i)]
    for i in range(bc, n_s, bc):
        lo, hi = int(tau[i - 1]), int(tau[i])
        row = _dp_matrix(head_p[::-1], t[lo:hi][::-1])[len(head_p)]
        if int(row.min()) > w.at(bc - 1):
            return False

    tail_p = p[pi[m_s - 1]:]
    # (4) trailing gap against the text's trailing gap
    if dist(tail_p, t[tau[n_s - 1]:]) > w.at(idx.c_last):
        return False
    # (5) trailing gap against a window starting at tau(i), end free in [tau(i), tau(i+1)]
    for i in range(idx.c_last, n_s - 1, bc):
        lo, hi = int(tau[i]), int(tau[i + 1])
        row = _dp_matrix(tail_p, t[lo:hi])[len(tail_p)]
        if int(row.min()) > w.at(idx.c_last):
            return False
    return True
