"""Period cover: the black components whose text characters must be shipped
explicitly because their neighbourhoods are too compressible to pin down.

An interval [a, b] of components joins the cover when the closed text fragment
T[tau(a)..tau(b)] has small self-edit distance: bounded by 6w+11K at the four
boundary anchors (a=0, b=bc-1, b=c_last, a=c_last+1), or by six times the
local weight sum for condition (5). Only the maximal qualifying b per left
endpoint matters for the union, and one self-edit DP yields the values for
every prefix of a fragment at once (reversal handles the suffix-anchored
families), so each family costs a single bounded DP per anchor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import BlackIndexing
from .strings import selfed_prefix_values
from .weights import WeightCover


@dataclass
class PeriodCover:
    members: tuple            # sorted component indices
    boundary_intervals: list  # maximal intervals from conditions (1)-(4)
    body_intervals: list      # per-a maximal intervals from condition (5)
    bc: int

    @property
    def full(self) -> bool:
        return len(self.members) == self.bc

    def runs(self) -> list:
        """Interval representation of the member set (minimal disjoint intervals)."""
        runs = []
        for c in self.members:
            if runs and runs[-1][1] == c - 1:
                runs[-1][1] = c
            else:
                runs.append([c, c])
        return [tuple(r) for r in runs]


def build_period_cover(window, idx: BlackIndexing, wcover: WeightCover,
                       threshold: int) -> PeriodCover:
    bc = idx.bc
    tau = idx.tau
    win = np.asarray(window)
    w = wcover.total
    anchor_bound = 6 * w + 11 * threshold
    c_last = idx.c_last

    members: set = set()
    boundary: list = []

    def add_interval(a, b, store):
        if a <= b:
            iv = (a, b)
            members.update(range(a, b + 1))
            if iv not in store:
                store.append(iv)

    def frag_closed(a, b):
        return win[int(tau[a]):int(tau[b]) + 1]

    def closed_len(a, b):
        return int(tau[b]) - int(tau[a]) + 1

    # (1) prefix-anchored: selfed of every prefix of T[tau(0)..tau(bc-1)]
    vals = selfed_prefix_values(frag_closed(0, bc - 1), anchor_bound)
    b1 = max((b for b in range(bc) if vals[closed_len(0, b)] <= anchor_bound), default=-1)
    add_interval(0, b1, boundary)
    # (4) anchored just past c_last
    if c_last + 1 < bc:
        vals = selfed_prefix_values(frag_closed(c_last + 1, bc - 1), anchor_bound)
        b4 = max((b for b in range(c_last + 1, bc)
                  if vals[closed_len(c_last + 1, b)] <= anchor_bound), default=c_last)
        add_interval(c_last + 1, b4, boundary)
    # (2)/(3) suffix-anchored at bc-1 and c_last; selfed is reversal-invariant
    for end in {bc - 1, c_last}:
        vals = selfed_prefix_values(frag_closed(0, end)[::-1], anchor_bound)
        a_min = min((a for a in range(end + 1)
                     if vals[closed_len(a, end)] <= anchor_bound), default=end + 1)
        add_interval(a_min, end, boundary)

    # (5): per left endpoint a, walk prefixes of T[tau(a)..] against the growing
    # local weight budget; stop once selfed exceeds the largest budget still
    # reachable (suffix weight sums shrink to the right).
    body: list = []
    weights = wcover.weights
    wrap = wcover.at(-1)
    suffix = [0] * (bc + 1)
    for c in range(bc - 1, -1, -1):
        suffix[c] = suffix[c + 1] + int(weights[c])
    for a in range(bc):
        reach = 6 * (suffix[max(a - 1, 0)] + (wrap if a == 0 else 0))
        if reach <= 0:
            continue
        vals = selfed_prefix_values(frag_closed(a, bc - 1), reach)
        best = -1
        acc = wrap if a == 0 else int(weights[a - 1])
        for b in range(a, bc):
            acc += int(weights[b])
            v = int(vals[closed_len(a, b)])
            if v > reach:
                break
            if v <= 6 * acc:
                best = b
        if best >= 0:
            body.append((a, best))
            members.update(range(a, best + 1))

    return PeriodCover(members=tuple(sorted(members)), boundary_intervals=boundary,
                       body_intervals=body, bc=bc)


def select_encoding_intervals(cover: PeriodCover) -> list:
    """Greedy subset whose union is the cover and whose selfed total is bounded:
    the boundary-maximal intervals plus the overlap-extend / jump selection over
    the condition-(5) candidates (each component in at most two of those)."""
    chosen = list(cover.boundary_intervals)
    body = sorted(cover.body_intervals)
    if body:
        current = min(body)  # smallest a
        chosen.append(current)
        max_b = max(b for _, b in body)
        while current[1] < max_b:
            a_j, b_j = current
            overlapping = [iv for iv in body if a_j < iv[0] <= b_j < iv[1]]
            if overlapping:
                current = max(overlapping, key=lambda iv: (iv[1], -iv[0]))
            else:
                beyond = [iv for iv in body if iv[0] > b_j]
                if not beyond:
                    break
                current = min(beyond)
            chosen.append(current)
    return chosen
