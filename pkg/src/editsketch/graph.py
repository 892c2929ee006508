"""Inference graph over pattern characters, text characters, and a sink vertex.

Each alignment in a set S induces edges: deleted characters connect to the
sink, inserted characters connect to the sink, aligned characters connect to
each other; an edge is black exactly when the step is a match. A component is
black when it carries no red edge (the sink's component never counts as
black). Black components of an enclosing set form residue classes, which the
BlackIndexing arrays expose.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import ceil, gcd

import numpy as np

from .errors import InvariantViolationError


class UnionFind:
    """Path-compressing union-find; roots are canonicalized to smallest member."""

    def __init__(self, size: int) -> None:
        self.parent = list(range(size))

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra


def step_kind_of(pair0, pair1, is_edit: bool) -> str:
    dx = pair1[0] - pair0[0]
    dy = pair1[1] - pair0[1]
    if dx == 1 and dy == 1:
        return "sub" if is_edit else "match"
    if dx == 1:
        return "del"
    return "ins"


def labeled_steps(alignment):
    """Yields (kind, x, y) for any object exposing .pairs and .edit_step_indices."""
    pairs = alignment.pairs
    edits = alignment.edit_step_indices
    for idx in range(len(pairs) - 1):
        kind = step_kind_of(pairs[idx], pairs[idx + 1], idx in edits)
        if kind in ("del", "ins") and idx not in edits:
            raise InvariantViolationError("indel step missing from the edit labels")
        yield kind, pairs[idx][0], pairs[idx][1]


@dataclass
class AlignmentSet:
    """Ordered set S = {x_pref, x_suf, A_1..A_a, B_1..B_b} with its cost threshold."""

    x_pref: object
    x_suf: object
    a_list: list = field(default_factory=list)
    b_list: list = field(default_factory=list)
    threshold: int = 0

    def all(self) -> list:
        return [self.x_pref, self.x_suf, *self.a_list, *self.b_list]

    def full_alignments(self) -> list:
        return [self.x_pref, self.x_suf, *self.a_list]

    def total_cost(self) -> int:
        return sum(len(x.edit_step_indices) for x in self.all())


@dataclass
class InferenceGraph:
    """Component labeling over m pattern chars, n text chars, and the sink."""

    m: int
    n: int
    comp: np.ndarray          # component root per vertex (sink last)
    red_roots: frozenset      # roots of components carrying a red edge or the sink
    cluster: np.ndarray       # black-edge-only cluster root per vertex

    @property
    def sink(self) -> int:
        return self.m + self.n

    def is_black_vertex(self, v: int) -> bool:
        return self.comp[v] not in self.red_roots

    @cached_property
    def black_mask_p(self) -> np.ndarray:
        red = np.isin(self.comp[:self.m], list(self.red_roots)) if self.red_roots else \
            np.zeros(self.m, dtype=bool)
        return ~red

    @cached_property
    def black_mask_t(self) -> np.ndarray:
        comp_t = self.comp[self.m:self.m + self.n]
        red = np.isin(comp_t, list(self.red_roots)) if self.red_roots else \
            np.zeros(self.n, dtype=bool)
        return ~red

    @cached_property
    def bc(self) -> int:
        roots = set(self.comp[:self.m + self.n].tolist()) - set(self.red_roots)
        return len(roots)


def build_graph(m: int, n: int, alignments) -> InferenceGraph:
    """Union-find construction of the inference graph from labeled alignments."""
    sink = m + n
    uf = UnionFind(m + n + 1)
    uf_black = UnionFind(m + n + 1)
    red_vertices = [sink]
    for alignment in alignments:
        for kind, x, y in labeled_steps(alignment):
            if x > m or y > n:
                raise InvariantViolationError("alignment leaves the instance bounds")
            if kind == "del":
                uf.union(x, sink)
                red_vertices.append(x)
            elif kind == "ins":
                uf.union(sink, m + y)
                red_vertices.append(m + y)
            elif kind == "sub":
                uf.union(x, m + y)
                red_vertices.append(x)
                red_vertices.append(m + y)
            else:
                uf.union(x, m + y)
                uf_black.union(x, m + y)
    comp = np.array([uf.find(v) for v in range(m + n + 1)], dtype=np.int64)
    red_roots = frozenset(int(comp[v]) for v in red_vertices)
    cluster = np.array([uf_black.find(v) for v in range(m + n + 1)], dtype=np.int64)
    return InferenceGraph(m=m, n=n, comp=comp, red_roots=red_roots, cluster=cluster)


@dataclass
class BlackIndexing:
    """pi/tau position arrays of the black projections plus residue accessors."""

    pi: np.ndarray
    tau: np.ndarray
    bc: int

    @property
    def m_s(self) -> int:
        return len(self.pi)

    @property
    def n_s(self) -> int:
        return len(self.tau)

    @property
    def c_last(self) -> int:
        return (self.m_s - 1) % self.bc

    def m_c(self, c: int) -> int:
        return ceil((self.m_s - c) / self.bc)

    def n_c(self, c: int) -> int:
        return ceil((self.n_s - c) / self.bc)

    @property
    def m0(self) -> int:
        return self.m_c(0)

    @property
    def n0(self) -> int:
        return self.n_c(0)

    @property
    def s_p(self) -> int:
        """Minimum number of pattern characters in one black component."""
        return self.m_c(self.bc - 1)

    def pi_jc(self, j: int, c: int) -> int:
        return int(self.pi[c + j * self.bc])

    def tau_ic(self, i: int, c: int) -> int:
        return int(self.tau[c + i * self.bc])

    @cached_property
    def tau0(self) -> np.ndarray:
        return self.tau[0::self.bc]

    @cached_property
    def pi00(self) -> int:
        return int(self.pi[0])

    def component_of_p_index(self, i: int) -> int:
        return i % self.bc


def black_counts_before(mask: np.ndarray) -> np.ndarray:
    """cum[x] = number of black positions strictly before x."""
    cum = np.zeros(len(mask) + 1, dtype=np.int64)
    np.cumsum(mask, out=cum[1:])
    return cum


def projected_span(alignment, pcum, tcum) -> tuple:
    """(x_X, x'_X, y_X, y'_X): black-character counts at the alignment's corners."""
    (x, y), (x2, y2) = alignment.pairs[0], alignment.pairs[-1]
    return int(pcum[x]), int(pcum[x2]), int(tcum[y]), int(tcum[y2])


def black_indexing(graph: InferenceGraph, aset: AlignmentSet) -> BlackIndexing:
    """Builds pi/tau and validates the residue-class structure plus the
    exact-occurrence property of every alignment's black matching."""
    bc = graph.bc
    if bc == 0:
        raise InvariantViolationError("black indexing requires bc > 0")
    pi = np.nonzero(graph.black_mask_p)[0]
    tau = np.nonzero(graph.black_mask_t)[0]
    idx = BlackIndexing(pi=pi, tau=tau, bc=bc)
    m_s, n_s = idx.m_s, idx.n_s

    comp_p = graph.comp[pi]
    comp_t = graph.comp[graph.m + tau]
    if n_s % bc != m_s % bc:
        raise InvariantViolationError("projected lengths disagree modulo bc")
    if n_s > 2 * m_s:
        raise InvariantViolationError("text projection longer than twice the pattern projection")
    for c in range(bc):
        roots_p = set(comp_p[c::bc].tolist())
        roots_t = set(comp_t[c::bc].tolist())
        if len(roots_p | roots_t) != 1:
            raise InvariantViolationError(f"residue class {c} spans several components")
    if len(set(comp_p[:bc].tolist())) != bc:
        raise InvariantViolationError("residue classes collide")

    pcum = black_counts_before(graph.black_mask_p)
    tcum = black_counts_before(graph.black_mask_t)
    pos_in_pi = {int(p): i for i, p in enumerate(pi)}
    pos_in_tau = {int(t): i for i, t in enumerate(tau)}
    for alignment in aset.all():
        x_a, x2_a, y_a, y2_a = projected_span(alignment, pcum, tcum)
        if x2_a - x_a != y2_a - y_a:
            raise InvariantViolationError("black projections of an alignment differ in length")
        black_matches = 0
        for kind, x, y in labeled_steps(alignment):
            if kind == "match" and graph.black_mask_p[x]:
                black_matches += 1
                if pos_in_pi[x] - x_a != pos_in_tau[y] - y_a:
                    raise InvariantViolationError("black matching is not a contiguous shift")
        if black_matches != x2_a - x_a:
            raise InvariantViolationError("black matching does not cover the projection")
    return idx


def check_succinct_enclosure(aset: AlignmentSet, graph: InferenceGraph) -> tuple:
    """(succinctly_encloses, g_chain) per the gcd-shrinking condition.

    g_0 is the gcd of the full alignments' projected shifts (m_S when all
    shifts vanish, the degenerate case); each partial alignment B_i must span
    at least g_{i-1}+1 black pattern characters and refines g_i by gcd.
    """
    if not encloses(aset, graph.m, graph.n):
        return False, []
    pcum = black_counts_before(graph.black_mask_p)
    tcum = black_counts_before(graph.black_mask_t)
    m_s = int(pcum[-1])
    shifts = [projected_span(x, pcum, tcum)[2] for x in aset.full_alignments()]
    degenerate = all(s == 0 for s in shifts)
    g = m_s if degenerate else gcd(*shifts)
    chain = [g]
    ok = True
    if degenerate and aset.b_list:
        ok = False
    for b in aset.b_list:
        x_b, x2_b, y_b, _ = projected_span(b, pcum, tcum)
        if x2_b - x_b < chain[-1] + 1:
            ok = False
        chain.append(gcd(chain[-1], abs(y_b - x_b)))
    return ok, chain


def encloses(aset: AlignmentSet, m: int, n: int) -> bool:
    """Structural enclosure: window short enough, pref/suf/A's are full-pattern
    alignments anchored at the window's prefix and suffix."""
    if n > 2 * m - 2 * aset.threshold:
        return False
    pref, suf = aset.x_pref, aset.x_suf
    if pref.pairs[0] != (0, 0) or suf.pairs[-1] != (m, n):
        return False
    for x in aset.full_alignments():
        if x.pairs[0][0] != 0 or x.pairs[-1][0] != m:
            return False
    return True


def validate_partition(aset: AlignmentSet, graph: InferenceGraph, idx: BlackIndexing) -> None:
    """bc must equal the final gcd of the chain whenever S succinctly encloses."""
    ok, chain = check_succinct_enclosure(aset, graph)
    if ok and graph.bc > 0 and chain and graph.bc != chain[-1]:
        raise InvariantViolationError(f"bc={graph.bc} differs from the gcd chain {chain}")


def captures_start(idx: BlackIndexing, w: int, t: int, threshold: int) -> bool:
    """Radius condition |tau_i^0 - t - pi_0^0| <= w + 3K for some i."""
    target = t + idx.pi00
    tau0 = idx.tau0
    pos = int(np.searchsorted(tau0, target))
    best = min(
        abs(int(tau0[j]) - target)
        for j in (pos - 1, pos)
        if 0 <= j < len(tau0)
    )
    return best <= w + 3 * threshold


def captures(aset: AlignmentSet, idx, w: int, occ: tuple, threshold: int) -> bool:
    """True iff bc = 0 or the occurrence's start satisfies the radius condition."""
    if idx is None or idx.bc == 0:
        return True
    return captures_start(idx, w, occ[0], threshold)


def uncaptured_starts(idx: BlackIndexing, w: int, starts, threshold: int) -> np.ndarray:
    """Vectorized capture filter; returns the boolean mask of uncaptured starts."""
    starts = np.asarray(starts, dtype=np.int64)
    targets = starts + idx.pi00
    tau0 = idx.tau0.astype(np.int64)
    pos = np.searchsorted(tau0, targets)
    best = np.full(len(starts), np.iinfo(np.int64).max)
    left = pos - 1
    okl = left >= 0
    best[okl] = np.abs(tau0[left[okl]] - targets[okl])
    okr = pos < len(tau0)
    best[okr] = np.minimum(best[okr], np.abs(tau0[pos[okr]] - targets[okr]))
    return best > w + 3 * threshold
