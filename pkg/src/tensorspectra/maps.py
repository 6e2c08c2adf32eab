"""Combinatorial maps and the trace invariants they index.

A p-valent combinatorial map is a finite set of half-edges with a
successor permutation (cycles = vertices, all of length p) and a
fixed-point-free pairing involution (the edges).  Rooting marks one
half-edge.  Connected rooted maps with n vertices index the degree-n
balanced invariant I_n(T): one full tensor contraction per vertex,
indices identified along edges, each rooted class counted with weight 1.

The exact Gaussian expectation of I_n/N is computed by Wick pairing with
the symmetrized propagator (p/N^{p-1}) (1/p!) sum_sigma prod delta: each
(vertex matching, sigma assignment) closes the half-edge diagram into
loops, and every loop contributes one free index sum, i.e. a factor N.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import CapExceeded, DomainError
from .tensors import SymmetricTensor, sample_goe

__all__ = [
    "CombinatorialMap",
    "InvariantEstimate",
    "ENUMERATION_CAP",
    "enumerate_rooted_maps",
    "trace_invariant",
    "balanced_invariant",
    "wick_expectation",
    "mc_expected_invariant",
    "map_to_json",
    "map_from_json",
]

# Enumeration feasibility cap on the number of half-edges n*p.
ENUMERATION_CAP = 12

_SYMBOLS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True)
class CombinatorialMap:
    """Half-edge encoding of a p-valent map, optionally rooted."""

    p: int
    successor: tuple
    pairing: tuple
    root: int | None = None

    def __post_init__(self):
        succ = tuple(int(h) for h in self.successor)
        pair = tuple(int(h) for h in self.pairing)
        object.__setattr__(self, "successor", succ)
        object.__setattr__(self, "pairing", pair)
        m = len(succ)
        if len(pair) != m:
            raise DomainError("successor and pairing must act on the same half-edges")
        if sorted(succ) != list(range(m)):
            raise DomainError("successor is not a permutation")
        for h in range(m):
            if pair[pair[h]] != h or pair[h] == h:
                raise DomainError("pairing must be a fixed-point-free involution")
        for cycle in _cycles(succ):
            if len(cycle) != self.p:
                raise DomainError(f"every successor cycle must have length p={self.p}")
        if self.root is not None and not 0 <= self.root < m:
            raise DomainError("root must be one of the half-edges")

    @property
    def half_edges(self) -> range:
        return range(len(self.successor))

    @property
    def n_vertices(self) -> int:
        return len(self.successor) // self.p

    def vertices(self):
        """Successor cycles, each a tuple of p half-edges."""
        return _cycles(self.successor)

    def edges(self):
        return [(h, self.pairing[h]) for h in self.half_edges if h < self.pairing[h]]

    def is_connected(self) -> bool:
        if not len(self.successor):
            return True
        return len(_bfs_order(self.successor, self.pairing, 0)) == len(self.successor)

    def rerooted(self, root: int) -> "CombinatorialMap":
        return CombinatorialMap(self.p, self.successor, self.pairing, root)

    def canonical_key(self):
        """Relabeled (successor, pairing) after BFS from the root.

        Two rooted maps are isomorphic iff their keys coincide.
        """
        if self.root is None:
            raise DomainError("canonical_key needs a rooted map")
        return _canonical_key(self.successor, self.pairing, self.root)

    def unrooted_key(self):
        """Minimum of the rooted keys over all rootings: a graph invariant."""
        return min(
            _canonical_key(self.successor, self.pairing, h) for h in self.half_edges
        )


def _cycles(perm):
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        h = start
        while not seen[h]:
            seen[h] = True
            cyc.append(h)
            h = perm[h]
        out.append(tuple(cyc))
    return out


def _bfs_order(succ, pair, root):
    label = {root: 0}
    order = [root]
    queue = deque([root])
    while queue:
        h = queue.popleft()
        for nb in (succ[h], pair[h]):
            if nb not in label:
                label[nb] = len(order)
                order.append(nb)
                queue.append(nb)
    return label


def _canonical_key(succ, pair, root):
    label = _bfs_order(succ, pair, root)
    if len(label) != len(succ):
        raise DomainError("canonical form of a disconnected map is undefined")
    new_succ = [0] * len(succ)
    new_pair = [0] * len(succ)
    for h, lh in label.items():
        new_succ[lh] = label[succ[h]]
        new_pair[lh] = label[pair[h]]
    return tuple(new_succ), tuple(new_pair)


def _pairings(items):
    """All fixed-point-free involutions on `items`, as lists of pairs."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        for tail in _pairings(rest[:i] + rest[i + 1 :]):
            yield [(first, other)] + tail


@lru_cache(maxsize=None)
def enumerate_rooted_maps(p: int, n: int, cap: int = ENUMERATION_CAP):
    """Connected rooted p-valent maps with n vertices, one per class.

    The successor permutation is fixed to n disjoint p-cycles; all
    fixed-point-free pairings are generated, filtered for connectivity,
    rooted in every possible way and deduplicated by BFS canonical form.
    Returns an empty tuple when n*p is odd (no pairing exists).
    """
    if p < 2 or n < 0:
        raise DomainError(f"need p >= 2 and n >= 0, got p={p}, n={n}")
    if n == 0:
        return ()
    if n * p > cap:
        raise CapExceeded(f"n*p = {n * p} exceeds the enumeration cap {cap}")
    if (n * p) % 2:
        return ()
    m = n * p
    succ = tuple((v * p + (i + 1) % p) for v in range(n) for i in range(p))
    seen = set()
    out = []
    for pairs in _pairings(list(range(m))):
        pairing = [0] * m
        for a, b in pairs:
            pairing[a] = b
            pairing[b] = a
        pairing = tuple(pairing)
        if len(_bfs_order(succ, pairing, 0)) != m:
            continue
        for root in range(m):
            key = _canonical_key(succ, pairing, root)
            if key not in seen:
                seen.add(key)
                out.append(CombinatorialMap(p, succ, pairing, root))
    return tuple(out)


def _einsum_subscripts(cmap):
    """One index symbol per edge; one operand subscript per vertex."""
    edge_symbol = {}
    for k, (a, b) in enumerate(cmap.edges()):
        if k >= len(_SYMBOLS):
            raise CapExceeded("too many edges for einsum subscripts")
        edge_symbol[a] = edge_symbol[b] = _SYMBOLS[k]
    subs = []
    for cyc in cmap.vertices():
        subs.append("".join(edge_symbol[h] for h in cyc))
    return ",".join(subs) + "->"


def trace_invariant(tensor: SymmetricTensor, cmap: CombinatorialMap) -> float:
    """Full contraction of one tensor copy per vertex along the map's edges.

    Independent of the rooting and, by symmetry of the tensor, of which
    vertex slot is assigned to which incident edge.
    """
    if tensor.p != cmap.p:
        raise DomainError(
            f"tensor order {tensor.p} does not match map degree {cmap.p}"
        )
    dense = tensor.to_dense()
    operands = [dense] * cmap.n_vertices
    return float(np.einsum(_einsum_subscripts(cmap), *operands, optimize=True))


@lru_cache(maxsize=None)
def _invariant_plan(p: int, n: int, cap: int = ENUMERATION_CAP):
    """Grouped contraction plan for I_n: (einsum subscripts, multiplicity).

    Rooted classes sharing the same underlying map evaluate to the same
    trace invariant, so they are contracted once and weighted.
    """
    groups = {}
    for cmap in enumerate_rooted_maps(p, n, cap):
        key = cmap.unrooted_key()
        if key in groups:
            groups[key][1] += 1
        else:
            groups[key] = [_einsum_subscripts(cmap), 1]
    return tuple((subs, mult) for subs, mult in groups.values())


def balanced_invariant(tensor: SymmetricTensor, n: int, cap: int = ENUMERATION_CAP) -> float:
    """I_n(T): sum of trace invariants over connected rooted classes, weight 1 each.

    I_0 = N by convention, so that the resolvent generating series
    sum_n I_n/(N w^{n+1}) starts at 1/w.
    """
    if n == 0:
        return float(tensor.N)
    plan = _invariant_plan(tensor.p, n, cap)
    if not plan:
        return 0.0
    dense = tensor.to_dense()
    total = 0.0
    for subs, mult in plan:
        k = subs.count(",") + 1
        total += mult * float(np.einsum(subs, *([dense] * k), optimize=True))
    return total


def _loop_count(map_pairs, prop_pairs, m):
    """Number of cycles of the union of two perfect matchings on m points."""
    nxt1 = [0] * m
    nxt2 = [0] * m
    for a, b in map_pairs:
        nxt1[a], nxt1[b] = b, a
    for a, b in prop_pairs:
        nxt2[a], nxt2[b] = b, a
    seen = [False] * m
    loops = 0
    for start in range(m):
        if seen[start]:
            continue
        loops += 1
        h = start
        while True:
            seen[h] = True
            partner = nxt1[h]
            seen[partner] = True
            h = nxt2[partner]
            if h == start:
                break
    return loops


def _matchings(items):
    yield from _pairings(items)


def wick_expectation(p: int, N: int, n: int, cap: int = ENUMERATION_CAP) -> Fraction:
    """Exact Gaussian expectation <I_n(T)>/N as a rational number.

    Sums over vertex matchings and slot permutations of the symmetrized
    propagator; the free index sums contribute N^{#loops}.  Odd n vanishes
    by Wick parity.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    if n == 0:
        return Fraction(1)  # <I_0>/N with the I_0 = N convention
    if n % 2:
        return Fraction(0)
    if n * p > cap:
        raise CapExceeded(f"n*p = {n * p} exceeds the cap {cap}")
    Nf = Fraction(N)
    pref = (Fraction(p) / Nf ** (p - 1) / math.factorial(p)) ** (n // 2)
    total = Fraction(0)
    perms = list(itertools.permutations(range(p)))
    for cmap in enumerate_rooted_maps(p, n, cap):
        m = len(cmap.successor)
        map_pairs = cmap.edges()
        verts = cmap.vertices()
        loop_powers = {}
        for matching in _matchings(list(range(cmap.n_vertices))):
            for sigmas in itertools.product(perms, repeat=len(matching)):
                prop_pairs = []
                for (v, w), sigma in zip(matching, sigmas):
                    for i in range(p):
                        prop_pairs.append((verts[v][i], verts[w][sigma[i]]))
                c = _loop_count(map_pairs, prop_pairs, m)
                loop_powers[c] = loop_powers.get(c, 0) + 1
        for c, count in loop_powers.items():
            total += count * Nf**c
    return pref * total / Nf


@dataclass(frozen=True)
class InvariantEstimate:
    """Monte Carlo estimate of <I_n(T)>/N over the Gaussian ensemble."""

    n: int
    p: int
    N: int
    mean: float
    std_error: float
    samples: int
    seed: int


def mc_expected_invariant(
    p: int, N: int, n: int, samples: int, seed: int, cap: int = ENUMERATION_CAP
) -> InvariantEstimate:
    """Unbiased sample mean of I_n(T)/N over independent ensemble draws.

    Per-sample tensors use independent child streams derived from `seed`,
    so the estimate is reproducible and order-independent.
    """
    if samples < 1:
        raise DomainError("need at least one sample")
    if n == 0:
        return InvariantEstimate(n, p, N, 1.0, 0.0, samples, seed)
    plan = _invariant_plan(p, n, cap)
    if not plan:
        return InvariantEstimate(n, p, N, 0.0, 0.0, samples, seed)
    child_seeds = np.random.SeedSequence(seed).generate_state(samples, dtype=np.uint64)
    vals = np.empty(samples)
    for i, s in enumerate(child_seeds):
        T = sample_goe(p, N, int(s))
        vals[i] = balanced_invariant(T, n, cap) / N
    std_error = vals.std(ddof=1) / math.sqrt(samples) if samples > 1 else 0.0
    return InvariantEstimate(n, p, N, float(vals.mean()), float(std_error), samples, seed)


# ------------------------------------------------------------------- export

def map_to_json(cmap: CombinatorialMap) -> dict:
    return {
        "p": cmap.p,
        "n": cmap.n_vertices,
        "half_edges": list(cmap.half_edges),
        "successor": list(cmap.successor),
        "pairing": list(cmap.pairing),
        "root": cmap.root,
    }


def map_from_json(obj: dict) -> CombinatorialMap:
    return CombinatorialMap(
        obj["p"], tuple(obj["successor"]), tuple(obj["pairing"]), obj.get("root")
    )
