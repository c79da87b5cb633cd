"""Seeded instance generators: random trees, random bilayer graphs, set-cover
reductions, and the four-node counterexample fixture.

All randomness comes from SplitMix64 below, never from platform RNGs, so a
(seed, params) pair regenerates the identical instance on any machine or
implementation language.
"""

from dataclasses import dataclass

from .model import Instance, ModelError

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 PRNG (Steele, Lea, Flood 2014). 64-bit state, 64-bit output."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_below(self, k: int) -> int:
        """Uniform-ish integer in [0, k). Modulo bias is ~k/2^64, irrelevant
        for the tiny ranges used here."""
        if k < 1:
            raise ValueError("k must be positive")
        return self.next_u64() % k


def gen_random_tree(n: int, max_a: int, seed: int, weighted: bool = False,
                    max_w: int = 4) -> Instance:
    """Random recursive tree: node i >= 1 attaches to a uniform parent in [0, i).

    Targets are uniform integers in [0, max_a]; weights, when requested,
    uniform in [1, max_w]. Draw order is parents, then targets, then weights.
    """
    if n < 1:
        raise ModelError("n must be at least 1")
    if max_a < 0:
        raise ModelError("max_a must be non-negative")
    if weighted and max_w < 1:
        raise ModelError("max_w must be at least 1")
    rng = SplitMix64(seed)
    edges = [(i, rng.next_below(i)) for i in range(1, n)]
    a = [rng.next_below(max_a + 1) for _ in range(n)]
    w = [1 + rng.next_below(max_w) for _ in range(n)] if weighted else None
    return Instance(n, edges, a, w)


def gen_random_bilayer(nu: int, nw: int, edge_prob_percent: int, max_a: int,
                       seed: int) -> Instance:
    """Two layers: children 0..nu-1, parents nu..nu+nw-1, each edge kept with
    probability edge_prob_percent/100. Isolated parents are allowed."""
    if nu < 1 or nw < 1:
        raise ModelError("both layers need at least one node")
    if not 0 <= edge_prob_percent <= 100:
        raise ModelError("edge_prob_percent must be in [0, 100]")
    if max_a < 0:
        raise ModelError("max_a must be non-negative")
    rng = SplitMix64(seed)
    n = nu + nw
    edges = []
    for u in range(nu):
        for t in range(nw):
            if rng.next_below(100) < edge_prob_percent:
                edges.append((u, nu + t))
    a = [rng.next_below(max_a + 1) for _ in range(n)]
    return Instance(n, edges, a)


@dataclass
class SetCoverSpec:
    """A set-cover instance: m sets over elements 1..n_elements, union covers all."""
    m: int
    n_elements: int
    sets: tuple

    def __post_init__(self):
        if self.m != len(self.sets):
            raise ModelError("m must match the number of sets")
        covered = set()
        for s in self.sets:
            for e in s:
                if not 1 <= e <= self.n_elements:
                    raise ModelError("element %r out of range" % (e,))
            covered.update(s)
        if covered != set(range(1, self.n_elements + 1)):
            raise ModelError("every element must belong to at least one set")

    def min_cover_size(self) -> int:
        """Smallest number of sets covering all elements, by exhaustive search."""
        universe = set(range(1, self.n_elements + 1))
        for size in range(self.m + 1):
            for mask in range(1 << self.m):
                if bin(mask).count("1") != size:
                    continue
                got = set()
                for i in range(self.m):
                    if mask >> i & 1:
                        got.update(self.sets[i])
                if got == universe:
                    return size
        raise ModelError("unreachable: spec invariant guarantees a cover")


def gen_setcover_instance(spec: SetCoverSpec) -> Instance:
    """Encode set cover as weighted smoothing on a bilayer graph.

    Set nodes v_1..v_m come first (a=1, w=1), element nodes u_1..u_n after
    (a=degree-1, w=m), with an edge v_i -> u_j whenever j is in S_i. Dropping
    x(v_i) to 0 corresponds to selecting S_i, so the weighted-l1 optimum equals
    the minimum cover size.
    """
    m, ne = spec.m, spec.n_elements
    n = m + ne
    edges = []
    deg = [0] * ne
    for i, s in enumerate(spec.sets):
        for e in sorted(set(s)):
            edges.append((i, m + e - 1))
            deg[e - 1] += 1
    a = [1] * m + [d - 1 for d in deg]
    w = [1] * m + [m] * ne
    return Instance(n, edges, a, w)


def figure1_instance() -> Instance:
    """Four-node chain-with-fork where the naive bottom-up pass scores 4 but
    the optimum is 2: root a=8, middle a=8, two leaves a=5."""
    return Instance(4, [(1, 0), (2, 1), (3, 1)], [8, 8, 5, 5])
