import pytest
from hypothesis import settings

from hiersmooth import (Instance, gen_random_bilayer, gen_random_tree,
                        solve_lp_exact)
from hiersmooth.gen import SplitMix64
from hiersmooth.rational import Rat

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


def random_dag(n, seed, edge_prob_percent=40, max_a=10):
    """Random DAG on n nodes; edges always point child -> higher id."""
    rng = SplitMix64(seed)
    edges = []
    for c in range(n):
        for p in range(c + 1, n):
            if rng.next_below(100) < edge_prob_percent:
                edges.append((c, p))
    a = [Rat(rng.next_below(max_a + 1)) for _ in range(n)]
    return Instance(n, edges, a)


def path_tree(n, seed, max_a=10):
    rng = SplitMix64(seed)
    edges = [(i, i - 1) for i in range(1, n)]
    a = [rng.next_below(max_a + 1) for _ in range(n)]
    return Instance(n, edges, a)


@pytest.fixture(scope="session")
def tree_corpus():
    return [gen_random_tree(1 + s % 12, 10, s) for s in range(200)]


@pytest.fixture(scope="session")
def weighted_corpus():
    return [gen_random_tree(1 + s % 12, 10, s, weighted=True, max_w=4)
            for s in range(1000, 1050)]


@pytest.fixture(scope="session")
def bilayer_corpus():
    out = []
    for seed in range(100):
        nu = 1 + seed % 5
        nw = 1 + (seed // 5) % 5
        out.append(gen_random_bilayer(nu, nw, 40 + seed % 31, 1 + seed % 8, seed))
    return out


@pytest.fixture(scope="session")
def lp_cache():
    """Memoized exact LP solves; Instance is hashable so it keys directly."""
    cache = {}

    def get(inst, norm="l1", weighted=False):
        key = (inst, norm, weighted)
        if key not in cache:
            cache[key] = solve_lp_exact(inst, norm=norm, weighted=weighted)
        return cache[key]

    return get
