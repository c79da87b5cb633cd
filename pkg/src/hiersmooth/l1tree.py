"""Exact l1 smoothing on rooted trees.

Two solvers produce the same optimal objective:

* solve_l1_abstract: the reference formulation. Initialize bottom-up with
  x_v = max(a_v, sum of children), then repeatedly search for a downward path
  whose terminal can absorb a push with positive gain, and apply it.
* solve_l1_dfs: the production solver. A single DFS per improvement root
  carries the running pair (delta, eps) and commits pushes in place on the way
  down, which avoids re-walking the path for every push.

Weighted instances are handled by the dfs solver with staged entry deltas
(stage s of node v enters with delta = s - w_v so the root contributes s), and
by chain expansion into an equivalent unit-weight tree. Both routes give the
same objective, which the tests cross-check.

The dfs solver scales targets to integers and, when the compiled kernel is
importable and every intermediate fits comfortably in 64 bits, runs the hot
loop there; otherwise a pure-Python big-int path with identical semantics is
used. Both paths are iterative (explicit work stack), so path-shaped trees of
100k nodes do not hit the interpreter recursion limit.
"""

from dataclasses import dataclass, field

from .rational import Rat, ZERO, to_rat, lcm_of_denominators
from .model import Instance, ModelError, ShapeError, is_feasible, objective

try:
    from . import _pushcore
except ImportError:  # pragma: no cover - kernel not built
    _pushcore = None

# Sum of scaled targets above which the compiled int64 kernel is not used.
# Every intermediate (x values, eps, running totals) is bounded by n * S with
# S = sum of scaled targets, so S <= 2**40 keeps 100k-node solves safely
# inside 64 bits.
_KERNEL_LIMIT = 2 ** 40


class _Unbounded:
    """Distinguished 'no bound yet' eps value; min() treats it as +infinity."""
    __slots__ = ()

    def __repr__(self):
        return "INF"


INF = _Unbounded()


@dataclass
class PathParams:
    delta: int
    eps: object


@dataclass
class PushStats:
    pushes: int = 0
    total_pushed: object = 0
    dfs_visits: int = 0


@dataclass
class SolveReport:
    x: tuple
    objective_value: object
    stats: PushStats
    backend: str = "python"


def _params(x, a, w, delta_in, eps_in):
    """(delta, eps) after accounting for one more path node. eps_in None = unbounded.

    The returned eps is always finite: an improving node caps it at x - a, a
    worsening one at x (the non-negativity guard)."""
    if x > a:
        d = delta_in + w
        cap = x - a
    else:
        d = delta_in - w
        cap = x
    if eps_in is not None and eps_in < cap:
        cap = eps_in
    return d, cap


def set_params(x_i, a_i, w_i, delta_in, eps_in) -> PathParams:
    """Public form of the per-node path parameter update."""
    e = None if eps_in is INF else to_rat(eps_in)
    if e is not None and e < 0:
        raise ModelError("eps must be non-negative")
    d, cap = _params(to_rat(x_i), to_rat(a_i), int(w_i), int(delta_in), e)
    return PathParams(delta=d, eps=cap)


def _sub(eps_in, t):
    return None if eps_in is None else eps_in - t


def _push_search_core(children, a, w, x, root, delta0, eps0, stats, chk=None):
    """One push-search call rooted at `root`; mutates x, returns its total decrease.

    Iterative with an explicit frame stack. Works over plain ints or Rats;
    the only operations used are +, -, and comparisons.
    Frame layout: [node, delta_in, eps_in, pushed, next_child, delta, eps].
    """
    stack = [[root, delta0, eps0, 0, -1, 0, None]]
    ret = None
    have_ret = False
    while stack:
        f = stack[-1]
        u = f[0]
        if f[4] == -1:
            stats.dfs_visits += 1
            d, e = _params(x[u], a[u], w[u], f[1], f[2])
            if e == 0:
                stack.pop()
                ret = 0
                have_ret = True
                continue
            cs = 0
            for c in children[u]:
                cs += x[c]
            slack = x[u] - cs
            if d > 0 and slack > 0:
                l = e if e < slack else slack
                if chk is not None:
                    chk.on_commit(u, d, l, slack)
                x[u] -= l
                f[3] += l
                stats.pushes += 1
                stats.total_pushed += l
                d, e = _params(x[u], a[u], w[u], f[1], _sub(f[2], f[3]))
                if e == 0:
                    stack.pop()
                    ret = f[3]
                    have_ret = True
                    continue
            f[5], f[6] = d, e
            f[4] = 0
            have_ret = False
        elif have_ret:
            t = ret
            have_ret = False
            if t > 0:
                if chk is not None:
                    chk.on_absorb(u, t)
                x[u] -= t
                f[3] += t
                d, e = _params(x[u], a[u], w[u], f[1], _sub(f[2], f[3]))
                f[5], f[6] = d, e
                if e == 0:
                    stack.pop()
                    ret = f[3]
                    have_ret = True
                    continue
        i = f[4]
        kids = children[u]
        if i < len(kids):
            f[4] = i + 1
            stack.append([kids[i], f[5], f[6], 0, -1, 0, None])
        else:
            stack.pop()
            ret = f[3]
            have_ret = True
    return ret


def push_search(inst: Instance, x, u, delta=0, eps=INF):
    """Run one push-search over a copy of x; returns (new x, amount u decreased)."""
    if not inst.is_tree:
        raise ShapeError("push-search requires a tree")
    xs = [to_rat(v) for v in x]
    w = inst.w if inst.w is not None else (1,) * inst.n
    eps0 = None if eps is INF else to_rat(eps)
    if eps0 is not None and eps0 < 0:
        raise ModelError("eps must be non-negative")
    stats = PushStats()
    pushed = _push_search_core(inst.children, inst.a, w, xs, u, int(delta), eps0, stats)
    return tuple(xs), to_rat(pushed)


class _CheckedRun:
    """Per-push invariant verification, enabled by solve_l1_dfs(checked=True).

    Any breach raises AssertionError immediately; nothing is repaired."""

    def __init__(self, children, a, w, weighted):
        self.children = children
        self.a = a
        self.w = w
        self.weighted = weighted
        self.xref = None
        # the solver initializes x in post-order, so ancestors of the current
        # call root still hold placeholders; only sweep nodes marked ready
        self.ready = [False] * len(a)

    def begin_call(self, x, root, stage, wroot):
        self.xref = x
        self.before = list(x)
        self.root = root
        self.stage = stage
        self.wroot = wroot
        self.expected_gain = 0

    def on_commit(self, u, d, l, slack):
        assert l > 0, "committed push must be positive"
        assert d > 0, "committed push needs positive balance"
        assert l <= slack, "push exceeds terminal slack"
        assert self.xref[u] - l >= 0, "push would drive a value negative"
        if not self.weighted:
            assert d == 1, "unweighted committed path balance must be exactly 1"
        # entry delta at the root understates its weight by wroot - stage
        self.expected_gain += (d + self.wroot - self.stage) * l

    def on_absorb(self, u, t):
        x = self.xref
        assert t > 0
        assert x[u] - t >= 0, "absorption would drive a value negative"
        cs = 0
        for c in self.children[u]:
            cs += x[c]
        assert x[u] - t >= cs, "absorption would break local feasibility"

    def end_call(self, x):
        before = self.before
        a, w = self.a, self.w
        drop = 0
        for i in range(len(x)):
            assert x[i] <= before[i], "a value increased during a push-search"
            wi = w[i] if self.weighted else 1
            drop += wi * (abs(a[i] - before[i]) - abs(a[i] - x[i]))
        assert drop == self.expected_gain, "objective drop disagrees with committed gains"
        assert x[self.root] >= a[self.root], "active root fell below its target"
        for i in range(len(x)):
            if not self.ready[i]:
                continue
            assert x[i] >= 0
            cs = 0
            for c in self.children[i]:
                cs += x[c]
            assert x[i] >= cs, "feasibility lost after a push-search"


def _solve_dfs_python(children, post, a, w, weighted, chk=None):
    n = len(a)
    x = [0] * n
    stats = PushStats()
    for v in post:
        cs = 0
        for c in children[v]:
            cs += x[c]
        x[v] = a[v] if a[v] > cs else cs
        if chk is not None:
            chk.ready[v] = True
        if weighted:
            wv = w[v]
            for s in range(1, wv + 1):
                if x[v] <= a[v]:
                    break
                if chk is not None:
                    chk.begin_call(x, v, s, wv)
                _push_search_core(children, a, w, x, v, s - wv, None, stats, chk)
                if chk is not None:
                    chk.end_call(x)
        else:
            if x[v] > a[v]:
                if chk is not None:
                    chk.begin_call(x, v, 1, 1)
                _push_search_core(children, a, w, x, v, 0, None, stats, chk)
                if chk is not None:
                    chk.end_call(x)
    return x, stats


def solve_l1_dfs(inst: Instance, weighted=False, checked=False, backend="auto") -> SolveReport:
    """Optimal l1 smoothing on a tree via DFS push-search.

    backend: "auto" picks the compiled kernel when present and safe, "python"
    and "compiled" force a choice. checked=True enables per-push invariant
    assertions and implies the python path.
    """
    if not inst.is_tree:
        raise ShapeError("l1 solver requires a tree")
    if weighted and inst.w is None:
        raise ModelError("instance has no weights")
    if backend not in ("auto", "python", "compiled"):
        raise ModelError("unknown backend %r" % backend)
    n = inst.n
    w = tuple(inst.w) if weighted else (1,) * n
    scale = lcm_of_denominators(inst.a)
    a_int = [int(v * scale) for v in inst.a]
    post = inst.post_order()

    kernel_ok = (
        _pushcore is not None
        and not checked
        and sum(a_int) <= _KERNEL_LIMIT
        and sum(w) <= _KERNEL_LIMIT
    )
    if backend == "compiled" and not kernel_ok:
        if checked:
            raise ModelError("checked mode runs on the python backend")
        raise ModelError("compiled backend unavailable for this instance")
    use_kernel = kernel_ok and backend in ("auto", "compiled")

    if use_kernel:
        cstart = [0] * (n + 1)
        for i in range(n):
            cstart[i + 1] = cstart[i] + len(inst.children[i])
        cflat = [c for i in range(n) for c in inst.children[i]]
        xs, pushes, total, visits = _pushcore.solve_dfs(
            a_int, list(w), cstart, cflat, list(post), bool(weighted))
        stats = PushStats(pushes=pushes, total_pushed=Rat(total, scale),
                          dfs_visits=visits)
        used = "compiled"
    else:
        chk = _CheckedRun(inst.children, a_int, w, weighted) if checked else None
        xs, stats = _solve_dfs_python(inst.children, post, a_int, w, weighted, chk)
        stats.total_pushed = Rat(stats.total_pushed, scale)
        used = "python"

    x = tuple(Rat(v, scale) for v in xs)
    obj = objective(inst, x, "l1", weighted)
    return SolveReport(x=x, objective_value=obj, stats=stats, backend=used)


def push_path(inst: Instance, x, path, eps):
    """Apply one push of size eps along a downward path; returns (new x, gain).

    The head of the path drops by eps; each following node drops by whatever
    feasibility deficit its parent's decrease created, so a node with enough
    slack absorbs the push and everything below it stays untouched. gain is
    the unit-weight objective change over the path nodes (positive = better).
    """
    eps = to_rat(eps)
    if eps < 0:
        raise ModelError("eps must be non-negative")
    xs = [to_rat(v) for v in x]
    if len(xs) != inst.n:
        raise ModelError("assignment length mismatch")
    if not path:
        raise ModelError("empty path")
    for j in range(1, len(path)):
        if path[j] not in inst.children[path[j - 1]]:
            raise ModelError("not a downward path")
    old_cost = sum(abs(inst.a[j] - xs[j]) for j in path)
    dec = eps
    for pos, v in enumerate(path):
        if dec <= 0:
            break
        if xs[v] - dec < 0:
            raise ModelError("push would drive node %d negative" % v)
        xs[v] -= dec
        cs = 0
        for c in inst.children[v]:
            cs += xs[c]
        dec = cs - xs[v]
        if pos == len(path) - 1 and dec > 0:
            raise ModelError("path cannot absorb the push")
    new_cost = sum(abs(inst.a[j] - xs[j]) for j in path)
    return tuple(xs), old_cost - new_cost


def _find_improving_path(children, a, w, x, v, stats):
    """First DFS path from v whose terminal has positive slack and balance.

    Returns (path root-to-terminal, amount) or None. Children are explored in
    ascending id order; a node with eps 0 prunes its whole subtree."""
    stack = [(v, 0, None, -1)]
    entries = []
    while stack:
        u, d_in, e_in, pidx = stack.pop()
        stats.dfs_visits += 1
        d, e = _params(x[u], a[u], w[u], d_in, e_in)
        if e == 0:
            continue
        idx = len(entries)
        entries.append((u, pidx))
        cs = 0
        for c in children[u]:
            cs += x[c]
        slack = x[u] - cs
        if d > 0 and slack > 0:
            l = e if e < slack else slack
            path = []
            k = idx
            while k >= 0:
                path.append(entries[k][0])
                k = entries[k][1]
            path.reverse()
            return path, l
        for c in reversed(children[u]):
            stack.append((c, d, e, idx))
    return None


def improve_subtree_abstract(inst: Instance, x, v):
    """Apply improving pushes from v until none remains; returns the new x.

    Weights on the instance are ignored (this is the unit-weight reference)."""
    if not inst.is_tree:
        raise ShapeError("subtree improvement requires a tree")
    xs = [to_rat(q) for q in x]
    w = (1,) * inst.n
    stats = PushStats()
    _improve_abstract(inst.children, inst.a, w, xs, v, stats)
    return tuple(xs)


def _improve_abstract(children, a, w, x, v, stats, checked=False):
    while x[v] > a[v]:
        found = _find_improving_path(children, a, w, x, v, stats)
        if found is None:
            break
        path, l = found
        if checked:
            before = [x[j] for j in path]
            d, e = 0, None
            for j in path:
                d, e = _params(x[j], a[j], w[j], d, e)
            term = path[-1]
            cs = 0
            for c in children[term]:
                cs += x[c]
            assert d == 1, "accepted unit-weight path balance must be exactly 1"
            assert l > 0, "accepted push must be positive"
            assert l <= e, "push exceeds the path bottleneck"
            assert l <= x[term] - cs, "push exceeds terminal slack"
        # every node on the accepted path drops by the full amount; interior
        # nodes never had positive slack with positive balance, and the caps
        # folded into l keep all of them non-negative
        for j in path:
            x[j] -= l
        stats.pushes += 1
        stats.total_pushed += l
        if checked:
            drop = 0
            for k, j in enumerate(path):
                assert x[j] >= 0, "push drove a value negative"
                cs = 0
                for c in children[j]:
                    cs += x[c]
                assert x[j] >= cs, "feasibility lost on the pushed path"
                drop += abs(a[j] - before[k]) - abs(a[j] - x[j])
            assert drop == l, "unit-weight gain must equal the pushed amount"
            assert x[v] >= a[v], "active root fell below its target"


def solve_l1_abstract(inst: Instance, checked=False) -> SolveReport:
    """Reference l1 solver: bottom-up initialization plus explicit push paths.

    Unit weights only; much slower than solve_l1_dfs but structurally close to
    the definition of the problem, which makes it a good differential oracle.
    checked=True asserts the per-push invariants on every accepted path."""
    if not inst.is_tree:
        raise ShapeError("l1 solver requires a tree")
    n = inst.n
    w = (1,) * n
    x = [ZERO] * n
    stats = PushStats()
    for v in inst.post_order():
        cs = ZERO
        for c in inst.children[v]:
            cs += x[c]
        x[v] = inst.a[v] if inst.a[v] > cs else cs
        _improve_abstract(inst.children, inst.a, w, x, v, stats, checked)
    stats.total_pushed = to_rat(stats.total_pushed)
    xt = tuple(x)
    return SolveReport(x=xt, objective_value=objective(inst, xt, "l1", False),
                       stats=stats)


def expand_weighted(inst: Instance, cap=1_000_000):
    """Rewrite a weighted tree as a unit-weight tree of chains.

    Node i becomes a chain of w_i copies all carrying a_i; original children
    hang below the bottom copy and the parent edge leaves the top copy. Returns
    the new instance plus a per-node tuple of copy ids (bottom to top). The
    weighted objective on the original equals the unweighted objective here.
    """
    if inst.w is None:
        raise ModelError("instance has no weights")
    if not inst.is_tree:
        raise ShapeError("chain expansion requires a tree")
    total = sum(inst.w)
    if total > cap:
        raise ModelError("expansion needs %d nodes, above the cap %d" % (total, cap))
    node_map = []
    base = 0
    for i in range(inst.n):
        node_map.append(tuple(range(base, base + inst.w[i])))
        base += inst.w[i]
    edges = []
    a = [ZERO] * total
    for i in range(inst.n):
        chain = node_map[i]
        for q in chain:
            a[q] = inst.a[i]
        for k in range(len(chain) - 1):
            edges.append((chain[k], chain[k + 1]))
    for c, p in inst.edges:
        edges.append((node_map[c][-1], node_map[p][0]))
    return Instance(total, edges, a), tuple(node_map)
