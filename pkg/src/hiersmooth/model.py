"""Instance model: parsing, shape classification, traversals, feasibility, objectives.

Edges are written child -> parent, both in files and in the Instance.edges
tuples. The constraint at node v is x_v >= sum of x over the children of v.
Getting the edge direction backwards is the most common input mistake, so the
file format section of the README repeats this warning.
"""

from dataclasses import dataclass
from typing import Optional

from .rational import Rat, ZERO, to_rat, rat_str


class ModelError(ValueError):
    """Base for modelling errors."""


class ParseError(ModelError):
    """Malformed instance text."""


class ShapeError(ModelError):
    """Instance shape does not match what a solver supports."""


class Instance:
    """Immutable problem instance: n nodes, child->parent edges, targets a, optional weights w.

    Derived structure (children lists, parent lists, shape booleans, kind tag)
    is computed once at construction. kind uses the precedence tree > bilayer >
    dag; the independent booleans is_tree / is_bilayer are what solvers gate on,
    since for example a star is both a tree and a bilayer graph.
    """

    def __init__(self, n, edges, a, w=None):
        if n < 1:
            raise ModelError("instance needs at least one node")
        a = tuple(to_rat(v) for v in a)
        if len(a) != n:
            raise ModelError("a must have length n")
        for i, v in enumerate(a):
            if v < 0:
                raise ModelError("negative target at node %d" % i)
        if w is not None:
            w = tuple(int(x) for x in w)
            if len(w) != n:
                raise ModelError("w must have length n")
            if any(x < 1 for x in w):
                raise ModelError("weights must be positive integers")
        edges = tuple((int(c), int(p)) for c, p in edges)
        seen = set()
        for c, p in edges:
            if not (0 <= c < n and 0 <= p < n):
                raise ModelError("edge (%d,%d) references unknown node" % (c, p))
            if (c, p) in seen:
                raise ModelError("duplicate edge (%d,%d)" % (c, p))
            seen.add((c, p))
        self.n = n
        self.edges = edges
        self.a = a
        self.w = w

        children = [[] for _ in range(n)]
        parents = [[] for _ in range(n)]
        for c, p in edges:
            children[p].append(c)
            parents[c].append(p)
        self.children = tuple(tuple(sorted(cs)) for cs in children)
        self.parents = tuple(tuple(sorted(ps)) for ps in parents)

        self.topo_order = self._toposort()  # raises on cycles

        roots = tuple(i for i in range(n) if not parents[i])
        self.roots = roots
        self.is_tree = len(roots) == 1 and all(len(ps) <= 1 for ps in parents)
        # bilayer: no node is both somebody's parent and somebody's child
        self.is_bilayer = all(not (children[i] and parents[i]) for i in range(n))
        if self.is_tree:
            self.kind = "tree"
        elif self.is_bilayer:
            self.kind = "bilayer"
        else:
            self.kind = "dag"
        self.root = roots[0] if self.is_tree else None
        # parent id per node for trees, -1 at the root
        self.parent = tuple(ps[0] if ps else -1 for ps in self.parents) if self.is_tree else None

    def _toposort(self):
        """Topological order of the child->parent relation: children first."""
        n = self.n
        indeg = [len(self.children[i]) for i in range(n)]
        queue = [i for i in range(n) if indeg[i] == 0]
        order = []
        while queue:
            nxt = []
            for v in queue:
                order.append(v)
                for p in self.parents[v]:
                    indeg[p] -= 1
                    if indeg[p] == 0:
                        nxt.append(p)
            queue = nxt
        if len(order) != n:
            raise ModelError("cycle detected")
        return tuple(order)

    def post_order(self):
        """Tree post-order (children before parents, child ids ascending)."""
        if not self.is_tree:
            raise ShapeError("post-order requires a tree")
        order = []
        stack = [(self.root, False)]
        while stack:
            u, done = stack.pop()
            if done:
                order.append(u)
            else:
                stack.append((u, True))
                for c in reversed(self.children[u]):
                    stack.append((c, False))
        return tuple(order)

    def child_sum(self, x, v):
        s = ZERO
        for c in self.children[v]:
            s += x[c]
        return s

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.n, self.edges, self.a, self.w) == (other.n, other.edges, other.a, other.w)

    def __hash__(self):
        return hash((self.n, self.edges, self.a, self.w))

    def __repr__(self):
        return "Instance(n=%d, kind=%s)" % (self.n, self.kind)


@dataclass
class ShapeReport:
    kind: str
    topo_order: tuple
    post_order: Optional[tuple]
    root: Optional[int]


def validate(inst: Instance) -> ShapeReport:
    """Classify the instance shape; never rejects, solvers do that at call time."""
    return ShapeReport(
        kind=inst.kind,
        topo_order=inst.topo_order,
        post_order=inst.post_order() if inst.is_tree else None,
        root=inst.root,
    )


def parse_instance(source) -> Instance:
    """Parse the native instance format (see README) from a string or file object."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = source
    lines = text.splitlines()
    items = []  # (lineno, tokens)
    for no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            items.append((no, line.split()))

    def fail(no, msg):
        raise ParseError("line %d: %s" % (no, msg))

    if not items:
        raise ParseError("empty instance file")
    no, tok = items[0]
    if tok != ["sbhsp", "1"]:
        fail(no, "expected header 'sbhsp 1'")
    if len(items) < 2 or items[1][1][0] != "nodes":
        fail(items[1][0] if len(items) > 1 else no, "expected 'nodes <N>'")
    no, tok = items[1]
    if len(tok) != 2:
        fail(no, "expected 'nodes <N>'")
    try:
        n = int(tok[1])
    except ValueError:
        fail(no, "node count is not an integer")
    if n < 1:
        fail(no, "node count must be at least 1")

    a = [None] * n
    w = [None] * n
    any_w = False
    edges = []
    for no, tok in items[2:]:
        if tok[0] == "node":
            if len(tok) not in (3, 4):
                fail(no, "expected 'node <id> a=<rational> [w=<int>]'")
            try:
                i = int(tok[1])
            except ValueError:
                fail(no, "node id is not an integer")
            if not 0 <= i < n:
                fail(no, "node id %s out of range" % tok[1])
            if a[i] is not None:
                fail(no, "duplicate node id %d" % i)
            if not tok[2].startswith("a="):
                fail(no, "expected a=<rational>")
            try:
                av = to_rat(tok[2][2:])
            except (ValueError, ZeroDivisionError):
                fail(no, "bad rational %r" % tok[2][2:])
            if av < 0:
                fail(no, "negative target at node %d" % i)
            a[i] = av
            if len(tok) == 4:
                if not tok[3].startswith("w="):
                    fail(no, "expected w=<positive-int>")
                try:
                    wv = int(tok[3][2:])
                except ValueError:
                    fail(no, "weight is not an integer")
                if wv < 1:
                    fail(no, "weight must be a positive integer")
                w[i] = wv
                any_w = True
        elif tok[0] == "edge":
            if len(tok) != 3:
                fail(no, "expected 'edge <child-id> <parent-id>'")
            try:
                c, p = int(tok[1]), int(tok[2])
            except ValueError:
                fail(no, "edge endpoints must be integers")
            if not (0 <= c < n and 0 <= p < n):
                fail(no, "edge (%d,%d) references unknown node" % (c, p))
            edges.append((c, p))
        else:
            fail(no, "unknown directive %r" % tok[0])
    missing = [i for i in range(n) if a[i] is None]
    if missing:
        raise ParseError("missing node line for id %d" % missing[0])
    if any_w:
        w = [1 if x is None else x for x in w]
    else:
        w = None
    try:
        return Instance(n, edges, a, w)
    except ModelError as exc:
        raise ParseError(str(exc)) from exc


def serialize_instance(inst: Instance) -> str:
    """Canonical text form; parse(serialize(inst)) == inst."""
    out = ["sbhsp 1", "nodes %d" % inst.n]
    for i in range(inst.n):
        line = "node %d a=%s" % (i, rat_str(inst.a[i]))
        if inst.w is not None:
            line += " w=%d" % inst.w[i]
        out.append(line)
    for c, p in inst.edges:
        out.append("edge %d %d" % (c, p))
    return "\n".join(out) + "\n"


def is_feasible(inst: Instance, x) -> bool:
    """True iff x >= 0 everywhere and every node dominates the sum of its children."""
    if len(x) != inst.n:
        raise ModelError("assignment length mismatch")
    for i in range(inst.n):
        if x[i] < 0:
            return False
    for v in range(inst.n):
        if x[v] < inst.child_sum(x, v):
            return False
    return True


def objective(inst: Instance, x, norm="l1", weighted=False):
    """Distance from the targets: sum |a-x| (l1, optionally weighted) or max |a-x| (linf)."""
    if len(x) != inst.n:
        raise ModelError("assignment length mismatch")
    if weighted:
        if norm != "l1":
            raise ModelError("weights only apply to the l1 objective")
        if inst.w is None:
            raise ModelError("instance has no weights")
    if norm == "l1":
        total = ZERO
        for i in range(inst.n):
            dev = abs(inst.a[i] - x[i])
            total += inst.w[i] * dev if weighted else dev
        return total
    if norm == "linf":
        best = ZERO
        for i in range(inst.n):
            dev = abs(inst.a[i] - x[i])
            if dev > best:
                best = dev
        return best
    raise ModelError("unknown norm %r" % norm)


def solution_text(x, objective_value) -> str:
    """Solution output: one 'x <id> <rational>' line per node, then the objective."""
    lines = ["x %d %s" % (i, rat_str(v)) for i, v in enumerate(x)]
    lines.append("objective %s" % rat_str(objective_value))
    return "\n".join(lines) + "\n"
