"""Approximate l1 smoothing on bilayer DAGs via a covering reduction.

On a two-layer instance the optimum fixes every parent at its target and only
lowers children, so the problem collapses to: choose decrements d_u in
[0, a_u] covering each parent's excess demand b_w = (sum of its children's
targets) - a_w, minimizing the total decrement. That covering LP is solved
approximately with multiplicative weights: keep a weight per demand row that
grows with its normalized deficit, repeatedly pick the proportionally worst
covered row, and route a small increment into the member column that helps
the most weight-deficient rows overall. Routing by total weight rather than
into an arbitrary member is what makes shared columns win (two rows {A,B} and
{B,C} with unit demands are covered by B alone, not by A plus C).

The loop runs in floats; the result is then clamped, topped up row by row in
exact rationals, and trimmed to a minimal cover, so the returned d is exactly
feasible and the float dust is charged against the eps budget.
"""

import math
from dataclasses import dataclass

from .rational import Rat, ZERO, to_rat
from .model import Instance, ModelError, ShapeError, objective
from .l1tree import PushStats, SolveReport


@dataclass
class CoveringLP:
    columns: tuple  # child-layer node ids, one column per node with a parent
    caps: tuple     # per-column box bound, the node's own target
    rows: tuple     # (parent node id, demand, tuple of member column indexes)


def reduce_bilayer(inst: Instance) -> CoveringLP:
    """Build the covering LP; parents whose demand is already met yield no row."""
    if not inst.is_bilayer:
        raise ShapeError("covering reduction requires a bilayer instance")
    col_of = {}
    columns = []
    for i in range(inst.n):
        if inst.parents[i]:
            col_of[i] = len(columns)
            columns.append(i)
    caps = tuple(inst.a[i] for i in columns)
    rows = []
    for p in range(inst.n):
        if not inst.children[p]:
            continue
        demand = inst.child_sum(inst.a, p) - inst.a[p]
        if demand > 0:
            rows.append((p, demand, tuple(col_of[c] for c in inst.children[p])))
    return CoveringLP(columns=tuple(columns), caps=caps, rows=tuple(rows))


def most_violated_constraint(lp: CoveringLP, d):
    """Index of the row with the smallest coverage/demand ratio, or None if
    every row is satisfied. One O(|members|) scan."""
    best = None
    best_ratio = None
    for r, (_, demand, members) in enumerate(lp.rows):
        cov = 0
        for j in members:
            cov += d[j]
        ratio = cov / demand
        if best_ratio is None or ratio < best_ratio:
            best_ratio = ratio
            best = r
    if best is None:
        return None
    _, demand, members = lp.rows[best]
    if sum(d[j] for j in members) >= demand:
        return None
    return best


def _col_rows(lp):
    col_rows = [[] for _ in lp.columns]
    for r, (_, _, members) in enumerate(lp.rows):
        for j in members:
            col_rows[j].append(r)
    return col_rows


def _mw_phase(lp: CoveringLP, eps: float):
    """Float multiplicative-weights loop; returns a d that covers every row up
    to float dust. Steps are a small fraction of the row demand so the weights
    can steer mass toward shared columns before anything saturates."""
    nrows = len(lp.rows)
    ncols = len(lp.columns)
    caps = [float(c) for c in lp.caps]
    dem = [float(b) for _, b, _ in lp.rows]
    members = [m for _, _, m in lp.rows]
    col_rows = _col_rows(lp)
    d = [0.0] * ncols
    cov = [0.0] * nrows
    step_frac = eps / 8.0
    eta = math.log(nrows + 2.0) / max(step_frac, 1e-9)
    weight = [math.exp(min(eta, 700.0))] * nrows

    def reweight(r):
        deficit = max(0.0, dem[r] - cov[r]) / dem[r]
        weight[r] = math.exp(min(eta * deficit, 700.0))

    max_iter = 64 * (nrows + ncols) + int(16.0 / step_frac) * nrows
    for _ in range(max_iter):
        worst = -1
        worst_ratio = 0.0
        for r in range(nrows):
            ratio = cov[r] / dem[r]
            if worst < 0 or ratio < worst_ratio:
                worst = r
                worst_ratio = ratio
        if worst_ratio >= 1.0 - 1e-12:
            break
        best_j = -1
        best_benefit = -1.0
        for j in members[worst]:
            if d[j] >= caps[j] - 1e-12:
                continue
            benefit = 0.0
            for s in col_rows[j]:
                if cov[s] < dem[s]:
                    benefit += weight[s]
            if benefit > best_benefit:
                best_benefit = benefit
                best_j = j
        if best_j < 0:
            break  # row only has saturated columns left; exact repair tops it up
        deficit = dem[worst] - cov[worst]
        step = min(caps[best_j] - d[best_j], deficit, step_frac * dem[worst])
        d[best_j] += step
        for s in col_rows[best_j]:
            cov[s] += step
            reweight(s)
    return d


def _exact_repair(lp: CoveringLP, d_float):
    """Clamp to boxes and top deficient rows up, in exact arithmetic."""
    d = []
    for j, cap in enumerate(lp.caps):
        v = to_rat(d_float[j])
        if v < 0:
            v = ZERO
        if v > cap:
            v = cap
        d.append(v)
    for _, demand, members in lp.rows:
        cov = ZERO
        for j in members:
            cov += d[j]
        need = demand - cov
        for j in members:
            if need <= 0:
                break
            room = lp.caps[j] - d[j]
            take = room if room < need else need
            if take > 0:
                d[j] += take
                need -= take
        if need > 0:
            raise ModelError("infeasible covering system")
    return d


def _trim(lp: CoveringLP, d):
    """Reduce columns as far as row slacks allow; repeats until minimal."""
    col_rows = _col_rows(lp)
    slack = []
    for _, demand, members in lp.rows:
        cov = ZERO
        for j in members:
            cov += d[j]
        slack.append(cov - demand)
    changed = True
    while changed:
        changed = False
        for j in range(len(d)):
            if d[j] <= 0:
                continue
            red = d[j]
            for s in col_rows[j]:
                if slack[s] < red:
                    red = slack[s]
            if red > 0:
                d[j] -= red
                for s in col_rows[j]:
                    slack[s] -= red
                changed = True
    return d


def solve_covering_mw(lp: CoveringLP, eps):
    """Feasible d with total within (1+eps) of the covering optimum."""
    eps = to_rat(eps)
    if not ZERO < eps <= 1:
        raise ModelError("eps must be in (0, 1]")
    ncols = len(lp.columns)
    if not lp.rows:
        return (ZERO,) * ncols
    for _, demand, members in lp.rows:
        capsum = ZERO
        for j in members:
            capsum += lp.caps[j]
        if capsum < demand:
            raise ModelError("infeasible covering system")
    d = _mw_phase(lp, float(eps))
    d = _exact_repair(lp, d)
    d = _trim(lp, d)
    return tuple(d)


def lift_solution(inst: Instance, d) -> SolveReport:
    """Turn a covering vector back into an assignment: children give up their
    decrement, parents sit exactly on their targets."""
    lp = reduce_bilayer(inst)
    if len(d) != len(lp.columns):
        raise ModelError("decrement vector length mismatch")
    d = [to_rat(v) for v in d]
    for j, cap in enumerate(lp.caps):
        if d[j] < 0 or d[j] > cap:
            raise ModelError("decrement outside its box at column %d" % j)
    for _, demand, members in lp.rows:
        cov = ZERO
        for j in members:
            cov += d[j]
        if cov < demand:
            raise ModelError("decrement vector does not cover every demand")
    x = list(inst.a)
    for j, node in enumerate(lp.columns):
        x[node] = inst.a[node] - d[j]
    xt = tuple(x)
    obj = objective(inst, xt, "l1", False)
    return SolveReport(x=xt, objective_value=obj, stats=PushStats())


def covering_optimum_exact(lp: CoveringLP):
    """Exact covering optimum via the rational simplex; verification only."""
    from .oracle import LPProblem, solve_simplex

    ncols = len(lp.columns)
    prob = LPProblem(ncols, [1] * ncols)
    for _, demand, members in lp.rows:
        prob.add_row({j: 1 for j in members}, ">=", demand)
    for j, cap in enumerate(lp.caps):
        prob.add_row({j: 1}, "<=", cap)
    return solve_simplex(prob).objective
