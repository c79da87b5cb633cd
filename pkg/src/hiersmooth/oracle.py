"""Ground-truth machinery: exact rational simplex, brute force, dual certificates.

The simplex is a dense two-phase tableau over exact rationals. It only ever
runs at desk scale (a few dozen variables), so simplicity and exactness beat
speed here; the combinatorial solvers carry the performance story.
"""

from dataclasses import dataclass

from .rational import Rat, ZERO, ONE, to_rat, is_integral
from .model import Instance, ModelError, ShapeError, is_feasible

_DEGENERATE_STALL = 30


class LPProblem:
    """min c.z subject to rows of (coeffs, rel, rhs); variables are non-negative."""

    def __init__(self, nvars, objective):
        if len(objective) != nvars:
            raise ModelError("objective length mismatch")
        self.nvars = nvars
        self.c = [to_rat(v) for v in objective]
        self.rows = []

    def add_row(self, coeffs, rel, rhs):
        if rel not in (">=", "<=", "=="):
            raise ModelError("unknown relation %r" % rel)
        row = {}
        for j, v in coeffs.items():
            if not 0 <= j < self.nvars:
                raise ModelError("row references unknown variable %d" % j)
            v = to_rat(v)
            if v != 0:
                row[j] = v
        self.rows.append((row, rel, to_rat(rhs)))


@dataclass
class SimplexResult:
    z: list
    objective: object
    duals: list  # one multiplier per input row


def solve_simplex(lp: LPProblem) -> SimplexResult:
    """Two-phase simplex with exact pivots; Dantzig pricing, Bland after stalls."""
    m = len(lp.rows)
    nstruct = lp.nvars
    # normalized rows with rhs >= 0; remember the sign flip to fix dual signs later
    rows = []
    for coeffs, rel, rhs in lp.rows:
        flipped = rhs < 0
        if flipped:
            coeffs = {j: -v for j, v in coeffs.items()}
            rhs = -rhs
            rel = {">=": "<=", "<=": ">=", "==": "=="}[rel]
        rows.append((coeffs, rel, rhs, flipped))

    ncols = nstruct
    slack_col = [None] * m
    slack_sign = [0] * m
    for i, (_, rel, _, _) in enumerate(rows):
        if rel in (">=", "<="):
            slack_col[i] = ncols
            slack_sign[i] = -1 if rel == ">=" else 1
            ncols += 1
    art_col = [None] * m
    for i, (_, rel, _, _) in enumerate(rows):
        if rel in (">=", "=="):
            art_col[i] = ncols
            ncols += 1

    T = [[ZERO] * ncols for _ in range(m)]
    rhs = [ZERO] * m
    basis = [0] * m
    for i, (coeffs, rel, b, _) in enumerate(rows):
        for j, v in coeffs.items():
            T[i][j] = v
        rhs[i] = b
        if slack_col[i] is not None:
            T[i][slack_col[i]] = Rat(slack_sign[i])
        if art_col[i] is not None:
            T[i][art_col[i]] = ONE
            basis[i] = art_col[i]
        else:
            basis[i] = slack_col[i]

    is_art = [False] * ncols
    for i in range(m):
        if art_col[i] is not None:
            is_art[art_col[i]] = True

    c2 = [ZERO] * ncols
    for j in range(nstruct):
        c2[j] = lp.c[j]
    # phase-1 reduced costs: c1 is 1 on artificials, and artificials start basic
    r1 = [ZERO] * ncols
    for j in range(ncols):
        if is_art[j]:
            continue
        s = ZERO
        for i in range(m):
            if art_col[i] is not None:
                s += T[i][j]
        r1[j] = -s
    r2 = list(c2)

    bland = [False]
    stall = [0]
    pivots = [0]
    limit = 2000 * (m + 2)

    def pivot(pi, pj, red_rows):
        pivots[0] += 1
        if pivots[0] > limit:
            raise RuntimeError("simplex pivot limit exceeded")
        prow = T[pi]
        pv = prow[pj]
        inv = ONE / pv
        for j in range(ncols):
            if prow[j] != 0:
                prow[j] *= inv
        rhs[pi] *= inv
        for i in range(m):
            if i == pi:
                continue
            f = T[i][pj]
            if f != 0:
                ri = T[i]
                for j in range(ncols):
                    if prow[j] != 0:
                        ri[j] -= f * prow[j]
                rhs[i] -= f * rhs[pi]
        for r in red_rows:
            f = r[pj]
            if f != 0:
                for j in range(ncols):
                    if prow[j] != 0:
                        r[j] -= f * prow[j]
        basis[pi] = pj

    def run_phase(r, allowed, other):
        while True:
            enter = -1
            if bland[0]:
                for j in range(ncols):
                    if allowed[j] and r[j] < 0:
                        enter = j
                        break
            else:
                best = ZERO
                for j in range(ncols):
                    if allowed[j] and r[j] < best:
                        best = r[j]
                        enter = j
            if enter < 0:
                return
            leave = -1
            best_ratio = None
            for i in range(m):
                t = T[i][enter]
                if t > 0:
                    ratio = rhs[i] / t
                    better = best_ratio is None or ratio < best_ratio
                    if not better and ratio == best_ratio:
                        # tie-breaks: evict artificials first, then lowest basis col
                        if is_art[basis[i]] and not is_art[basis[leave]]:
                            better = True
                        elif is_art[basis[i]] == is_art[basis[leave]] and basis[i] < basis[leave]:
                            better = True
                    if better:
                        best_ratio = ratio
                        leave = i
            if leave < 0:
                raise RuntimeError("unbounded LP")
            if best_ratio == 0:
                stall[0] += 1
                if stall[0] >= _DEGENERATE_STALL:
                    bland[0] = True
            else:
                stall[0] = 0
            pivot(leave, enter, (r, other))

    allowed1 = [True] * ncols
    run_phase(r1, allowed1, r2)
    obj1 = ZERO
    for i in range(m):
        if is_art[basis[i]]:
            obj1 += rhs[i]
    if obj1 != 0:
        raise ModelError("infeasible LP")
    # evict any artificial still basic (degenerately, at value 0)
    for i in range(m):
        if is_art[basis[i]]:
            for j in range(ncols):
                if not is_art[j] and T[i][j] != 0:
                    pivot(i, j, (r1, r2))
                    break

    allowed2 = [not is_art[j] for j in range(ncols)]
    stall[0] = 0
    run_phase(r2, allowed2, r1)

    z = [ZERO] * nstruct
    for i in range(m):
        if basis[i] < nstruct:
            z[basis[i]] = rhs[i]
    obj = ZERO
    for i in range(m):
        obj += c2[basis[i]] * rhs[i]

    duals = []
    for i in range(m):
        _, rel, _, flipped = rows[i]
        if rel == ">=":
            y = r2[slack_col[i]]
        elif rel == "<=":
            y = -r2[slack_col[i]]
        else:
            y = -r2[art_col[i]]
        duals.append(-y if flipped else y)
    return SimplexResult(z=z, objective=obj, duals=duals)


def _tree_l1_lp(inst: Instance, weighted: bool) -> LPProblem:
    """Variables x_0..x_{n-1}, d_0..d_{n-1}; rows per node: two deviation rows, one sum row."""
    n = inst.n
    cost = [ZERO] * n + [Rat(inst.w[i]) if weighted else ONE for i in range(n)]
    lp = LPProblem(2 * n, cost)
    for i in range(n):
        lp.add_row({i: 1, n + i: 1}, ">=", inst.a[i])
        lp.add_row({n + i: 1, i: -1}, ">=", -inst.a[i])
        row = {i: ONE}
        for c in inst.children[i]:
            row[c] = row.get(c, ZERO) - 1
        lp.add_row(row, ">=", 0)
    return lp


def _linf_lp(inst: Instance) -> LPProblem:
    """Variables x_0..x_{n-1} and the threshold t at column n; minimize t."""
    n = inst.n
    lp = LPProblem(n + 1, [ZERO] * n + [ONE])
    for i in range(n):
        lp.add_row({i: 1, n: 1}, ">=", inst.a[i])
        lp.add_row({n: 1, i: -1}, ">=", -inst.a[i])
        row = {i: ONE}
        for c in inst.children[i]:
            row[c] = row.get(c, ZERO) - 1
        lp.add_row(row, ">=", 0)
    return lp


@dataclass
class LPSolution:
    x: tuple
    objective: object
    norm: str
    weighted: bool
    _inst: Instance
    _result: SimplexResult

    def __iter__(self):
        return iter((self.x, self.objective))


def solve_lp_exact(inst: Instance, norm="l1", weighted=False) -> LPSolution:
    """Exact optimum of the smoothing LP on any DAG; returns (x, objective)."""
    if weighted:
        if norm != "l1":
            raise ModelError("weights only apply to the l1 objective")
        if inst.w is None:
            raise ModelError("instance has no weights")
    if norm == "l1":
        lp = _tree_l1_lp(inst, weighted)
    elif norm == "linf":
        lp = _linf_lp(inst)
    else:
        raise ModelError("unknown norm %r" % norm)
    res = solve_simplex(lp)
    x = tuple(res.z[:inst.n])
    return LPSolution(x=x, objective=res.objective, norm=norm, weighted=weighted,
                      _inst=inst, _result=res)


@dataclass
class DualCertificate:
    alpha: tuple
    beta: tuple

    def dual_objective(self, inst: Instance):
        total = ZERO
        for i in range(inst.n):
            total += inst.a[i] * self.beta[i]
        return total


def extract_dual(sol: LPSolution) -> DualCertificate:
    """Read the (alpha, beta) certificate off a solved unit-weight l1 tree LP."""
    if sol.norm != "l1" or sol.weighted:
        raise ModelError("dual certificates are defined for the unit-weight l1 LP")
    inst = sol._inst
    if not inst.is_tree:
        raise ShapeError("dual certificates require a tree")
    duals = sol._result.duals
    alpha = []
    beta = []
    for i in range(inst.n):
        lam = duals[3 * i]
        lam_p = duals[3 * i + 1]
        beta.append(lam - lam_p)
        alpha.append(duals[3 * i + 2])
    return DualCertificate(alpha=tuple(alpha), beta=tuple(beta))


def check_certificate(inst: Instance, x, cert: DualCertificate) -> bool:
    """Dual feasibility plus the four complementary slackness couplings.

    A feasible x passing this check has optimal l1 objective; zero duality gap
    follows from the conditions, no objective comparison needed.
    """
    if not inst.is_tree:
        raise ShapeError("certificate checking requires a tree")
    if len(x) != inst.n or len(cert.alpha) != inst.n or len(cert.beta) != inst.n:
        raise ModelError("length mismatch")
    if not is_feasible(inst, x):
        raise ModelError("x must be feasible")
    alpha, beta = cert.alpha, cert.beta
    for i in range(inst.n):
        if alpha[i] < 0 or beta[i] < -1 or beta[i] > 1:
            return False
        p = inst.parent[i]
        ap = alpha[p] if p >= 0 else ZERO
        resid = beta[i] + alpha[i] - ap
        if resid > 0:
            return False
        if x[i] > inst.a[i] and beta[i] != -1:
            return False
        if x[i] < inst.a[i] and beta[i] != 1:
            return False
        if x[i] > inst.child_sum(x, i) and alpha[i] != 0:
            return False
        if x[i] > 0 and resid != 0:
            return False
    return True


def brute_force_integral(inst: Instance, bound: int, weighted=False):
    """Exhaustive minimum over feasible integer assignments with x_v <= bound.

    Each node is additionally capped at its subtree target sum: truncating any
    feasible assignment to those sums keeps it feasible and never raises the
    cost, so an optimum inside the boxes always exists and values above them
    need no enumeration. Children are enumerated before parents so infeasible
    branches prune early; a product guard rejects hopeless search spaces.
    """
    if bound < 0:
        raise ModelError("bound must be non-negative")
    for v in inst.a:
        if not is_integral(v):
            raise ModelError("brute force needs integral targets")
    if weighted and inst.w is None:
        raise ModelError("instance has no weights")
    n = inst.n
    a = [int(v) for v in inst.a]
    sub = a[:]
    for v in inst.topo_order:
        for c in inst.children[v]:
            sub[v] += sub[c]
    cap = [min(bound, s) for s in sub]
    space = 1
    for v in range(n):
        space *= cap[v] + 1
        if space > 10 ** 8:
            raise ModelError("search-space guard exceeded")
    order = inst.topo_order
    w = inst.w if weighted else (1,) * n
    x = [0] * n
    best = [None, None]

    def rec(k, cost):
        if best[0] is not None and cost >= best[0]:
            return
        if k == n:
            best[0] = cost
            best[1] = tuple(x)
            return
        v = order[k]
        lo = sum(x[c] for c in inst.children[v])
        if lo > cap[v]:
            return
        for val in range(lo, cap[v] + 1):
            x[v] = val
            rec(k + 1, cost + w[v] * abs(a[v] - val))
        x[v] = 0

    rec(0, 0)
    if best[0] is None:
        raise ModelError("no feasible point under bound %d" % bound)
    return best[1], Rat(best[0])
