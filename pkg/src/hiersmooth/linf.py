"""l-infinity smoothing on arbitrary DAGs.

For a fixed deviation budget t the pointwise-minimal candidate is forced:
process children before parents and set x_i = max(0, sum of children, a_i - t).
That assignment is always feasible; it meets the budget iff no value was
dragged more than t above its target. Feasibility in t is monotone, so a
bisection between 0 and sum(a) (always feasible) finds the optimum to any
tolerance. The optimum can be fractional even for integer targets (a root at 0
with two unit leaves wants t = 2/3), hence the tolerance contract.
"""

from dataclasses import dataclass

from .rational import Rat, ZERO, to_rat
from .model import Instance, ModelError


@dataclass
class ThresholdResult:
    t: object
    x_min: tuple
    feasible_at_t: bool


def assign_for_threshold(inst: Instance, t) -> ThresholdResult:
    """Pointwise-minimal feasible assignment with every value >= its target - t."""
    t = to_rat(t)
    if t < 0:
        raise ModelError("threshold must be non-negative")
    x = [ZERO] * inst.n
    for v in inst.topo_order:
        s = ZERO
        for c in inst.children[v]:
            s += x[c]
        lo = inst.a[v] - t
        xv = s if s > lo else lo
        if xv < 0:
            xv = ZERO
        x[v] = xv
    feasible = all(x[i] - inst.a[i] <= t for i in range(inst.n))
    return ThresholdResult(t=t, x_min=tuple(x), feasible_at_t=feasible)


def default_linf_tol(inst: Instance):
    """2^-40 times the target total; collapses to 0 only for all-zero targets."""
    return sum(inst.a, ZERO) / Rat(2 ** 40)


def solve_linf(inst: Instance, tol=None):
    """Bisection on the deviation budget; returns (t_star, x).

    t_star is the feasible endpoint of the final bracket, so the true optimum
    lies within tol below it. t = 0 is tried first so already-feasible targets
    come back exact.
    """
    res0 = assign_for_threshold(inst, ZERO)
    if res0.feasible_at_t:
        return ZERO, res0.x_min
    if tol is None:
        tol = default_linf_tol(inst)
    else:
        tol = to_rat(tol)
    if tol <= 0:
        raise ModelError("tol must be positive")
    lo = ZERO
    hi = sum(inst.a, ZERO)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if assign_for_threshold(inst, mid).feasible_at_t:
            hi = mid
        else:
            lo = mid
    return hi, assign_for_threshold(inst, hi).x_min
