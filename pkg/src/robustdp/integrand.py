"""Payoff functionals on grid-constrained strategy domains.

The strategy domain is a finite set of action vectors per period with a
verified positive minimum spacing, so payoffs are automatically
upper-semicontinuous and every supremum is a max over a finite set.
The horizon (recession) value of a payoff is its asymptotic growth rate
along rays; it is estimated numerically from the defining limit and,
for the registered model families, computed in closed form.
"""

import math

from .extreal import NEG_INF

GRID_TOL = 1e-12
HORIZON_TOL = 1e-6
DEFAULT_RADII_SCHEDULE = tuple(2 ** k for k in range(4, 27))


class GridConditionViolation(ValueError):
    """Strategy grid condition failed: some period has zero coordinate spacing."""


class NotAvailable(Exception):
    """No closed-form horizon registered for this payoff."""


class NotStabilizedError(Exception):
    """Numeric horizon estimate did not settle over the radii schedule."""

    def __init__(self, values):
        self.values = values
        super().__init__("horizon estimate not stabilized: tail %r" % (values[-3:],))


def _norm(vec):
    return math.sqrt(sum(c * c for c in vec))


def check_grid_condition(period_actions, declared_spacing=None):
    """Minimum per-period gap between distinct action vectors.

    Duplicate points collapse before the gap is taken; a period with a
    single distinct point gets spacing +inf.  Gaps at or below 1e-12, or
    a mismatch with a declared spacing, raise GridConditionViolation.
    """
    spacings = []
    for t, actions in enumerate(period_actions):
        distinct = sorted(set(tuple(a) for a in actions))
        gap = math.inf
        for i in range(len(distinct)):
            for j in range(i + 1, len(distinct)):
                diff = _norm([a - b for a, b in zip(distinct[i], distinct[j])])
                gap = min(gap, diff)
        if gap <= GRID_TOL:
            raise GridConditionViolation(
                "grid condition violated at period %d: coordinate spacing %r" % (t, gap)
            )
        spacings.append(gap)
    if declared_spacing is not None:
        for t, (got, want) in enumerate(zip(spacings, declared_spacing)):
            if not math.isinf(want) and abs(got - want) > GRID_TOL:
                raise GridConditionViolation(
                    "grid condition violated at period %d: computed spacing %r, declared %r"
                    % (t, got, want)
                )
    return spacings


class GridDomain:
    """Per-period finite action sets with verified grid condition."""

    def __init__(self, period_actions, declared_spacing=None):
        self.period_actions = [sorted(set(tuple(a) for a in acts)) for acts in period_actions]
        if not self.period_actions:
            raise GridConditionViolation("empty strategy domain")
        self.dim = len(self.period_actions[0][0])
        for t, acts in enumerate(self.period_actions):
            if any(len(a) != self.dim for a in acts):
                raise GridConditionViolation("period %d mixes action dimensions" % t)
            zero = (0.0,) * self.dim
            if zero not in acts:
                raise GridConditionViolation("period %d does not contain the zero action" % t)
        self.spacing = check_grid_condition(self.period_actions, declared_spacing)


def flatten(strategy):
    return tuple(c for action in strategy for c in action)


def unflatten(flat, d):
    return tuple(tuple(flat[i: i + d]) for i in range(0, len(flat), d))


def action_key(action):
    """Shared tie-break order: smallest Euclidean norm, then lexicographic."""
    return (sum(c * c for c in action), action)


class Integrand:
    """Extended-real terminal payoff with prefix-feasibility oracle.

    Subclasses fix the action dimension d, the horizon T (from the tree),
    the upper bound, the payoff formula and the feasible-action structure.
    """

    model_tag = None
    unbounded_domain = False

    def __init__(self, tree, d, upper_bound):
        self.tree = tree
        self.d = d
        self.T = tree.T
        self.upper_bound = upper_bound
        self._domain_cache = None

    def value(self, path, strategy):
        raise NotImplementedError

    def feasible_actions(self, t, prefix):
        raise NotImplementedError

    def period_actions(self, t):
        """Superset of actions ever feasible at period t (domain projection)."""
        raise NotImplementedError

    def grid_domain(self):
        return GridDomain([self.period_actions(t) for t in range(self.T)])

    def analytic_horizon(self, path, flat):
        """Closed-form horizon value, or None when not registered."""
        return None

    def horizon_value(self, path, strategy):
        """Payoff used by the numeric horizon estimator.

        Defaults to the ordinary payoff; unbounded-domain models override
        to drop the finite-window truncation.
        """
        return self.value(path, strategy)

    def enumerate_domain(self):
        """All full strategies in the domain, via the feasibility oracle."""
        if self._domain_cache is None:
            out = []

            def rec(t, prefix):
                if t == self.T:
                    out.append(prefix)
                    return
                for a in self.feasible_actions(t, prefix):
                    rec(t + 1, prefix + (a,))

            rec(0, ())
            self._domain_cache = out
        return self._domain_cache

    def horizon_candidates(self, x, n):
        """Flat points considered by the numeric estimator at radius n."""
        return [flatten(s) for s in self.enumerate_domain()]


def _bounded_zero_horizon(flat):
    return 0.0 if all(c == 0.0 for c in flat) else NEG_INF


def _admissible_delta_intervals(p, x, n):
    """Open delta-intervals with delta > n and |p - delta*x| < delta/n.

    Returned as (lo, hi) pairs, hi possibly +inf.
    """
    a2 = sum(c * c for c in x) - 1.0 / (n * n)
    b = sum(pc * xc for pc, xc in zip(p, x))
    c2 = sum(c * c for c in p)
    out = []
    if a2 > 0.0:
        disc = b * b - a2 * c2
        if disc > 0.0:
            root = math.sqrt(disc)
            lo = (b - root) / a2
            hi = (b + root) / a2
            lo = max(lo, float(n))
            if hi > lo:
                out.append((lo, hi))
    elif a2 == 0.0:
        if b > 0.0:
            out.append((max(float(n), c2 / (2.0 * b)), math.inf))
    else:
        # |x| < 1/n: the quadratic opens down, all large delta qualify.
        disc = b * b - a2 * c2
        root = math.sqrt(max(disc, 0.0))
        r_pos = (b - root) / a2  # nonnegative root
        out.append((max(float(n), r_pos), math.inf))
    return out


def _interval_sup(c, lo, hi):
    """sup of c/delta over the open interval (lo, hi)."""
    if c > 0.0:
        return c / lo
    if c < 0.0:
        return 0.0 if math.isinf(hi) else c / hi
    return 0.0


def horizon_numeric(integrand, path, x, schedule=DEFAULT_RADII_SCHEDULE):
    """Numeric horizon estimate from the defining limit.

    For each radius n, takes the sup of payoff(delta*y)/delta over
    delta > n and |y - x| < 1/n, with delta*y restricted to the finite
    candidate set.  The per-candidate inner sup over delta is exact.
    Declares the limit reached when two consecutive schedule values agree
    within 1e-6 or are both -inf; a stabilized value within 1e-6 of zero
    is reported as exactly 0.
    """
    xs = tuple(float(c) for c in x)
    values = []
    for n in schedule:
        best = NEG_INF
        for p in integrand.horizon_candidates(xs, n):
            c = integrand.horizon_value(path, unflatten(p, integrand.d))
            if c == NEG_INF:
                continue
            for lo, hi in _admissible_delta_intervals(p, xs, n):
                s = _interval_sup(c, lo, hi)
                if s > best:
                    best = s
        values.append(best)
        if len(values) >= 2:
            prev, cur = values[-2], values[-1]
            if prev == NEG_INF and cur == NEG_INF:
                return NEG_INF
            if prev != NEG_INF and cur != NEG_INF and abs(prev - cur) <= HORIZON_TOL:
                return 0.0 if abs(cur) <= HORIZON_TOL else cur
    raise NotStabilizedError(values)


def horizon_analytic(integrand, path, x):
    """Registered closed-form horizon value; NotAvailable if untagged."""
    flat = tuple(float(c) for c in x)
    val = integrand.analytic_horizon(path, flat)
    if val is None:
        raise NotAvailable(integrand.model_tag)
    return val


class BoundedExpUtility:
    """U(v) = 1 - exp(-v): continuous, bounded above by 1."""

    name = "exp"
    upper_bound = 1.0

    def __call__(self, v):
        if v < -700.0:
            # exp overflow region; the true value is below float range
            return NEG_INF
        return 1.0 - math.exp(-v)


class CappedLogUtility:
    """U(v) = min(log v, cap) on v > 0, -inf otherwise."""

    name = "capped_log"

    def __init__(self, cap):
        self.cap = float(cap)
        self.upper_bound = self.cap

    def __call__(self, v):
        if v <= 0.0:
            return NEG_INF
        return min(math.log(v), self.cap)


class CappedPowerUtility:
    """U(v) = min(v**exponent, cap) on v > 0, -inf otherwise."""

    name = "capped_power"

    def __init__(self, exponent, cap):
        if not 0.0 < exponent < 1.0:
            raise ValueError("power utility exponent must lie in (0, 1)")
        self.exponent = float(exponent)
        self.cap = float(cap)
        self.upper_bound = self.cap

    def __call__(self, v):
        if v <= 0.0:
            return NEG_INF
        return min(v ** self.exponent, self.cap)


def make_utility(spec):
    """Build a utility from a config fragment (name string or mapping)."""
    if isinstance(spec, str):
        spec = {"name": spec}
    name = spec.get("name")
    if name == "exp":
        extra = set(spec) - {"name"}
        if extra:
            raise ValueError("unknown utility fields: %s" % sorted(extra))
        return BoundedExpUtility()
    if name == "capped_log":
        extra = set(spec) - {"name", "cap"}
        if extra:
            raise ValueError("unknown utility fields: %s" % sorted(extra))
        return CappedLogUtility(spec["cap"])
    if name == "capped_power":
        extra = set(spec) - {"name", "cap", "exponent"}
        if extra:
            raise ValueError("unknown utility fields: %s" % sorted(extra))
        return CappedPowerUtility(spec["exponent"], spec["cap"])
    raise ValueError("unknown utility %r" % name)
