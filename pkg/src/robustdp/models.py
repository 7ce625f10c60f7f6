"""Model families: integer trading, semi-static books, stopping, liquidation,
and the resilient limit-order-book (Roch--Soner) impact model.

Every model is an Integrand over a ScenarioTree.  Actions are tuples of
floats carrying integer values; off-domain strategies evaluate to -inf
rather than raising.
"""

import itertools

from .extreal import NEG_INF
from .integrand import Integrand, action_key, flatten, make_utility
from .lattice import ConfigurationError

GAIN_TOL = 1e-12


def terminal_value(model, path, strategy):
    return model.value(path, strategy)


def _integer_window(radius, d):
    pts = [tuple(float(c) for c in p)
           for p in itertools.product(range(-radius, radius + 1), repeat=d)]
    return sorted(pts, key=action_key)


class _GainFormModel(Integrand):
    """Common machinery for payoffs U(x0 + <strategy, gain vector(path)>)."""

    unbounded_domain = True

    def __init__(self, tree, d, utility, x0):
        super().__init__(tree, d, utility.upper_bound)
        self.utility = utility
        self.x0 = float(x0)
        self._gain_cache = {}

    def gain_vector(self, path):
        g = self._gain_cache.get(path)
        if g is None:
            g = self._compute_gain(path)
            self._gain_cache[path] = g
        return g

    def _compute_gain(self, path):
        raise NotImplementedError

    def horizon_value(self, path, strategy):
        # unbounded-domain reading: no window truncation
        flat = flatten(strategy)
        gain = sum(a * b for a, b in zip(flat, self.gain_vector(path)))
        return self.utility(self.x0 + gain)

    def analytic_horizon(self, path, flat):
        gain = sum(a * b for a, b in zip(flat, self.gain_vector(path)))
        return 0.0 if gain >= -GAIN_TOL else NEG_INF

    def horizon_candidates(self, x, n):
        if all(c == 0.0 for c in x):
            return super().horizon_candidates(x, n)
        ks = sorted({n + 1, int(n * 1.25) + 1, int(n * 1.5) + 1,
                     2 * n, 3 * n, 4 * n, 8 * n, 16 * n})
        pts = {tuple(float(round(k * c)) for c in x) for k in ks}
        return sorted(pts)


class FrictionlessIntegerModel(_GainFormModel):
    """Integer positions in d risky assets, utility of terminal wealth."""

    model_tag = "frictionless"

    def __init__(self, tree, s0, utility, x0, window):
        if isinstance(s0, (int, float)):
            s0 = (float(s0),)
        else:
            s0 = tuple(float(c) for c in s0)
        if tree.outcome_dim != len(s0):
            raise ConfigurationError(
                "initial price dimension %d != outcome dimension %d"
                % (len(s0), tree.outcome_dim)
            )
        super().__init__(tree, len(s0), utility, x0)
        self.s0 = s0
        self.window = int(window)
        if self.window < 1:
            raise ConfigurationError("action window must be >= 1")
        self._actions = _integer_window(self.window, self.d)
        self._action_set = set(self._actions)

    def _compute_gain(self, path):
        blocks = []
        prev = self.s0
        for t in range(self.T):
            cur = path[t]
            blocks.append(tuple(c - p for c, p in zip(cur, prev)))
            prev = cur
        return flatten(blocks)

    def value(self, path, strategy):
        for a in strategy:
            if a not in self._action_set:
                return NEG_INF
        return self.horizon_value(path, strategy)

    def feasible_actions(self, t, prefix):
        return self._actions

    def period_actions(self, t):
        return self._actions

    def with_window(self, window):
        return FrictionlessIntegerModel(self.tree, self.s0, self.utility, self.x0, window)


class SemiStaticModel(_GainFormModel):
    """Dynamic integer stock positions plus a one-shot integer position in
    statically priced claims, folded into the period-0 action."""

    model_tag = "semi_static"

    def __init__(self, tree, s0, utility, x0, window, static_payoffs, static_window):
        if isinstance(s0, (int, float)):
            s0 = (float(s0),)
        else:
            s0 = tuple(float(c) for c in s0)
        if tree.outcome_dim != len(s0):
            raise ConfigurationError(
                "initial price dimension %d != outcome dimension %d"
                % (len(s0), tree.outcome_dim)
            )
        self.d_stock = len(s0)
        self.n_claims = len(static_payoffs)
        super().__init__(tree, self.d_stock + self.n_claims, utility, x0)
        self.s0 = s0
        self.window = int(window)
        self.static_window = int(static_window)
        payoffs = []
        for i, per_leaf in enumerate(static_payoffs):
            if len(per_leaf) != tree.n_leaves:
                raise ConfigurationError(
                    "static claim %d: %d payoffs for %d leaves"
                    % (i, len(per_leaf), tree.n_leaves)
                )
            payoffs.append(tuple(float(v) for v in per_leaf))
        self.static_payoffs = tuple(payoffs)
        h_window = _integer_window(self.window, self.d_stock)
        zeros = (0.0,) * self.n_claims
        if self.n_claims:
            g_window = _integer_window(self.static_window, self.n_claims)
            first = sorted((h + g for h in h_window for g in g_window), key=action_key)
        else:
            first = [h + zeros for h in h_window]
        self._first_actions = first
        self._later_actions = sorted((h + zeros for h in h_window), key=action_key)
        self._first_set = set(first)
        self._later_set = set(self._later_actions)

    def _compute_gain(self, path):
        leaf = self.tree.leaf_of_path(path)
        blocks = []
        prev = self.s0
        for t in range(self.T):
            cur = path[t]
            stock = tuple(c - p for c, p in zip(cur, prev))
            if t == 0:
                static = tuple(f[leaf] for f in self.static_payoffs)
            else:
                static = (0.0,) * self.n_claims
            blocks.append(stock + static)
            prev = cur
        return flatten(blocks)

    def value(self, path, strategy):
        if strategy[0] not in self._first_set:
            return NEG_INF
        for a in strategy[1:]:
            if a not in self._later_set:
                return NEG_INF
        return self.horizon_value(path, strategy)

    def feasible_actions(self, t, prefix):
        return self._first_actions if t == 0 else self._later_actions

    def period_actions(self, t):
        return self._first_actions if t == 0 else self._later_actions

    def with_window(self, window):
        return SemiStaticModel(self.tree, self.s0, self.utility, self.x0, window,
                               self.static_payoffs, self.static_window)


class StoppingModel(Integrand):
    """Optimal stopping encoded as decreasing 0/1 holdings.

    The stored strategy carries the free coordinates h_0..h_{T-1}; the
    endpoints h_{-1} = 1 and h_T = 0 are pinned, so the payoff collects
    exactly one reward G_tau along each path.
    """

    model_tag = "stopping"

    def __init__(self, tree, payoffs):
        if len(payoffs) != tree.T + 1:
            raise ConfigurationError(
                "stopping payoffs cover %d depths, expected %d" % (len(payoffs), tree.T + 1)
            )
        G = []
        finite = []
        for t, per_node in enumerate(payoffs):
            if len(per_node) != tree.n_nodes(t):
                raise ConfigurationError(
                    "stopping payoffs depth %d: %d values for %d nodes"
                    % (t, len(per_node), tree.n_nodes(t))
                )
            row = tuple(float(v) for v in per_node)
            G.append(row)
            finite.extend(v for v in row if v != NEG_INF)
        if not finite:
            raise ConfigurationError("stopping payoffs are -inf everywhere")
        super().__init__(tree, 1, max(finite))
        self.payoffs = tuple(G)
        self._zero = ((0.0,),)
        self._both = ((0.0,), (1.0,))

    def value(self, path, strategy):
        bits = []
        for a in strategy:
            if a not in self._both:
                return NEG_INF
            bits.append(int(a[0]))
        prev = 1
        for b in bits:
            if b > prev:
                return NEG_INF
            prev = b
        nodes = self.tree.nodes_on_path(self.tree.leaf_of_path(path))
        tau = stopping_time_of_bits(bits)
        return self.payoffs[tau][nodes[tau]]

    def feasible_actions(self, t, prefix):
        last = int(prefix[-1][0]) if prefix else 1
        return self._zero if last == 0 else self._both

    def period_actions(self, t):
        return self._both


def stopping_time_of_bits(bits):
    """tau = inf{t : h_t = 0}, with tau = T when the process never drops."""
    for t, b in enumerate(bits):
        if b == 0:
            return t
    return len(bits)


def bits_of_stopping_time(tau, T):
    if not 0 <= tau <= T:
        raise ConfigurationError("stopping time %d outside [0, %d]" % (tau, T))
    return tuple(1 if t < tau else 0 for t in range(T))


class LiquidationModel(Integrand):
    """Sell down an integer position of size M, fully liquidated by the
    last trading date; proceeds marked to market in gain form, optionally
    with resilient price impact."""

    model_tag = "liquidation"

    def __init__(self, tree, initial_position, s0, utility, x0, impact=None):
        if tree.outcome_dim != 1:
            raise ConfigurationError("liquidation model needs scalar prices")
        super().__init__(tree, 1, utility.upper_bound)
        self.M = int(initial_position)
        if self.M < 1:
            raise ConfigurationError("initial position must be a positive integer")
        self.s0 = float(s0)
        self.utility = utility
        self.x0 = float(x0)
        if impact is not None:
            kappa = float(impact["kappa"])
            if not 0.0 < kappa < 1.0:
                raise ConfigurationError("impact resilience must lie in (0, 1)")
            depth = _validate_depth_process(tree, impact["depth"])
            impact = (kappa, depth)
        self.impact = impact
        self._levels = {}

    def _holdings_levels(self, t):
        acts = self._levels.get(t)
        if acts is None:
            if t == self.T - 1:
                acts = ((0.0,),)
            else:
                acts = tuple((float(h),) for h in range(0, self.M + 1))
            self._levels[t] = acts
        return acts

    def value(self, path, strategy):
        prev = self.M
        holdings = []
        for t, a in enumerate(strategy):
            h = a[0]
            if h != int(h) or not 0 <= h <= prev:
                return NEG_INF
            holdings.append(int(h))
            prev = int(h)
        if holdings[-1] != 0:
            return NEG_INF
        if self.impact is None:
            gain = 0.0
            prev_price = self.s0
            for t in range(self.T):
                gain += holdings[t] * (path[t][0] - prev_price)
                prev_price = path[t][0]
            return self.utility(self.x0 + gain)
        kappa, depth = self.impact
        m_path = _depth_along_path(self.tree, depth, path)
        v = _impact_terminal_wealth(kappa, m_path, self.s0, path, holdings, self.M)
        return self.utility(self.x0 + v)

    def feasible_actions(self, t, prefix):
        prev = int(prefix[-1][0]) if prefix else self.M
        if t == self.T - 1:
            return ((0.0,),)
        return tuple((float(h),) for h in range(0, prev + 1))

    def period_actions(self, t):
        return self._holdings_levels(t)

    def analytic_horizon(self, path, flat):
        return 0.0 if all(c == 0.0 for c in flat) else NEG_INF


def _validate_depth_process(tree, depth):
    if len(depth) != tree.T + 1:
        raise ConfigurationError(
            "depth process covers %d periods, expected %d" % (len(depth), tree.T + 1)
        )
    rows = []
    for t, per_node in enumerate(depth):
        if len(per_node) != tree.n_nodes(t):
            raise ConfigurationError(
                "depth process at t=%d: %d values for %d nodes"
                % (t, len(per_node), tree.n_nodes(t))
            )
        row = tuple(float(v) for v in per_node)
        if any(v <= 0.0 for v in row):
            raise ConfigurationError("depth process must be strictly positive")
        rows.append(row)
    return tuple(rows)


def _depth_along_path(tree, depth, path):
    nodes = tree.nodes_on_path(tree.leaf_of_path(path))
    return [depth[t][nodes[t]] for t in range(tree.T + 1)]


def _impact_terminal_wealth(kappa, m_path, s0, path, holdings, h_init):
    ell = 0.0
    v = 0.0
    prev_price = s0
    prev_h = h_init
    for t in range(len(holdings)):
        h = holdings[t]
        price = path[t][0]
        ell_next = (1.0 - kappa) * ell + 2.0 * m_path[t + 1] * (h - prev_h)
        v = v + h * (price - prev_price) - kappa * ell * h \
            - (m_path[t + 1] - m_path[t]) * h * h
        ell = ell_next
        prev_price = price
        prev_h = h
    return v


class RochSonerModel(Integrand):
    """Resilient limit-order-book impact: price impact ell decays at rate
    kappa and is pushed by trades through the book depth process m."""

    model_tag = "roch_soner"

    def __init__(self, tree, kappa, depth, s0, utility, window):
        if tree.outcome_dim != 1:
            raise ConfigurationError("Roch-Soner model needs scalar prices")
        super().__init__(tree, 1, utility.upper_bound)
        self.kappa = float(kappa)
        if not 0.0 < self.kappa < 1.0:
            raise ConfigurationError("resilience must lie in (0, 1)")
        self.depth = _validate_depth_process(tree, depth)
        self.s0 = float(s0)
        self.utility = utility
        self.window = int(window)
        self._actions = _integer_window(self.window, 1)
        self._action_set = set(self._actions)

    def value(self, path, strategy):
        holdings = []
        for a in strategy:
            if a not in self._action_set:
                return NEG_INF
            holdings.append(int(a[0]))
        m_path = _depth_along_path(self.tree, self.depth, path)
        v = _impact_terminal_wealth(self.kappa, m_path, self.s0, path, holdings, 0)
        return self.utility(v)

    def feasible_actions(self, t, prefix):
        return self._actions

    def period_actions(self, t):
        return self._actions

    def analytic_horizon(self, path, flat):
        return 0.0 if all(c == 0.0 for c in flat) else NEG_INF

    def with_window(self, window):
        return RochSonerModel(self.tree, self.kappa, self.depth, self.s0,
                              self.utility, window)


def build_model(tree, spec):
    """Instantiate a model from a config fragment; unknown fields rejected."""
    spec = dict(spec)
    kind = spec.pop("type", None)
    try:
        if kind == "frictionless":
            utility = make_utility(spec.pop("utility", "exp"))
            model = FrictionlessIntegerModel(
                tree, spec.pop("s0"), utility, spec.pop("x0"), spec.pop("window"))
        elif kind == "semi_static":
            utility = make_utility(spec.pop("utility", "exp"))
            model = SemiStaticModel(
                tree, spec.pop("s0"), utility, spec.pop("x0"), spec.pop("window"),
                spec.pop("static_payoffs"), spec.pop("static_window"))
        elif kind == "stopping":
            model = StoppingModel(tree, spec.pop("payoffs"))
        elif kind == "liquidation":
            utility = make_utility(spec.pop("utility", "exp"))
            model = LiquidationModel(
                tree, spec.pop("initial_position"), spec.pop("s0"), utility,
                spec.pop("x0"), spec.pop("impact", None))
        elif kind == "roch_soner":
            utility = make_utility(spec.pop("utility", "exp"))
            model = RochSonerModel(
                tree, spec.pop("kappa"), spec.pop("depth"), spec.pop("s0"),
                utility, spec.pop("window"))
        else:
            raise ConfigurationError("unknown model type %r" % kind)
    except KeyError as exc:
        raise ConfigurationError("model %r missing field %s" % (kind, exc)) from exc
    if spec:
        raise ConfigurationError("unknown model fields: %s" % sorted(spec))
    return model
