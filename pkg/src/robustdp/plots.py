"""Figure rendering for solve reports.

Draws the scenario lattice with on-policy node values and the chosen
actions; files are written next to the delimited output.  Uses the Agg
backend so rendering works headless.
"""

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .extreal import NEG_INF


def _layout(tree):
    """x = depth, y = node index spread symmetrically per depth."""
    pos = {}
    for t in range(tree.T + 1):
        n = tree.n_nodes(t)
        for node in range(n):
            y = node - (n - 1) / 2.0
            pos[(t, node)] = (float(t), y)
    return pos


def _draw_edges(ax, tree, pos):
    for t in range(tree.T):
        for node in range(tree.n_nodes(t)):
            x0, y0 = pos[(t, node)]
            for j in range(tree.branching(t)):
                x1, y1 = pos[(t + 1, tree.child(t, node, j))]
                ax.plot([x0, x1], [y0, y1], color="0.8", lw=0.8, zorder=1)


def plot_value_tree(tree, node_values, out_path, title="on-policy worst-case value"):
    """node_values: {(t, node): extended-real value}."""
    pos = _layout(tree)
    fig, ax = plt.subplots(figsize=(1.8 * (tree.T + 1) + 2, 4))
    _draw_edges(ax, tree, pos)
    xs, ys, cs = [], [], []
    for (t, node), (x, y) in pos.items():
        v = node_values.get((t, node))
        if v is None:
            continue
        xs.append(x)
        ys.append(y)
        cs.append(v if v != NEG_INF else float("nan"))
        label = "-inf" if v == NEG_INF else "%.4g" % v
        ax.annotate(label, (x, y), textcoords="offset points", xytext=(0, 7),
                    ha="center", fontsize=7)
    sc = ax.scatter(xs, ys, c=cs, cmap="viridis", s=40, zorder=2, plotnonfinite=True)
    fig.colorbar(sc, ax=ax, shrink=0.8)
    ax.set_xlabel("period")
    ax.set_yticks([])
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def plot_policy(tree, node_actions, out_path, title="policy actions"):
    """node_actions: {(t, node): action tuple} for decision depths."""
    pos = _layout(tree)
    fig, ax = plt.subplots(figsize=(1.8 * (tree.T + 1) + 2, 4))
    _draw_edges(ax, tree, pos)
    xs, ys, norms = [], [], []
    for (t, node), action in sorted(node_actions.items()):
        x, y = pos[(t, node)]
        xs.append(x)
        ys.append(y)
        norms.append(sum(c * c for c in action) ** 0.5)
        label = ",".join("%g" % c for c in action)
        ax.annotate("(%s)" % label, (x, y), textcoords="offset points",
                    xytext=(0, 7), ha="center", fontsize=7)
    sc = ax.scatter(xs, ys, c=norms, cmap="plasma", s=40, zorder=2)
    fig.colorbar(sc, ax=ax, shrink=0.8, label="|action|")
    ax.set_xlabel("period")
    ax.set_yticks([])
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def render_figures(tree, node_values, node_actions, outdir, stem="report"):
    import os
    paths = []
    p1 = os.path.join(outdir, "%s_values.png" % stem)
    plot_value_tree(tree, node_values, p1)
    paths.append(p1)
    p2 = os.path.join(outdir, "%s_policy.png" % stem)
    plot_policy(tree, node_actions, p2)
    paths.append(p2)
    return paths
