"""Command-line entry points.

Subcommands: solve, oracle, na-check, dump-values.  Reports go to stdout
or --out as canonical JSON (dump-values writes CSV); timing goes to
stderr only, so output files are bit-identical across runs and worker
counts.

Exit codes: 0 ok, 1 internal mismatch, 2 infeasible problem,
3 config validation failure, 4 enumeration budget exceeded,
5 inconclusive no-arbitrage verdict.
"""

import argparse
import csv
import io
import sys
import time

from .config import ValidationError, load_problem
from .config import preflight
from .integrand import GridConditionViolation
from .lattice import ConfigurationError
from .noarb import Inconclusive, na_report, require_conclusive
from .oracle import BudgetError, stopping_bruteforce, supinf_bruteforce
from .report import (format_value, na_check_report, oracle_report,
                     solve_report, write_report)
from .solver import (ConsistencyError, InfeasibleProblem, VALUE_TOL,
                     backward_induct, evaluate_policy, extract_policy, solve)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INFEASIBLE = 2
EXIT_VALIDATION = 3
EXIT_BUDGET = 4
EXIT_INCONCLUSIVE = 5


def _add_common(sub):
    sub.add_argument("config", help="path to a JSON problem config")
    sub.add_argument("--out", default=None, help="output file (default stdout)")
    sub.add_argument("--workers", type=int, default=None,
                     help="worker count hint (results are identical for any value)")
    sub.add_argument("--budget-strategies", type=int, default=None)
    sub.add_argument("--budget-selections", type=int, default=None)
    sub.add_argument("--figures", default=None, metavar="DIR",
                     help="also render figures into DIR")


def build_parser():
    ap = argparse.ArgumentParser(prog="robustdp",
                                 description="worst-case dynamic programming "
                                             "over ambiguity kernels")
    sp = ap.add_subparsers(dest="command", required=True)

    s = sp.add_parser("solve", help="run the backward recursion and extract a policy")
    _add_common(s)
    s.add_argument("--no-doubling-check", action="store_true",
                   help="skip the doubled-window invariance check")

    s = sp.add_parser("oracle", help="cross-check the solver against brute force")
    _add_common(s)

    s = sp.add_parser("na-check", help="no-arbitrage diagnostics")
    _add_common(s)
    s.add_argument("--horizon-mode", choices=("auto", "analytic", "numeric"),
                   default=None)

    s = sp.add_parser("dump-values", help="dump the full value field as CSV")
    _add_common(s)
    return ap


def _load(args):
    problem = load_problem(args.config)
    opts = problem.options
    if args.workers is not None:
        if args.workers < 1:
            raise ValidationError("workers must be >= 1")
        opts.workers = args.workers
    if args.budget_strategies is not None:
        opts.budget.max_strategies = args.budget_strategies
    if args.budget_selections is not None:
        opts.budget.max_selections = args.budget_selections
    if getattr(args, "no_doubling_check", False):
        opts.doubling_check = False
    if getattr(args, "horizon_mode", None) is not None:
        opts.horizon_mode = args.horizon_mode
    return problem


def _onpolicy_nodes(tree, fld, policy):
    """On-policy psi per node and the action taken there."""
    strat = policy.tree_strategy()
    values, actions = {}, {}
    prefix_of = [()]
    for t in range(tree.T):
        nxt = []
        for node in range(tree.n_nodes(t)):
            prefix = prefix_of[node]
            values[(t, node)] = fld.psi_at(t, node, prefix)
            a = strat[t][node]
            actions[(t, node)] = a
            for _ in range(tree.branching(t)):
                nxt.append(prefix + (a,))
        prefix_of = nxt
    for leaf in range(tree.n_leaves):
        values[(tree.T, leaf)] = fld.psi_at(tree.T, leaf, prefix_of[leaf])
    return values, actions


def _maybe_figures(args, tree, fld, policy):
    if args.figures is None:
        return
    from .plots import render_figures
    values, actions = _onpolicy_nodes(tree, fld, policy)
    for p in render_figures(tree, values, actions, args.figures):
        print("wrote %s" % p, file=sys.stderr)


def cmd_solve(args):
    problem = _load(args)
    tree, kernels, model = problem.tree, problem.kernels, problem.model
    preflight(problem)
    root, fld, policy = solve(tree, kernels, model)
    policy_value = evaluate_policy(tree, kernels, model, policy)
    doubling_ok = None
    if problem.options.doubling_check and hasattr(model, "with_window"):
        doubled = model.with_window(2 * model.window)
        root2, _ = backward_induct(tree, kernels, doubled)
        doubling_ok = abs(root2 - root) <= VALUE_TOL
        if not doubling_ok:
            print("warning: value moved under window doubling (%r -> %r); "
                  "the action window is too small" % (root, root2), file=sys.stderr)
    rep = solve_report(problem.config, root, policy, policy_value, doubling_ok)
    text = write_report(rep, args.out)
    if args.out is None:
        sys.stdout.write(text)
    _maybe_figures(args, tree, fld, policy)
    return EXIT_OK


def cmd_oracle(args):
    problem = _load(args)
    tree, kernels, model = problem.tree, problem.kernels, problem.model
    preflight(problem)
    root, fld, policy = solve(tree, kernels, model)
    if model.model_tag == "stopping":
        value, strategy = stopping_bruteforce(tree, kernels, model, problem.options.budget)
    else:
        value, strategy = supinf_bruteforce(tree, kernels, model, problem.options.budget)
    rep = oracle_report(problem.config, value, root, strategy)
    text = write_report(rep, args.out)
    if args.out is None:
        sys.stdout.write(text)
    _maybe_figures(args, tree, fld, policy)
    if abs(value - root) > VALUE_TOL:
        print("oracle mismatch: brute force %r vs recursion %r" % (value, root),
              file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_na_check(args):
    problem = _load(args)
    rep = na_report(problem.tree, problem.kernels, problem.model,
                    problem.options.budget, problem.options.horizon_mode)
    text = write_report(na_check_report(problem.config, rep), args.out)
    if args.out is None:
        sys.stdout.write(text)
    require_conclusive(rep)
    return EXIT_OK


def cmd_dump_values(args):
    problem = _load(args)
    tree, kernels, model = problem.tree, problem.kernels, problem.model
    preflight(problem)
    root, fld = backward_induct(tree, kernels, model)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "depth", "node", "prefix", "action", "value"])

    def fmt_actions(actions):
        return "|".join(",".join("%g" % c for c in a) for a in actions)

    for (t, node, prefix), v in sorted(fld.psi.items()):
        w.writerow(["psi", t, node, fmt_actions(prefix), "", format_value(v)])
    for (t, node, prefix, a), v in sorted(fld.phi.items()):
        w.writerow(["phi", t, node, fmt_actions(prefix),
                    ",".join("%g" % c for c in a), format_value(v)])
    text = buf.getvalue()
    if args.out is None or args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    if args.figures is not None:
        policy = extract_policy(fld)
        _maybe_figures(args, tree, fld, policy)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {
        "solve": cmd_solve,
        "oracle": cmd_oracle,
        "na-check": cmd_na_check,
        "dump-values": cmd_dump_values,
    }
    start = time.perf_counter()
    try:
        code = handlers[args.command](args)
    except (ValidationError, ConfigurationError, GridConditionViolation) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except InfeasibleProblem as exc:
        print("infeasible: %s" % exc, file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetError as exc:
        print("budget: %s" % exc, file=sys.stderr)
        return EXIT_BUDGET
    except Inconclusive as exc:
        print("inconclusive: %s" % exc, file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except ConsistencyError as exc:
        print("consistency: %s" % exc, file=sys.stderr)
        return EXIT_MISMATCH
    finally:
        print("elapsed: %.3fs" % (time.perf_counter() - start), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
