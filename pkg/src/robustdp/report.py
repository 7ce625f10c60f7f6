"""Deterministic report serialization.

Reports are plain dicts rendered to canonical JSON: keys sorted, no
whitespace variation, floats emitted in shortest round-trip form (parsing
the text reproduces the exact bits), -inf as the string "-inf".  The
config hash is the sha256 of the canonical form of the parsed config, so
formatting differences in the file on disk do not change the hash.
"""

import hashlib
import json

from .extreal import NEG_INF


def _normalize(obj):
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, float):
        if obj == NEG_INF:
            return "-inf"
        return obj
    return obj


def canonical_json(obj):
    return json.dumps(_normalize(obj), sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def config_hash(cfg):
    return hashlib.sha256(canonical_json(cfg).encode("ascii")).hexdigest()


def format_value(v):
    """Render an extended-real for CSV output."""
    return "-inf" if v == NEG_INF else repr(float(v))


def policy_rows(policy):
    """Policy as sorted, serialization-friendly rows."""
    rows = []
    for (t, node, prefix), action in sorted(policy.actions.items()):
        rows.append({
            "depth": t,
            "node": node,
            "prefix": [list(a) for a in prefix],
            "action": list(action),
        })
    return rows


def solve_report(cfg, root_value, policy, policy_value, doubling_ok=None):
    rep = {
        "schema_version": 1,
        "command": "solve",
        "config_hash": config_hash(cfg),
        "root_value": root_value,
        "policy_value": policy_value,
        "policy": policy_rows(policy),
    }
    if doubling_ok is not None:
        rep["doubling_check"] = bool(doubling_ok)
    return rep


def oracle_report(cfg, oracle_value, solver_value, strategy):
    return {
        "schema_version": 1,
        "command": "oracle",
        "config_hash": config_hash(cfg),
        "oracle_value": oracle_value,
        "solver_value": solver_value,
        "abs_difference": (abs(oracle_value - solver_value)
                           if oracle_value != NEG_INF and solver_value != NEG_INF
                           else (0.0 if oracle_value == solver_value else NEG_INF)),
        "oracle_strategy": [[list(a) for a in row] for row in strategy],
    }


def na_check_report(cfg, rep):
    out = {
        "schema_version": 1,
        "command": "na-check",
        "config_hash": config_hash(cfg),
        "na_holds": rep.na_holds,
        "verdict": {True: "holds", False: "fails", None: "inconclusive"}[rep.na_holds],
        "method": rep.method,
        "strategies_checked": rep.n_checked,
        "unresolved": rep.n_unresolved,
        "notes": list(rep.notes),
    }
    if rep.witness is not None:
        out["witness"] = [[list(a) for a in row] for row in rep.witness]
    return out


def write_report(rep, out_path=None):
    text = canonical_json(rep) + "\n"
    if out_path is None or out_path == "-":
        return text
    with open(out_path, "w") as fh:
        fh.write(text)
    return text
