"""Command-line front end.

Every subcommand prints JSON (``sweep`` prints CSV).  Numbers are rounded to
12 significant digits and keys are sorted, so repeated runs are
byte-identical.  Exit status: 0 on success, 1 on a domain error (reported as
``{"error": CODE, "message": ...}``), 2 on a usage error.
"""
import argparse
import csv
import io
import json
import sys

import numpy as np

from . import crosscheck, oracle
from .config import Caps
from .cost import (
    CostKind,
    InterceptorProfile,
    expected_cost,
    worst_case_cost,
)
from .equilibrium import (
    GameParams,
    tme_value,
    convert_payoff_to_cost,
    max_disjoint_analysis,
    phi,
    plateau_threshold,
    pou_report,
    tmecor_value,
)
from .errors import InvalidParams, PouLabError
from .graph import (
    canonical_graph_json,
    enumerate_st_paths,
    ensure_valid,
    graph_from_json,
    is_disjoint_paths_graph,
    mincut,
    prefix_table,
)
from .search import SearchConfig
from .strategy import expected_distinct, strategy_from_json, strategy_to_json

SIG_DIGITS = 12


def fmt(x):
    return float(f"{x:.{SIG_DIGITS}g}")


def clean(obj):
    """Round floats and turn numpy/tuple values into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt(float(obj))
    if isinstance(obj, CostKind):
        return obj.value
    return obj


def dumps(obj):
    return json.dumps(clean(obj), sort_keys=True)


def _read_json(path, what):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidParams(f"cannot read {what} {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        err = InvalidParams(f"{what} {path!r} is not valid JSON: {exc}")
        err.code = "INVALID_JSON"
        raise err from None


def load_graph(args):
    graph = graph_from_json(_read_json(args.graph, "graph"))
    ensure_valid(graph)
    return graph


def params_from(args, need_alpha=True):
    return GameParams(args.n, args.k, args.alpha if need_alpha else 1.0, args.cost)


def search_config(args):
    return SearchConfig(n_starts=args.n_starts, grid_resolution=args.resolution, n_jobs=args.threads)


def _path_json(paths):
    return [{"id": f"p{i}", "edges": list(p.edges), "length": p.length} for i, p in enumerate(paths, start=1)]


def _strategy_json(strategy, paths):
    return strategy_to_json(strategy, paths)


# -- subcommands ----------------------------------------------------------------


def cmd_validate(args, caps):
    g = load_graph(args)
    return {"valid": True, "vertices": len(g.vertices), "edges": len(g.edges)}


def cmd_paths(args, caps):
    g = load_graph(args)
    if args.emit_graph:
        return canonical_graph_json(g)
    paths = enumerate_st_paths(g, caps.paths)
    return {"count": len(paths), "paths": _path_json(paths)}


def cmd_analyze(args, caps):
    g = load_graph(args)
    paths = enumerate_st_paths(g, caps.paths)
    table = prefix_table(g)
    mc, cut = mincut(g)
    out = {
        "mincut": mc,
        "cut_edges": list(cut),
        "prefix_sums": list(table.sums),
        "prefix_paths": [[list(p.edges) for p in ps] for ps in table.path_sets],
        "paths": len(paths),
        "shortest": paths[0].length,
        "longest": max(p.length for p in paths),
        "disjoint_paths": is_disjoint_paths_graph(g),
    }
    if args.n is not None:
        th = plateau_threshold(g, args.n, args.k)
        out["plateau_threshold"] = th.threshold
        out["plateau_display_bound"] = th.display_bound
        out["limit"] = expected_distinct(mc, args.n)
    return out


def _load_strategy(args, g, caps):
    paths = enumerate_st_paths(g, caps.paths)
    return strategy_from_json(_read_json(args.strategy, "strategy"), paths), paths


def cmd_eval(args, caps):
    g = load_graph(args)
    params = params_from(args)
    strat, paths = _load_strategy(args, g, caps)
    if args.d:
        d = InterceptorProfile(tuple(args.d.split(",")))
        d.check(g)
        value = expected_cost(strat, d, params.alpha, params.kind, g, caps.support)
        return {"value": value, "interceptors": list(d.edges)}
    value, d = worst_case_cost(strat, params.alpha, params.k, params.kind, g, caps)
    return {"value": value, "best_response": list(d.edges)}


def cmd_best_response(args, caps):
    g = load_graph(args)
    params = params_from(args)
    strat, _ = _load_strategy(args, g, caps)
    value, d = worst_case_cost(strat, params.alpha, params.k, params.kind, g, caps)
    return {"best_response": list(d.edges), "value": value}


def cmd_tmecor(args, caps):
    g = load_graph(args)
    res = tmecor_value(g, params_from(args), caps)
    paths = enumerate_st_paths(g, caps.paths)
    witness = {f"p{paths.index(p) + 1}": x for p, x in zip(res.witness.paths, res.witness.probs) if x > 0}
    return {"tmecor": res.value, "witness": witness, "exact": res.exact}


def cmd_tme(args, caps):
    g = load_graph(args)
    params = params_from(args)
    tmecor = tmecor_value(g, params, caps)
    value, strat, method, lower = tme_value(g, params, search_config(args), caps, tmecor)
    paths = enumerate_st_paths(g, caps.paths)
    return {
        "tme": value, "method": method, "lower_bound": lower, "bracket_width": value - lower,
        "strategy": _strategy_json(strat, paths),
    }


def cmd_ru(args, caps):
    g = load_graph(args)
    params = params_from(args)
    table = prefix_table(g)
    pn, i_n = phi(table, params.alpha, params.k, params.n)
    p1, i_1 = phi(table, params.alpha, params.k, 1)
    return {
        "r_u": pn / p1, "phi_n": pn, "phi_1": p1, "prefix_n": i_n, "prefix_1": i_1,
        "limit": expected_distinct(table.mincut, params.n),
        "plateau_threshold": plateau_threshold(g, params.n, params.k).threshold,
    }


def cmd_pou(args, caps):
    g = load_graph(args)
    rep = pou_report(g, params_from(args), search_config(args), caps)
    paths = enumerate_st_paths(g, caps.paths)
    return {
        "pou": rep.pou, "tmecor": rep.tmecor_value, "tme": rep.tme_value, "tme_method": rep.tme_method,
        "tme_lower": rep.tme_lower, "bracket_width": rep.bracket_width, "r_u": rep.r_u,
        "bounds": rep.bounds, "diagnostics": rep.diagnostics,
        "strategy": _strategy_json(rep.tme_strategy, paths),
    }


def cmd_max_analysis(args, caps):
    g = load_graph(args)
    params = params_from(args).replace(kind=CostKind.MAX)
    rep = max_disjoint_analysis(g, params, search_config(args), caps)
    paths = enumerate_st_paths(g, caps.paths)
    return {
        "m1": rep.m1, "uniform_values": rep.uniform_values, "closed_forms": rep.closed_forms,
        "alpha0": rep.alpha0, "best_uniform": {"value": rep.best_uniform[0], "prefix": rep.best_uniform[1]},
        "tme": rep.tme.value, "tme_lower": rep.tme.lower, "improvement": rep.improvement,
        "strictly_improves": rep.strictly_improves(), "rearranged_value": rep.rearranged_value,
        "max_boundary": rep.boundary, "strategy": _strategy_json(rep.tme.strategy, paths),
    }


SWEEP_HEADER = ["alpha", "phi_n", "phi_1", "r_u", "tmecor", "tme_value", "pou", "simple_upper", "limit"]


def cmd_sweep(args, caps):
    g = load_graph(args)
    if args.steps < 1 or not 0 < args.alpha_from <= args.alpha_to:
        raise InvalidParams("sweep needs steps >= 1 and 0 < alpha-from <= alpha-to")
    table = prefix_table(g)
    mc = table.mincut
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    config = search_config(args)
    for a in np.linspace(args.alpha_from, args.alpha_to, args.steps):
        params = GameParams(args.n, args.k, float(a), args.cost)
        pn = phi(table, params.alpha, params.k, params.n)[0]
        p1 = phi(table, params.alpha, params.k, 1)[0]
        tmecor = tmecor_value(g, params, caps)
        tme = tme_value(g, params, config, caps, tmecor)[0]
        row = [a, pn, p1, pn / p1, tmecor.value, tme, tme / tmecor.value, min(mc, params.n),
               expected_distinct(mc, params.n)]
        writer.writerow([f"{float(x):.{SIG_DIGITS}g}" for x in row])
    return buf.getvalue()


def cmd_convert_payoff(args, caps):
    if args.payoff:
        obj = _read_json(args.payoff, "payoff")
        if not isinstance(obj, dict) or set(obj) != {"n", "payoff"}:
            raise InvalidParams('payoff JSON must be {"n": ..., "payoff": [...]}')
        n, u = int(obj["n"]), np.asarray(obj["payoff"], dtype=float)
    elif args.reference_m:
        n, u = args.n, oracle.reference_game(args.reference_m, args.n, args.k)
    else:
        raise InvalidParams("give --payoff FILE or --reference-m M")
    conv = convert_payoff_to_cost(u, n, args.resolution, caps)
    return {
        "t_correlated": conv.t_correlated, "t_uncorrelated": conv.t_uncorrelated,
        "pou_payoff": conv.pou_payoff, "pou_cost": conv.pou_cost,
        "cost_tmecor": conv.cost_tmecor, "cost_tme": conv.cost_tme, "cost": conv.cost,
    }


class SuiteFailed(PouLabError):
    code = "ORACLE_MISMATCH"


def cmd_oracle_check(args, caps):
    results = crosscheck.run_suite(seed=args.seed, quick=args.quick)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(oracle.junit_xml(results))
    failed = [r.name for r in results if not r.passed]
    summary = {"checks": len(results), "failures": failed, "passed": not failed}
    if failed:
        err = SuiteFailed(f"{len(failed)} oracle mismatches: {', '.join(failed)}")
        err.summary = summary
        raise err
    return summary


# -- parser -----------------------------------------------------------------------


def _add_graph(p):
    p.add_argument("--graph", required=True, help='graph JSON file, or "-" for stdin')


def _add_game(p, alpha=True, n_required=True):
    p.add_argument("--n", type=int, required=n_required, default=None, help="number of agents")
    p.add_argument("--k", type=int, default=1, help="number of interceptors")
    if alpha:
        p.add_argument("--alpha", type=float, required=True, help="cost per interceptor hit")
    p.add_argument("--cost", choices=["sum", "max"], default="sum")


def _add_search(p):
    p.add_argument("--n-starts", type=int, default=64)
    p.add_argument("--resolution", type=int, default=200, help="grid resolution for seeding")


def build_parser():
    parser = argparse.ArgumentParser(prog="pou-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=1, help="worker threads for multi-start search")
    parser.add_argument("--tol", type=float, default=1e-9, help="reporting tolerance")
    parser.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a graph")
    _add_graph(p)
    p = sub.add_parser("paths", help="list s-t paths")
    _add_graph(p)
    p.add_argument("--emit-graph", action="store_true", help="print the canonical graph JSON instead")
    p = sub.add_parser("analyze", help="mincut, prefix table and plateau threshold")
    _add_graph(p)
    _add_game(p, alpha=False, n_required=False)
    for name, helptext in [("eval", "expected cost of a strategy"), ("best-response", "interceptor best response")]:
        p = sub.add_parser(name, help=helptext)
        _add_graph(p)
        _add_game(p)
        p.add_argument("--strategy", required=True, help='strategy JSON {"marginals": [{"p1": x, ...}, ...]}')
        if name == "eval":
            p.add_argument("--d", help="comma-separated interceptor edges; default is the best response")
    for name, helptext in [("tmecor", "correlated team value"), ("tme", "uncorrelated team value"),
                           ("ru", "uniform price of uncorrelation"), ("pou", "full price-of-uncorrelation report"),
                           ("max-analysis", "uniform strategies under MAX on disjoint paths")]:
        p = sub.add_parser(name, help=helptext)
        _add_graph(p)
        _add_game(p)
        _add_search(p)
    p = sub.add_parser("sweep", help="CSV sweep over alpha")
    _add_graph(p)
    _add_game(p, alpha=False)
    _add_search(p)
    p.add_argument("--alpha-from", type=float, required=True)
    p.add_argument("--alpha-to", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p = sub.add_parser("convert-payoff", help="turn a team payoff game into a cost game")
    p.add_argument("--payoff", help='JSON {"n": agents, "payoff": nested table}')
    p.add_argument("--reference-m", type=int, help="use the reference interception game on m paths")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--resolution", type=int, default=1000)
    p = sub.add_parser("oracle-check", help="run the cross-validation suite")
    p.add_argument("--report", help="write a JUnit XML report here")
    p.add_argument("--quick", action="store_true", help="smaller suite")
    return parser


COMMANDS = {
    "validate": cmd_validate, "paths": cmd_paths, "analyze": cmd_analyze, "eval": cmd_eval,
    "best-response": cmd_best_response, "tmecor": cmd_tmecor, "tme": cmd_tme, "ru": cmd_ru,
    "pou": cmd_pou, "max-analysis": cmd_max_analysis, "sweep": cmd_sweep,
    "convert-payoff": cmd_convert_payoff, "oracle-check": cmd_oracle_check,
}


def run(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise InvalidParams("--threads must be positive")
        if not 0 < args.tol <= 1e-3:
            raise InvalidParams("--tol must lie in (0, 1e-3]")
        try:
            caps = Caps.from_env()
        except (ValueError, TypeError) as exc:
            raise InvalidParams(f"bad caps override: {exc}") from None
        out = COMMANDS[args.command](args, caps)
    except PouLabError as exc:
        payload = {"error": exc.code, "message": str(exc)}
        if getattr(exc, "summary", None):
            payload.update(exc.summary)
        stdout.write(dumps(payload) + "\n")
        return 1
    if isinstance(out, str):
        stdout.write(out if out.endswith("\n") else out + "\n")
    else:
        stdout.write(dumps(out) + "\n")
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
