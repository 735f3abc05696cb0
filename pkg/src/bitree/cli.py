"""bitree command line: every module as a subcommand, text tables or --json."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from typing import Optional

from . import __version__
from .bigraph import GraphError, canonical_key, parse_bmat, serialize_bmat, to_dot
from .embed import ContractError, constructive_embed_balanced, constructive_embed_unbalanced, find_embedding, PRESERVED, SWAPPED
from .formulas import Unsupported, construct_extremal, ex_formula
from .hamilton import HamiltonSizeError, is_hamiltonian, verify_c2n_extremal
from .search import (
    MISMATCH,
    THEOREM_IDS,
    BudgetExceeded,
    SearchBudget,
    cache_get,
    cache_put,
    cache_records,
    conjecture_tuples,
    default_cache_path,
    ex_bruteforce,
    explore_conjecture,
    verify_theorem,
    _params_of,
)
from .treegen import BipartiteTree, TreeSizeError, tree_family

EX_OK = 0
EX_FINDING = 1
EX_CONTRACT = 2
EX_USAGE = 64
EX_NOINPUT = 66

CSV_COLUMNS = ["n", "m", "k", "l", "tree", "ex_bruteforce", "formula_value", "formula_status", "agreement", "extremal_classes", "method"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(args, command: str, params: dict, results: dict, t0: float, warnings: list, text_lines: list[str]):
    if args.json:
        report = {
            "command": command,
            "parameters": params,
            "results": results,
            "warnings": warnings,
            "elapsed": round(time.monotonic() - t0, 3),
            "version": __version__,
        }
        print(json.dumps(report, sort_keys=True))
    else:
        for line in text_lines:
            print(line)
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)


def _table(pairs: list[tuple[str, object]]) -> list[str]:
    width = max((len(k) for k, _ in pairs), default=0)
    return [f"{k.ljust(width)}  {v}" for k, v in pairs]


def _rows_table(rows: list[dict], cols: list[str]) -> list[str]:
    cells = [[str(r.get(c, "")) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(x[i]) for x in cells]) for i, c in enumerate(cols)]
    out = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    for x in cells:
        out.append("  ".join(v.ljust(w) for v, w in zip(x, widths)).rstrip())
    return out


def _write_graphs(out_dir: str, graphs, dot: bool) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    names = []
    for g in graphs:
        key = canonical_key(g).hex()
        path = os.path.join(out_dir, f"{key}.bmat")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(serialize_bmat(g))
        if dot:
            with open(os.path.join(out_dir, f"{key}.dot"), "w", encoding="utf-8") as fh:
                fh.write(to_dot(g, "G"))
        names.append(path)
    return names


def _cache_path(args) -> Optional[str]:
    if getattr(args, "no_cache", False):
        return None
    return args.cache or default_cache_path()


def _budget(args) -> SearchBudget:
    kw = {}
    if getattr(args, "workers", None):
        kw["workers"] = args.workers
    if getattr(args, "budget_graphs", None):
        kw["max_graphs"] = args.budget_graphs
    if getattr(args, "budget_seconds", None):
        kw["max_duration"] = args.budget_seconds
    return SearchBudget(**kw)


# ---------------------------------------------------------------------------
# commands


def cmd_trees_gen(args, t0):
    if args.format == "json":
        args.json = True
    fam = tree_family(args.k, args.l)
    members = [{"key": canonical_key(t, allow_side_swap=True).hex(), "bmat": serialize_bmat(t)} for t in fam]
    lines = [f"T_{{{args.k},{args.l}}}: {len(fam)} trees"]
    for i, (t, mem) in enumerate(zip(fam, members)):
        lines.append(f"[{i}] {mem['key']}")
        lines.extend("  " + row for row in serialize_bmat(t).splitlines())
        if args.dot:
            lines.append(to_dot(t, f"T{i}").rstrip("\n"))
    if args.out:
        _write_graphs(args.out, list(fam), args.dot)
    _emit(args, "trees gen", {"k": args.k, "l": args.l}, {"count": len(fam), "members": members}, t0, [], lines)
    return EX_OK


def cmd_ex_formula(args, t0):
    v = ex_formula(args.n, args.m, args.k, args.l)
    _emit(args, "ex formula", {"n": args.n, "m": args.m, "k": args.k, "l": args.l}, v.as_dict(), t0, [],
          _table([("value", v.value), ("status", v.status), ("case_label", v.case_label)]))
    return EX_OK


def cmd_ex_brute(args, t0):
    if args.single_tree:
        g = parse_bmat(_read(args.single_tree))
        family = BipartiteTree.from_graph(g)
    else:
        family = tree_family(args.k, args.l)
    cache = _cache_path(args)
    warnings = []
    rec = None
    if cache and not args.refresh:
        rec = cache_get(_params_of(args.n, args.m, family), cache)
    if rec is None:
        try:
            rec = ex_bruteforce(args.n, args.m, family, _budget(args), direction=args.direction, prune=not args.no_prune)
        except BudgetExceeded as exc:
            _emit(args, "ex brute", _brute_params(args), {"incomplete": True, "bound": exc.best_bound,
                  "bound_kind": exc.bound_kind, "stratum": exc.stratum}, t0, [str(exc)],
                  _table([("incomplete", str(exc)), (f"{exc.bound_kind} bound", exc.best_bound)]))
            return EX_FINDING
        if cache:
            cache_put(rec, cache)
    res = rec.as_dict()
    # the search time lives in the cache; the report's own elapsed field covers this run
    res.pop("elapsed")
    fv = rec.formula_value or {}
    lines = _table([
        ("value", rec.ex_bruteforce),
        ("formula", f"{fv.get('value')} ({fv.get('status')}, {fv.get('case_label')})" if fv else "none"),
        ("agreement", rec.agreement),
        ("extremal classes", len(rec.extremal_keys)),
        ("classes up to swap", len(rec.extremal_keys_swap) if rec.extremal_keys_swap is not None else "-"),
        ("direction", rec.direction),
    ]) + [f"  {k}" for k in rec.extremal_keys]
    if args.out:
        _write_graphs(args.out, rec.graphs(), args.dot)
    _emit(args, "ex brute", _brute_params(args), res, t0, warnings, lines)
    return EX_FINDING if rec.agreement == MISMATCH else EX_OK


def _brute_params(args) -> dict:
    return {"n": args.n, "m": args.m, "k": args.k, "l": args.l, "single_tree": args.single_tree}


def cmd_construct(args, t0):
    cat = construct_extremal(args.n, args.m, args.k, args.l)
    keys = cat.keys()
    files = _write_graphs(args.out, cat.members, args.dot) if args.out else []
    res = {"value": cat.value, "complete": cat.complete, "labels": cat.labels, "symbolic": cat.symbolic,
           "members": [{"key": k, "bmat": serialize_bmat(g)} for k, g in zip(keys, cat.members)],
           "files": files}
    lines = _table([("value", cat.value), ("complete", cat.complete), ("members", len(cat.members))])
    lines += [f"  {lab}" for lab in cat.labels] + [f"  family: {s}" for s in cat.symbolic] + [f"  {k}" for k in keys]
    _emit(args, "construct", {"n": args.n, "m": args.m, "k": args.k, "l": args.l}, res, t0, [], lines)
    return EX_OK


def cmd_embed(args, t0):
    host_path = args.host or args.host_pos
    tree_path = args.tree or args.tree_pos
    if not host_path or not tree_path:
        raise UsageError("embed needs a host and a tree bmat file")
    host = parse_bmat(_read(host_path))
    tree = BipartiteTree.from_graph(parse_bmat(_read(tree_path)))
    wanted = (PRESERVED, SWAPPED) if args.orientation == "any" else (args.orientation,)
    emb = None
    if args.constructive:
        if host.n == host.m:
            emb = constructive_embed_balanced(host, tree, wanted[0])
        else:
            emb = constructive_embed_unbalanced(host, tree)
    else:
        for o in wanted:
            emb = find_embedding(host, tree, o)
            if emb is not None:
                break
    res = {"contained": emb is not None, "embedding": emb.as_dict() if emb else None}
    if emb:
        lines = _table([("orientation", emb.orientation), ("map_u", list(emb.map_u)), ("map_v", list(emb.map_v))])
    else:
        lines = ["NONE"]
    params = {"host": host_path, "tree": tree_path, "orientation": args.orientation, "constructive": args.constructive}
    _emit(args, "embed", params, res, t0, [], lines)
    return EX_OK if emb else EX_FINDING


def cmd_hamilton_check(args, t0):
    g = parse_bmat(_read(args.file))
    v = is_hamiltonian(g)
    cyc = [f"{s.lower()}{x}" for s, x in v.witness_cycle] if v.witness_cycle else None
    res = {"is_hamiltonian": v.is_hamiltonian, "condition_holds": v.condition_holds, "witness_cycle": cyc}
    lines = _table([("hamiltonian", v.is_hamiltonian), ("condition", v.condition_holds), ("cycle", " ".join(cyc) if cyc else "-")])
    _emit(args, "hamilton check", {"file": args.file}, res, t0, [], lines)
    return EX_OK


def cmd_hamilton_c2n(args, t0):
    rep = verify_c2n_extremal(args.n).as_dict()
    lines = _table([("n", rep["n"]), ("ex", rep["ex"]), ("extremal classes", len(rep["extremal_keys"])),
                    ("violations", len(rep["violations"]))]) + [f"  {v}" for v in rep["violations"]]
    _emit(args, "hamilton verify-c2n", {"n": args.n}, rep, t0, [], lines)
    return EX_FINDING if rep["violations"] else EX_OK


def _parse_ranges(specs: list[str]) -> Optional[dict]:
    if not specs:
        return None
    out = {}
    for spec in specs:
        for part in spec.split(","):
            name, _, span = part.partition("=")
            name = name.strip()
            if name not in ("n", "m", "k", "l") or not span:
                raise UsageError(f"bad range {part!r}; expected e.g. n=2..5")
            lo, sep, hi = span.partition("..")
            try:
                lo_i = int(lo)
                hi_i = int(hi) if sep else lo_i
            except ValueError:
                raise UsageError(f"bad range {part!r}; expected e.g. n=2..5") from None
            out[name] = (lo_i, hi_i)
    return out


def cmd_verify(args, t0):
    rep = verify_theorem(args.theorem, _parse_ranges(args.range), _budget(args), _cache_path(args))
    rows = rep["rows"]
    if args.theorem == "c2n":
        lines = _rows_table(rows, ["n", "ex"])
    else:
        lines = _rows_table(rows, ["n", "m", "k", "l", "brute", "formula", "classes", "case"])
    lines.append(f"mismatches: {len(rep['mismatches'])}")
    for mm in rep["mismatches"]:
        lines.append(f"  {mm.get('kind', 'violation')} at {mm.get('n')},{mm.get('m')},{mm.get('k')},{mm.get('l')}")
        if mm.get("witness"):
            lines.extend("    " + r for r in mm["witness"].splitlines())
    if not rep["complete"]:
        lines.append("incomplete: budget exhausted for some tuples")
    _emit(args, "verify", {"theorem": args.theorem, "range": args.range}, rep, t0, [], lines)
    return EX_FINDING if rep["mismatches"] or not rep["complete"] else EX_OK


def cmd_conjecture_scan(args, t0):
    tuples = conjecture_tuples(args.nmax, args.mmax, args.max_product)
    rep = explore_conjecture(tuples, _budget(args), _cache_path(args), include_guard_misses=args.all)
    lines = _rows_table(rep["rows"], ["n", "m", "k", "l", "status", "conjecture", "brute", "case"])
    lines.append(" ".join(f"{k}={v}" for k, v in rep["counts"].items()))
    _emit(args, "conjecture scan", {"nmax": args.nmax, "mmax": args.mmax, "max_product": args.max_product}, rep, t0, [], lines)
    return EX_OK


def _parse_filter(text: Optional[str]) -> dict:
    out = {}
    if not text:
        return out
    for part in text.split(","):
        name, _, val = part.partition("=")
        if name.strip() not in ("n", "m", "k", "l") or not val.strip().isdigit():
            raise UsageError(f"bad filter {part!r}; expected e.g. k=2,l=2")
        out[name.strip()] = int(val)
    return out


def report_rows(cache_path: str, filt: Optional[dict] = None) -> list[dict]:
    """Newest record per parameter set, in first-seen order, as CSV-ready dicts."""
    newest = {}
    for rec in cache_records(cache_path):
        newest[json.dumps(rec.params(), sort_keys=True)] = rec
    rows = []
    for rec in newest.values():
        if filt and any(getattr(rec, k) != v for k, v in filt.items()):
            continue
        fv = rec.formula_value or {}
        rows.append({
            "n": rec.n, "m": rec.m, "k": rec.k, "l": rec.l,
            "tree": "single" if rec.tree else "family",
            "ex_bruteforce": rec.ex_bruteforce,
            "formula_value": "" if fv.get("value") is None else fv.get("value"),
            "formula_status": fv.get("status", ""),
            "agreement": rec.agreement,
            "extremal_classes": len(rec.extremal_keys),
            "method": rec.method,
        })
    return rows


def render_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def cmd_report_render(args, t0):
    path = args.cache or default_cache_path()
    if not os.path.exists(path):
        print(f"bitree: cache file {path} not found", file=sys.stderr)
        return EX_NOINPUT
    rows = report_rows(path, _parse_filter(args.filter))
    text = render_csv(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    lines = _rows_table(rows, ["n", "m", "k", "l", "tree", "ex_bruteforce", "formula_value", "agreement", "extremal_classes"])
    if not args.csv:
        lines += ["", text.rstrip("\n")]
    _emit(args, "report render", {"cache": path, "filter": args.filter}, {"rows": rows, "csv": text}, t0, [], lines)
    return EX_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bitree", description="Extremal numbers for bipartite tree families.")
    p.add_argument("--version", action="version", version=f"bitree {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, cache=False, search=False):
        sp.add_argument("--json", action="store_true", help="emit a JSON run report")
        if cache:
            sp.add_argument("--cache", help="result journal (default ./bitree-cache.jsonl or $BITREE_CACHE)")
            sp.add_argument("--no-cache", action="store_true", help="do not read or write the journal")
        if search:
            sp.add_argument("--workers", type=int, help="worker processes for containment tests")
            sp.add_argument("--budget-graphs", type=int, help="maximum number of classes examined")
            sp.add_argument("--budget-seconds", type=float, help="maximum search time")

    trees = sub.add_parser("trees", help="tree families").add_subparsers(dest="action", parser_class=_Parser)
    tg = trees.add_parser("gen", help="enumerate T_{k,l}")
    tg.add_argument("k", type=int)
    tg.add_argument("l", type=int)
    tg.add_argument("--out", help="write one bmat file per tree")
    tg.add_argument("--dot", action="store_true", help="also emit Graphviz DOT")
    tg.add_argument("--format", choices=("bmat", "json"), default="bmat", help="--format json is the same as --json")
    common(tg)
    tg.set_defaults(func=cmd_trees_gen)

    ex = sub.add_parser("ex", help="extremal numbers").add_subparsers(dest="action", parser_class=_Parser)
    ef = ex.add_parser("formula", help="closed-form value")
    for name in ("n", "m", "k", "l"):
        ef.add_argument(name, type=int)
    common(ef)
    ef.set_defaults(func=cmd_ex_formula)
    eb = ex.add_parser("brute", help="exhaustive search")
    for name in ("n", "m", "k", "l"):
        eb.add_argument(name, type=int)
    eb.add_argument("--single-tree", metavar="FILE", help="exclude only the tree in this bmat file")
    eb.add_argument("--direction", choices=("auto", "up", "down"), default="auto")
    eb.add_argument("--no-prune", action="store_true", help="disable the shared-neighbour shortcut")
    eb.add_argument("--refresh", action="store_true", help="ignore cached results")
    eb.add_argument("--out", help="write extremal graphs as bmat files")
    eb.add_argument("--dot", action="store_true")
    common(eb, cache=True, search=True)
    eb.set_defaults(func=cmd_ex_brute)

    co = sub.add_parser("construct", help="build characterized extremal graphs")
    for name in ("n", "m", "k", "l"):
        co.add_argument(name, type=int)
    co.add_argument("--out", help="directory for bmat files")
    co.add_argument("--dot", action="store_true")
    common(co)
    co.set_defaults(func=cmd_construct)

    em = sub.add_parser("embed", help="embed a tree into a host")
    em.add_argument("host_pos", nargs="?", metavar="HOST")
    em.add_argument("tree_pos", nargs="?", metavar="TREE")
    em.add_argument("--host", help="host bmat file")
    em.add_argument("--tree", help="tree bmat file")
    em.add_argument("--orientation", choices=(PRESERVED, SWAPPED, "any"), default="any")
    em.add_argument("--constructive", action="store_true", help="use the leaf-peeling construction")
    common(em)
    em.set_defaults(func=cmd_embed)

    ha = sub.add_parser("hamilton", help="Hamiltonicity").add_subparsers(dest="action", parser_class=_Parser)
    hc = ha.add_parser("check")
    hc.add_argument("file")
    common(hc)
    hc.set_defaults(func=cmd_hamilton_check)
    hv = ha.add_parser("verify-c2n")
    hv.add_argument("n", type=int)
    common(hv)
    hv.set_defaults(func=cmd_hamilton_c2n)

    ve = sub.add_parser("verify", help="check a closed-form result against brute force")
    ve.add_argument("theorem", choices=THEOREM_IDS)
    ve.add_argument("--range", action="append", default=[], help="e.g. n=2..5 (repeatable, comma-separated)")
    common(ve, cache=True, search=True)
    ve.set_defaults(func=cmd_verify)

    cj = sub.add_parser("conjecture", help="conjecture exploration").add_subparsers(dest="action", parser_class=_Parser)
    cs = cj.add_parser("scan")
    cs.add_argument("--nmax", type=int, default=30)
    cs.add_argument("--mmax", type=int, default=30)
    cs.add_argument("--max-product", type=int, default=30)
    cs.add_argument("--all", action="store_true", help="also list tuples whose guards fail")
    common(cs, cache=True, search=True)
    cs.set_defaults(func=cmd_conjecture_scan)

    rp = sub.add_parser("report", help="summaries of the result journal").add_subparsers(dest="action", parser_class=_Parser)
    rr = rp.add_parser("render")
    rr.add_argument("--cache", help="result journal (default ./bitree-cache.jsonl or $BITREE_CACHE)")
    rr.add_argument("--filter", help="e.g. k=2,l=2")
    rr.add_argument("--csv", help="write the CSV here instead of stdout")
    common(rr)
    rr.set_defaults(func=cmd_report_render)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            raise UsageError(parser.format_usage().rstrip("\n"))
        return args.func(args, time.monotonic())
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EX_USAGE
    except (ContractError, GraphError, TreeSizeError, Unsupported, HamiltonSizeError, ValueError) as exc:
        print(f"bitree: {exc}", file=sys.stderr)
        return EX_CONTRACT
    except FileNotFoundError as exc:
        print(f"bitree: {exc}", file=sys.stderr)
        return EX_NOINPUT


if __name__ == "__main__":
    sys.exit(main())
