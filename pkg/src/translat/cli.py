"""Command-line front end: ``translat <command> <spec> [options]``.

Exit status is 0 on success, 1 on a domain error (bad group parameter, invalid
transfer system, missing cache, audit counterexample under --strict-audit) and
2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .cache import CacheError, load_or_enumerate
from .enumeration import (
    EnumerationError,
    audit_report,
    count_counterexamples,
    factorize,
    hasse_stats,
    width,
)
from .formats import FormatError, lattice_from_json, ts_from_json, ts_to_json
from .groups import DEFAULT_ORDER_CAP, MAX_ORDER_CAP, GroupError, is_lossless, parse_spec
from .lattice import Lattice, LatticeAction, LatticeError, is_modular, quotient, subgroup_lattice
from .render import TARGETS, RenderSpec, render
from .transfer import (
    TransferError,
    is_connected,
    is_cosaturated,
    is_lsp,
    is_saturated,
    saturated_hull,
)

FROBENIUS_ROWS = (5, 7, 8, 9, 11, 13, 16, 17, 19)
DOMAIN_ERRORS = (GroupError, LatticeError, TransferError, EnumerationError, CacheError, FormatError, OSError)


class Target:
    """What a spec argument resolved to: a group's subgroup lattice or a lattice file."""

    def __init__(self, text: str):
        self.text = text
        self.is_file = text.endswith(".json")
        if not self.is_file:
            self.spec = parse_spec(text)

    def __str__(self) -> str:
        return self.text


def spec_arg(text: str) -> Target:
    try:
        return Target(text)
    except GroupError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _order_cap(args, default: int = DEFAULT_ORDER_CAP) -> int:
    return args.order_cap if args.order_cap is not None else default


def load(args) -> tuple[Lattice, LatticeAction, str]:
    """Lattice, action and cache key for the spec argument."""
    target: Target = args.spec
    if target.is_file:
        lat, act = lattice_from_json(target.text)
        return lat, act, f"lattice-{lat.digest}-{act.digest}"
    lat, act = subgroup_lattice(str(target.spec), _order_cap(args))
    return lat, act, str(target.spec)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def _require_group(args) -> None:
    if args.spec.is_file:
        raise LatticeError(f"'{args.command}' needs a group spec, not a lattice file")


def _tsl(args, lat, act, key):
    return load_or_enumerate(key, lat, act, args.cache_dir, cached_only=args.cached_only)


# -- commands --------------------------------------------------------------------

def cmd_group(args) -> int:
    _require_group(args)
    lat, act, _ = load(args)
    g = lat.group
    q = quotient(lat, act)
    try:
        q_modular: bool | None = is_modular(q.to_lattice())
    except LatticeError:
        q_modular = None
    classes = [
        {"label": q.labels[i], "order": lat.subgroups[c[0]].order, "size": len(c), "members": list(c)}
        for i, c in enumerate(q.classes)
    ]
    doc = {
        "group": g.label,
        "order": g.order,
        "subgroups": lat.size,
        "classes": classes,
        "lossless": is_lossless(g, list(lat.subgroups)),
        "modular": is_modular(lat),
        "quotient_modular": q_modular,
    }
    if args.format == "json":
        _emit(args, _json(doc))
        return 0
    yn = {True: "yes", False: "no", None: "not a lattice"}
    lines = [
        f"group     {g.label} (order {g.order})",
        f"subgroups {lat.size} in {q.size} conjugacy classes",
        f"lossless  {yn[doc['lossless']]}",
        f"modular   Sub(G): {yn[doc['modular']]}; Sub(G)/G: {yn[q_modular]}",
        "classes:",
    ]
    lines += [f"  {c['label']:<14} order {c['order']:<4} copies {c['size']}" for c in classes]
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_width(args) -> int:
    _require_group(args)
    lat, act, _ = load(args)
    rep = width(lat.group, lat, act)
    agrees = rep.formula_value is None or rep.formula_value == rep.width
    if args.format == "json":
        _emit(args, _json({
            "group": rep.group, "width": rep.width, "classes": rep.class_labels,
            "generating_edges": rep.edge_labels(lat), "formula_value": rep.formula_value,
        }))
    else:
        lines = [f"width {rep.width} for {rep.group}", "meet-irreducible classes: " + ", ".join(rep.class_labels),
                 "generating edges:"]
        lines += [f"  {e}" for e in rep.edge_labels(lat)]
        if rep.formula_value is not None:
            lines.append(f"closed form {rep.formula_value} ({'agrees' if agrees else 'DISAGREES'})")
        _emit(args, "\n".join(lines) + "\n")
    if not agrees:
        print(f"error: computed width {rep.width} differs from closed form {rep.formula_value}", file=sys.stderr)
        return 1
    return 0


def cmd_enumerate(args) -> int:
    lat, act, key = load(args)
    tsl = _tsl(args, lat, act, key)
    stats = hasse_stats(tsl)
    doc = {
        "lattice": key,
        "count": stats.count,
        "hasse_edges": len(tsl.hasse_edges),
        "shortest_path_length": stats.shortest_path_length,
        "decorations": stats.decoration_counts,
        "bisaturated": stats.bisaturated_count,
    }
    if args.format == "json":
        _emit(args, _json(doc))
    else:
        deco = ", ".join(f"{k} {v}" for k, v in stats.decoration_counts.items())
        _emit(args, f"{key}: {stats.count} transfer systems\n"
                    f"hasse edges {len(tsl.hasse_edges)}, shortest trivial-to-complete path {stats.shortest_path_length}\n"
                    f"{deco}, bisaturated {stats.bisaturated_count}\n")
    return 0


def cmd_hasse(args) -> int:
    lat, act, key = load(args)
    fmt = args.format if args.format != "text" else "dot"
    if args.target == "ts-hasse":
        item = _tsl(args, lat, act, key)
        spec = RenderSpec(fmt, "ts-hasse", ascii=args.ascii)
    else:
        item = lat
        spec = RenderSpec(fmt, args.target)
    _emit(args, render(item, spec, act))
    return 0


def cmd_check(args) -> int:
    lat, act, _ = load(args)
    if args.close:
        ts = ts_from_json(args.ts, lat, act, close=True)
        _emit(args, _json(ts_to_json(ts)))
        return 0
    try:
        ts = ts_from_json(args.ts, lat, act)
    except TransferError as exc:
        _emit(args, f"invalid: {exc}\n")
        return 1
    _emit(args, f"ok: transfer system with {len(ts.edges())} non-reflexive edges\n")
    return 0


def cmd_props(args) -> int:
    lat, act, key = load(args)
    ts = ts_from_json(args.ts, lat, act, close=args.close)
    if args.format in ("dot", "tikz"):
        _emit(args, render(ts, RenderSpec(args.format, "transfer-system")))
        return 0
    tsl = _tsl(args, lat, act, key)
    hull = saturated_hull(ts)
    doc = {
        "saturated": is_saturated(ts),
        "cosaturated": is_cosaturated(ts),
        "connected": is_connected(ts),
        "lsp": is_lsp(ts, tsl.systems),
        "hull": ts_to_json(hull),
    }
    if args.format == "json":
        _emit(args, _json(doc))
    else:
        lines = [f"{k:<12}{'yes' if doc[k] else 'no'}" for k in ("saturated", "cosaturated", "connected", "lsp")]
        lines.append("hull edges  " + " ".join(f"{lat.labels[k]}->{lat.labels[h]}" for k, h in hull.edges()))
        _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_audit(args) -> int:
    lat, act, key = load(args)
    tsl = _tsl(args, lat, act, key)
    report = audit_report(tsl)
    report["lattice"] = key
    found = count_counterexamples(report)
    if args.format == "json":
        _emit(args, _json(report))
    else:
        b = report["bisaturated_paths"]
        lines = [
            f"{key}: {b['systems']} systems",
            f"bisaturated paths: shortest length {b['shortest_path_length']} ({b['shortest_path_count']} paths); "
            f"max over all paths {b['max_bisaturated_all_paths']}, over shortest paths "
            f"{b['min_bisaturated_shortest_paths']}..{b['max_bisaturated_shortest_paths']}",
        ]
        for r in report["lsp_two_component"]:
            lines.append(f"lsp two-component [{r['reading']}, {r['witness']} witness]: "
                         f"{len(r['matching'])} matching, {len(r['counterexamples'])} counterexamples")
        _emit(args, "\n".join(lines) + "\n")
    if args.strict_audit and found:
        print(f"error: {found} audit counterexamples", file=sys.stderr)
        return 1
    return 0


def cmd_frobenius_table(args) -> int:
    cap = _order_cap(args, MAX_ORDER_CAP)
    rows = []
    for q in args.q or FROBENIUS_ROWS:
        order = q * (q - 1)
        fact = " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in sorted(factorize(order).items()))
        if order > cap:
            rows.append({"group": f"F_{q}", "order": fact, "width": None})
            continue
        lat, act = subgroup_lattice(f"F:{q}", cap)
        rows.append({"group": lat.group.label, "order": fact, "width": width(lat.group, lat, act).width})
    if args.format == "json":
        _emit(args, _json(rows))
    else:
        lines = [f"{'group':<6} {'order':<16} width"]
        lines += [f"{r['group']:<6} {r['order']:<16} {r['width'] if r['width'] is not None else 'skipped (order cap)'}"
                  for r in rows]
        _emit(args, "\n".join(lines) + "\n")
    return 0


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "dot", "tikz"), default="text")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--cache-dir", help="enumeration cache directory (default $TRANSLAT_CACHE)")
    common.add_argument("--order-cap", type=int, help=f"largest group order to build (max {MAX_ORDER_CAP})")
    common.add_argument("--cached-only", action="store_true", help="fail instead of enumerating")
    common.add_argument("--ascii", action="store_true", help="S/C/L/c instead of glyphs")
    common.add_argument("--strict-audit", action="store_true", help="exit 1 on any audit counterexample")
    common.add_argument("--close", action="store_true", help="generate the system from the file's edges")

    p = argparse.ArgumentParser(prog="translat", description="Transfer systems on subgroup lattices.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    spec_help = "group spec such as D:9, Q:8, F:5, perm:gens.txt, or a lattice .json file"

    def add(name, func, help_, ts=False):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if name != "frobenius-table":
            sp.add_argument("spec", type=spec_arg, help=spec_help)
        if ts:
            sp.add_argument("ts", help="transfer-system JSON file")
        sp.set_defaults(func=func)
        return sp

    add("group", cmd_group, "order, subgroups, classes, lossless and modular flags")
    add("width", cmd_width, "width with meet-irreducible classes and closed-form check")
    add("enumerate", cmd_enumerate, "count all transfer systems and write the cache")
    h = add("hasse", cmd_hasse, "decorated Hasse diagram of all transfer systems")
    h.add_argument("--target", choices=[t for t in TARGETS if t != "transfer-system"], default="ts-hasse")
    add("check", cmd_check, "validate a transfer-system file against the axioms", ts=True)
    add("props", cmd_props, "saturation, cosaturation, connectivity, LSP and hull", ts=True)
    add("audit", cmd_audit, "bisaturated-path and LSP two-component audits")
    f = add("frobenius-table", cmd_frobenius_table, "widths of the Frobenius groups F_q")
    f.add_argument("--q", type=int, action="append", help="restrict to these q (repeatable)")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.order_cap is not None and not 1 <= args.order_cap <= MAX_ORDER_CAP:
        parser.error(f"--order-cap must be between 1 and {MAX_ORDER_CAP}")
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
