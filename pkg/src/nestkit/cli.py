"""Command-line front end.

Every command builds a report (inputs, outputs, checks) and prints it as
text or, with ``--json``, as JSON.  Exit status: 0 when every check passes,
1 when a check or a library precondition fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import covers, nest, nets, seminorms, serialize, verify
from .corpus import CORPUS_KINDS, ExperimentConfig, generate_corpus
from .errors import NestkitError
from .intervals import Family, Interval, apply_order_map, as_scalar, components, refines
from .nest import GridInterval, NestGrid


class UsageError(Exception):
    pass


def _load(path: str, kind: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return serialize.loads(text, kind)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path} is not a valid {kind} document: {exc}") from exc


def _grid_intervals(text: str | None) -> list[GridInterval]:
    """Parse ``"0:2,2:5"``."""
    if not text:
        return []
    out = []
    for part in text.split(","):
        try:
            s, t = part.split(":")
            out.append(GridInterval(int(s), int(t)))
        except ValueError as exc:
            raise UsageError(f"bad grid interval {part!r}; expected start:stop") from exc
    return out


def _grid_from_args(args) -> NestGrid:
    if getattr(args, "grid", None):
        return _load(args.grid, "grid")
    if getattr(args, "op", None):
        return _load(args.op, "operator").grid
    if args.cuts:
        try:
            cuts = tuple(int(c) for c in args.cuts.split(","))
            return NestGrid(cuts[-1], cuts)
        except ValueError as exc:
            raise UsageError(f"--cuts: {exc}") from exc
    raise UsageError("give --grid, --op or --cuts")


def _base(args, P: Family) -> Interval:
    if args.base:
        return Interval(as_scalar(args.base[0]), as_scalar(args.base[1]))
    comps = components(P)
    if not comps:
        raise UsageError("--base is required for an empty family")
    return Interval(comps[0].lo, comps[-1].hi)


# --- commands ------------------------------------------------------------------

def cmd_covers(args) -> dict:
    P = _load(args.family, "family")
    base = _base(args, P)
    rep = {"inputs": {"family": P, "base": base}, "outputs": {}, "checks": {}}
    out, checks = rep["outputs"], rep["checks"]
    if args.action == "extremes":
        ex = covers.cover_extremes(P, base)
        out.update(vars(ex))
        return rep
    if args.action == "disjoint":
        ds = [Interval(as_scalar(a), as_scalar(b)) for a, b in (p.split(",") for p in args.intervals)]
        c = covers.outer_cover_from_disjoint(P, base, ds)
        out["cover"] = c
        out["size"] = len(c)
        checks["valid"] = covers.validate_cover(c)
        checks["size >= ceil(k/2)"] = 2 * len(c) >= len(ds)
        return rep
    chain = covers.r_chain(P, base)
    n = len(chain)
    out["chain"] = [str(x) for x in chain.points]
    out["n"] = n
    if args.action == "chain":
        return rep
    if args.action == "inner":
        c = covers.build_inner_cover(P, base)
        checks["size <= n+2"] = len(c) <= n + 2
    else:
        c = covers.build_outer_cover(P, base, chain)
        checks["size == floor(n/2)+1"] = len(c) == n // 2 + 1
        checks["size <= n+1"] = covers.outer_bound_check(c, chain)
        if args.action == "double":
            theta, c = covers.double_outer_cover(P, base, c)
            out["theta"] = theta
            checks["size == 2m-1"] = len(c) == 2 * (n // 2 + 1) - 1
    out["cover"] = c
    out["size"] = len(c)
    checks["valid"] = covers.validate_cover(c)
    return rep


def cmd_bijection(args) -> dict:
    outer = _load(args.outer, "cover")
    inner = _load(args.inner, "cover")
    theta = covers.order_compatible_bijection(outer, inner)
    image = apply_order_map(theta, Family(outer.intervals))
    return {"inputs": {"outer": outer, "inner": inner},
            "outputs": {"theta": theta, "image": image},
            "checks": {"image refines inner cover": refines(image, Family(inner.intervals))}}


def cmd_nets(args) -> dict:
    if args.action == "canonical":
        net = nets.canonical_nets(_grid_from_args(args), args.kind)
        return {"inputs": {"kind": args.kind}, "outputs": {"net": net}, "checks": {}}
    if not args.op:
        raise UsageError("--op is required")
    X = _load(args.op, "operator")
    net = _load(args.net, "net") if args.net else nets.canonical_nets(X.grid, args.kind)
    profile = nets.seminorm_profile(net, X, args.r)
    estimate = nets.limit_seminorm(net, X, args.r)
    out = {"profile": profile, "estimate": estimate}
    checks = {"nonincreasing along chain": all(b <= a + 1e-12 for a, b in zip(profile, profile[1:]))}
    if args.action == "quotient":
        try:
            blocks = nets.check_partition(net.grid, net.last)
        except NestkitError:
            blocks = None
        if blocks is not None and args.r == 0:
            oracle = nets.quotient_oracle_partition(blocks, X)
            out.update(oracle=oracle, difference=abs(estimate - oracle))
            checks["estimate matches oracle"] = abs(estimate - oracle) <= args.tol
        else:
            out["oracle"] = None
    return {"inputs": {"net": net, "r": args.r}, "outputs": out, "checks": checks}


def cmd_seminorms(args) -> dict:
    X = _load(args.op, "operator")
    out, checks = {}, {}
    if args.action == "greatest":
        d = seminorms.greatest_dsf(X, args.a, args.r)
        out["dsf"] = d
        checks["value below a"] = seminorms.eval_dsf(d, X, args.r) < args.a
        return {"inputs": {"a": args.a, "r": args.r}, "outputs": out, "checks": checks}
    if not args.dsf:
        raise UsageError("--dsf is required")
    d = _load(args.dsf, "dsf")
    out["node_values"] = seminorms.eval_nodes(d, X, args.r)
    out["value"] = max(out["node_values"])
    if args.action == "kill":
        T = seminorms.dsf_kill(d, X, args.a, args.r)
        out["T"] = T
        out["distance"] = nest.op_norm(X - T)
        checks["distance below a"] = out["distance"] < args.a + 1e-8
        checks["T killed"] = seminorms.eval_dsf(d, T, args.r) <= 1e-9
    elif args.action == "compatible":
        P = nets.induced_family(X, args.a, args.r)
        out["compatible"] = seminorms.compatible(P, d)
    return {"inputs": {"dsf": d, "a": args.a, "r": args.r}, "outputs": out, "checks": checks}


def cmd_quotient(args) -> dict:
    X = _load(args.op, "operator")
    out, checks = {"kminus_surrogate": nets.kminus_quotient_surrogate(X, args.r)}, {}
    if args.partition:
        P = _grid_intervals(args.partition)
        oracle = nets.quotient_oracle_partition(P, X)
        estimate = nets.quotient_estimate(nets.IdealHandle(nets.NetChain(X.grid, (tuple(P),)), args.r), X)
        out.update(estimate=estimate, oracle=oracle, difference=abs(estimate - oracle))
        if args.r == 0:
            checks["estimate matches oracle"] = abs(estimate - oracle) <= args.tol
    else:
        net = nets.canonical_nets(X.grid, args.kind)
        out["estimate"] = nets.quotient_estimate(nets.IdealHandle(net, args.r), X)
    return {"inputs": {"r": args.r, "kind": args.kind, "partition": args.partition},
            "outputs": out, "checks": checks}


def cmd_witness(args) -> dict:
    grid = _grid_from_args(args)
    Q = _grid_intervals(args.q)
    targets = _grid_intervals(args.targets)
    X = nest.build_witness(grid, Q, args.mode, targets, rank=args.rank)
    XtX = X.entries.conj().T @ X.entries
    return {"inputs": {"Q": Q, "targets": targets, "mode": args.mode},
            "outputs": {"witness": X},
            "checks": {"partial isometry": bool(abs(XtX @ XtX - XtX).max() <= 1e-10),
                       "Q-compressions vanish": all(not nest.corner(X, F).any() for F in Q)}}


def cmd_corpus(args) -> dict:
    cfg = ExperimentConfig(seed=args.seed, dim=args.dim, cut_count=args.atoms,
                           r=args.r, corpus_size=args.corpus_size)
    items = generate_corpus(cfg, args.kind)
    return {"inputs": {"seed": args.seed, "kind": args.kind, "corpus_size": args.corpus_size},
            "outputs": {"instances": items}, "checks": {}}


def cmd_verify(args) -> dict:
    which = sorted(verify.SUITES) if args.which == "all" else [int(args.which)]
    threads = max(1, int(os.environ.get("NESTKIT_THREADS", "1") or 1))
    size = args.corpus_size
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda c: verify.SUITES[c](args.seed, size), which))
    else:
        results = [verify.SUITES[c](args.seed, size) for c in which]
    return {"inputs": {"seed": args.seed, "corpus_size": size, "criteria": which},
            "outputs": {"suites": [r.to_json() for r in results]},
            "checks": {f"criterion {r.criterion}: {r.name}": r.passed for r in results},
            "lines": [r.line() for r in results]}


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--out", help="write the report to this path instead of stdout")

    p = argparse.ArgumentParser(prog="nestkit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("covers", parents=[common], help="chains and covers of a family")
    c.add_argument("action", choices=["chain", "inner", "outer", "double", "extremes", "disjoint"])
    c.add_argument("--family", required=True)
    c.add_argument("--base", nargs=2, metavar=("LO", "HI"))
    c.add_argument("--intervals", nargs="*", default=[], metavar="LO,HI",
                   help="disjoint intervals for the 'disjoint' action")
    c.set_defaults(func=cmd_covers)

    b = sub.add_parser("bijection", parents=[common], help="order-compatible bijection")
    b.add_argument("--outer", required=True)
    b.add_argument("--inner", required=True)
    b.set_defaults(func=cmd_bijection)

    n = sub.add_parser("nets", parents=[common], help="limits and quotients along nets")
    n.add_argument("action", choices=["canonical", "limit", "quotient"])
    n.add_argument("--net")
    n.add_argument("--op")
    n.add_argument("--grid")
    n.add_argument("--cuts")
    n.add_argument("--kind", choices=nets.CANONICAL_KINDS, default="radical")
    n.add_argument("--r", type=int, default=0)
    n.add_argument("--tol", type=float, default=1e-9)
    n.set_defaults(func=cmd_nets)

    s = sub.add_parser("seminorms", parents=[common], help="DSF evaluation, greatest DSF, kill")
    s.add_argument("action", choices=["eval", "greatest", "kill", "compatible"])
    s.add_argument("--op", required=True)
    s.add_argument("--dsf")
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--r", type=int, default=0)
    s.set_defaults(func=cmd_seminorms)

    q = sub.add_parser("quotient", parents=[common], help="quotient-norm estimates")
    q.add_argument("--op", required=True)
    q.add_argument("--partition", help="blocks as start:stop,start:stop,...")
    q.add_argument("--kind", choices=nets.CANONICAL_KINDS, default="radical")
    q.add_argument("--r", type=int, default=0)
    q.add_argument("--tol", type=float, default=1e-9)
    q.set_defaults(func=cmd_quotient)

    w = sub.add_parser("witness", parents=[common], help="transfer witness matrices")
    w.add_argument("--grid")
    w.add_argument("--cuts")
    w.add_argument("--q", default="")
    w.add_argument("--targets", default="")
    w.add_argument("--mode", choices=["plain", "right_open", "left_open"], default="plain")
    w.add_argument("--rank", type=int, default=1)
    w.set_defaults(func=cmd_witness)

    g = sub.add_parser("corpus", parents=[common], help="seeded random instances")
    g.add_argument("--kind", choices=CORPUS_KINDS, default="families")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--corpus-size", type=int, default=10)
    g.add_argument("--dim", type=int, default=8)
    g.add_argument("--atoms", type=int, default=4)
    g.add_argument("--r", type=int, default=0)
    g.set_defaults(func=cmd_corpus)

    v = sub.add_parser("verify", parents=[common], help="run the property suites")
    v.add_argument("which", choices=["all"] + [str(i) for i in sorted(verify.SUITES)])
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--corpus-size", type=int, default=None,
                   help="instances per suite (default: full acceptance sizes)")
    v.set_defaults(func=cmd_verify)
    return p


def _render_text(rep: dict) -> str:
    lines = [f"command: {rep['command']}"]
    for section in ("inputs", "outputs"):
        lines.append(f"{section}:")
        for key, value in rep[section].items():
            lines.append(f"  {key}: {_short(value)}")
    for line in rep.get("lines", []):
        lines.append(line)
    lines.append("checks:")
    for key, ok in rep["checks"].items():
        lines.append(f"  [{'PASS' if ok else 'FAIL'}] {key}")
    lines.append(f"status: {'ok' if rep['passed'] else 'FAILED'}")
    if rep.get("error"):
        lines.append(f"error: {rep['error']}")
    return "\n".join(lines) + "\n"


def _short(value) -> str:
    if isinstance(value, covers.LinkedCover):
        return f"{value.kind} [" + ", ".join(map(repr, value.intervals)) + "]"
    if isinstance(value, (nest.BlockOperator, nets.NetChain, seminorms.DSF, list, dict)):
        return json.dumps(json.loads(serialize.dumps(value)), sort_keys=True)
    return repr(value) if not isinstance(value, (str, int, float, bool)) or value is None else str(value)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    rep: dict = {"command": " ".join([args.command] + ([args.action] if hasattr(args, "action") else [])),
                 "inputs": {k: v for k, v in vars(args).items() if k not in ("func", "json", "out")},
                 "outputs": {}, "checks": {}}
    try:
        rep.update(args.func(args))
        rep["passed"] = all(rep["checks"].values())
    except UsageError as exc:
        print(f"nestkit: error: {exc}", file=sys.stderr)
        return 2
    except (NestkitError, ValueError) as exc:
        rep["passed"] = False
        rep["error"] = f"{type(exc).__name__}: {exc}"
    if args.json:
        rep.pop("lines", None)
    text = serialize.dumps(rep) if args.json else _render_text(rep)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if rep["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
