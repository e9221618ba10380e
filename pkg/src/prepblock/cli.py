"""Command-line entry point: ``prepblock <subcommand> ...``.

``--design`` accepts a ``.blocks`` path or ``@name`` for a bundled fixture.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import construct, criteria, oracle, reports
from .model import BlockDesign, DesignError, FullDesignSpec, dual, format_blocks, full_design, read_blocks


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def load_design(ref: str) -> BlockDesign:
    if ref.startswith("@"):
        return reports.load_fixture(ref[1:])
    return read_blocks(ref)


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


_CONSTRUCT_NEEDS = {
    "linked-block": ("b",),
    "egd": ("m",),
    "square-lattice": ("n",),
    "dual-of": ("design",),
    "modify-script": ("design", "script"),
}


def cmd_construct(args) -> int:
    fam = args.family
    missing = [f"--{a}" for a in _CONSTRUCT_NEEDS[fam] if getattr(args, a) is None]
    if missing:
        raise DesignError(f"{fam} needs {', '.join(missing)}")
    if fam == "linked-block":
        d = construct.linked_block(args.lam, args.b)
        header = [f"linked block design, lambda={args.lam}, b={args.b}"]
    elif fam == "egd":
        m = _ints(args.m)
        d = construct.egd_design(m)
        header = [f"EGD({','.join(map(str, m))}), block size 2"]
    elif fam == "square-lattice":
        d = construct.square_lattice(args.n)
        header = [f"square lattice, n={args.n}"]
    elif fam == "dual-of":
        d = dual(load_design(args.design))
        header = [f"dual of {args.design}"]
    elif fam == "modify-script":
        base = load_design(args.design)
        edits = construct.parse_edit_script(Path(args.script).read_text(encoding="utf-8"))
        d = construct.modify(base, edits)
        header = [f"{args.design} modified by {args.script}"]
    else:  # pragma: no cover - argparse restricts choices
        raise DesignError(f"unknown family {fam}")
    if getattr(args, "dual", False):
        d = dual(d)
        header.append("dualized")
    header.append(f"u={d.num_treatments} b={d.num_blocks} sizes={list(d.block_sizes)}")
    _emit(format_blocks(d, header), args.output)
    return 0


def cmd_eval(args) -> int:
    d = load_design(args.design)
    spec = FullDesignSpec(d, args.k)
    rep = criteria.criteria_report(spec, args.mv_min)
    wanted = {c.strip().lower() for c in args.criteria.split(",")}
    data = rep.to_dict()
    keep = {"u", "b", "k", "w", "v", "f"}
    if "a" in wanted:
        keep |= {"a_total", "a_uu", "a_ww", "a_uw", "a_bound", "a_eff", "k0"}
    if "mv" in wanted:
        keep |= {"mv_total", "mv_uu", "mv_ww", "mv_uw", "mv_bound_a", "mv_bound_b", "mv_eff",
                 "k_sharp", "k_plus", "k_star"}
    if "a1" in wanted:
        keep |= {"a_ww"}
    if "a2" in wanted:
        keep |= {"a2_sum", "a2_bound", "a2_eff"}
    data = {key: val for key, val in data.items() if key in keep}
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        for key, val in data.items():
            print(f"{key:<12} {_fmt(val)}")
    return 0


def cmd_katable(args) -> int:
    d = load_design(args.design)
    alphas = tuple(_floats(args.alphas))
    kk0, ka = criteria.k_thresholds(d, alphas, args.cap)
    vals = [kk0, *("X" if ka[a] is None else ka[a] for a in alphas)]
    names = ["k0", *(f"k{a:.2f}" for a in alphas)]
    print("(" + ", ".join(names) + ") = (" + ", ".join(map(str, vals)) + ")")
    return 0


def cmd_check(args) -> int:
    d = load_design(args.design)
    spec = FullDesignSpec(d, args.k)
    d0 = full_design(spec)
    var_o = oracle.oracle_variances(d0, spec.k)
    var_p = oracle.prop1_variances(spec)
    closed = criteria.a_value(spec)
    sums = oracle.variance_partial_sums(var_o, spec.u)
    names = ("total", "UU", "WW", "UW")
    worst = 0.0
    for name, t, o in zip(names, closed, sums):
        diff = abs(t - o)
        worst = max(worst, diff)
        print(f"A_{name:<6} closed form {t:.10f}  oracle {o:.10f}  |diff| {diff:.3e}")
    entry = float(np.max(np.abs(var_o - var_p)))
    worst = max(worst, entry)
    print(f"pairwise variances: max |closed form - oracle| = {entry:.3e}")
    print(f"max discrepancy {worst:.3e}")
    return 0 if worst <= 1e-6 else 1


def cmd_enumerate(args) -> int:
    from .enumeration import best_binary

    res = best_binary(args.u, args.b, args.k, args.criterion)
    print(f"(u, b, k) = ({args.u}, {args.b}, {args.k})  criterion {res.criterion}")
    print(f"classes {res.n_classes}  feasible {res.n_feasible}  optimizers {len(res.optimizers)}")
    print(f"optimum {res.optimum:.10f}")
    for i, d in enumerate(res.optimizers, start=1):
        print(f"optimizer {i}: " + " | ".join(" ".join(map(str, blk)) for blk in d.blocks))
    if args.all_k:
        ks = _ints(args.all_k)
        print("k".rjust(4) + "".join(f"  optimizer {i:<4}" for i in range(1, len(res.optimizers) + 1)))
        for k in ks:
            cells = []
            for d in res.optimizers:
                if d.k_max > k or args.b * k - 2 * args.u <= 0:
                    cells.append("infeasible".ljust(15))
                    continue
                spec = FullDesignSpec(d, k)
                val = _criterion_value(spec, res.criterion)
                cells.append(f"{val:<15.6f}")
            print(f"{k:>4}  " + "  ".join(cells))
    return 0


def _criterion_value(spec: FullDesignSpec, name: str) -> float:
    if name == "A":
        return criteria.a_value(spec)[0]
    if name == "MV":
        return criteria.mv_value(spec).total
    if name == "A1":
        return criteria.a2_value(spec)[0]
    return criteria.a2_value(spec)[1]


def cmd_reproduce(args) -> int:
    rep = reports.reproduce(args.what, args.designs, enumerate_missing=args.enumerate_missing)
    sys.stdout.write(rep.text())
    sidecar = Path(args.json) if args.json else Path(f"reproduce_{args.what}.json")
    sidecar.write_text(rep.to_json(), encoding="utf-8")
    print(f"# JSON sidecar: {sidecar}")
    return 1 if rep.failures else 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prepblock", description="Partially replicated block designs.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a subdesign and write it as .blocks")
    c.add_argument("family", choices=["linked-block", "egd", "square-lattice", "dual-of", "modify-script"])
    c.add_argument("--lam", type=int, default=1)
    c.add_argument("--b", type=int)
    c.add_argument("--m", help="EGD dimensions, e.g. 3,3,3")
    c.add_argument("--n", type=int)
    c.add_argument("--design", help=".blocks file or @fixture")
    c.add_argument("--script", help="edit script (one edit per line)")
    c.add_argument("--dual", action="store_true", help="dualize the result")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_construct)

    e = sub.add_parser("eval", help="criteria, bounds and efficiencies of (d, k)")
    e.add_argument("--design", required=True)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--criteria", default="a,mv,a1,a2")
    e.add_argument("--mv-min", type=float, default=None)
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_eval)

    t = sub.add_parser("katable", help="(k0, k_alpha...) thresholds")
    t.add_argument("--design", required=True)
    t.add_argument("--alphas", default="0.90,0.95,0.98")
    t.add_argument("--cap", type=int, default=20)
    t.set_defaults(func=cmd_katable)

    k = sub.add_parser("check", help="closed forms against the brute-force oracle")
    k.add_argument("--design", required=True)
    k.add_argument("--k", type=int, required=True)
    k.set_defaults(func=cmd_check)

    n = sub.add_parser("enumerate", help="exhaustive search over binary subdesigns")
    n.add_argument("--b", type=int, required=True)
    n.add_argument("--u", type=int, required=True)
    n.add_argument("--k", type=int, required=True)
    n.add_argument("--criterion", default="a", type=str.upper, choices=["A", "MV", "A1", "A2"])
    n.add_argument("--all-k", default=None, help="e.g. 5,10,15,20")
    n.set_defaults(func=cmd_enumerate)

    r = sub.add_parser("reproduce", help="regenerate a published table")
    r.add_argument("--what", required=True, choices=["table1", "table2", "table3", "tableA1", "examples"])
    r.add_argument("--designs", default=None, help="directory of user-supplied .blocks files")
    r.add_argument("--enumerate-missing", action="store_true",
                   help="fill Table 1 rows by exhaustive search instead of catalogue files")
    r.add_argument("--json", default=None, help="sidecar path (default reproduce_<what>.json)")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DesignError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
