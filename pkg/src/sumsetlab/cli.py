"""Command line front end.  Exit status: 0 success, 1 domain error, 2 usage error."""
from __future__ import annotations

import argparse
import json
import sys

from . import completeness, constructions, harness, lemma_lab, structure, sumsets, zerosumfree
from .core import IntSet, ResidueSet, format_ints, parse_ints, read_seq, read_set, write_set
from .errors import CapExceeded, PreconditionError
from .gap import format_gap


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _emit(text, out=None):
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=1, sort_keys=True, default=_default) + "\n"


def _default(x):
    if isinstance(x, IntSet):
        return x.tolist()
    if hasattr(x, "to_json"):
        return x.to_json()
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _read_ints(path):
    with open(path) as f:
        return parse_ints(f.read())


# -- subcommands ------------------------------------------------------------

def cmd_sumset(a):
    cap = sumsets.SumCap(modulus=a.mod) if a.mod else sumsets.DEFAULT_CAP
    if a.op == "subset":
        out = sumsets.subset_sums(read_seq(a.inputs[0]), cap)
    elif a.op == "star":
        sets = [_load_set(p, a.mod) for p in a.inputs]
        if len(sets) == 1:
            sets = sets * _need_l(a)
        out = sumsets.star_sum(sets, cap)
    else:
        A = _load_set(a.inputs[0], a.mod)
        fn = sumsets.iterated_sumset if a.op == "iter" else sumsets.distinct_sumset
        out = fn(A, _need_l(a), cap)
    header = f"sumset op={a.op} l={a.l} mod={a.mod}"
    _emit(format_ints(out.members if isinstance(out, ResidueSet) else out.tolist(), header), a.out)


def _need_l(a):
    if a.l is None:
        raise PreconditionError(f"--op {a.op} needs --l")
    if a.l < 1:
        raise PreconditionError("--l must be positive")
    return a.l


def _load_set(path, mod):
    vals = _read_ints(path)
    if mod:
        return ResidueSet.of(vals, mod)
    return IntSet(vals)


def cmd_longest_ap(a):
    S = _load_set(a.inputs, a.mod)
    ap = structure.longest_ap(S, max_diff=a.max_diff)
    _emit(_json(ap.to_json()))


def cmd_find_gap(a):
    S = read_set(a.inputs)
    G = structure.find_proper_gap(S, max_rank=a.rank, budget=a.budget)
    _emit((format_gap(G) if G is not None else "none") + "\n")


def cmd_construct(a):
    if a.kind == "planar":
        A, params = constructions.build_planar(a.n, a.m)
    elif a.kind == "general":
        A, params = constructions.build_general(a.d, a.n, a.m, delta=a.delta, l=a.l)
    else:
        if a.l is None:
            raise PreconditionError("--kind mod needs --l")
        A, params = constructions.build_mod(a.d, a.n, a.m, a.l, delta=a.delta)
    out = {"params": params.to_json(), "card": len(A)}
    if a.verify:
        l = a.l
        if l is None and a.kind == "planar":
            l = max(1, a.n // int(4.1 * a.m * a.m))
        if l is None:
            raise PreconditionError("--verify needs --l for this kind")
        out["report"] = constructions.verify_extremal(A, params, l).to_json()
    if a.out:
        members = A.members if isinstance(A, ResidueSet) else A.tolist()
        write_set(a.out, members, header=f"construct kind={a.kind} d={params.d} n={a.n} m={a.m}")
    _emit(_json(out))
    if a.verify and not out["report"]["passed"]:
        return 1
    return 0


def cmd_buckets(a):
    rep = lemma_lab.multiplicity_buckets(read_set(a.inputs), scheme=a.scheme, alpha=a.alpha)
    chosen = None
    if rep.chosen is not None:
        chosen = {k: (v.tolist() if isinstance(v, IntSet) else v) for k, v in rep.chosen.items()}
    out = {
        "scheme": rep.scheme,
        "buckets": [{"i": b.i, "lo": b.lo, "hi": b.hi, "size": len(b.members)} for b in rep.buckets],
        "chosen": chosen,
        "info": rep.info,
    }
    _emit(_json(out))


def cmd_greedy(a):
    A = read_set(a.inputs)
    try:
        r = lemma_lab.greedy_big_sum_subset(A)
    except lemma_lab.GreedyStuck as e:
        _emit(_json({"stuck": True, "state": e.state}))
        return 1
    _emit(_json({"B": r.B, "T": r.T, "card": r.card, "sums_card": len(r.sums),
                 "size_ok": r.size_ok, "sum_ok": r.sum_ok, "precondition_met": r.precondition_met,
                 "steps": r.steps}))


def cmd_complete(a):
    A = read_seq(a.inputs)
    out = {"prefix_length": len(A), "note": "finite-prefix proxy"}
    ob = completeness.erdos_obstruction(A)
    out["obstruction"] = {"max_g": ob.max_g, "increasing": ob.increasing, "obstructed": ob.obstructed}
    for key, fn in (("graham", lambda: completeness.graham_gap_check(A)),
                    ("subset_sum_ap", lambda: completeness.ap_in_subset_sums(A, a.n))):
        try:
            r = fn()
        except CapExceeded as e:
            out[key] = {"stage": f"cap: {e}"}
            continue
        if key == "graham":
            out[key] = {"hypothesis": r.hypothesis, "first_failure": r.first_failure,
                        "window": list(r.window), "L": r.L}
        else:
            out[key] = {"n": r.n, "subset_sums": r.size, "ap": r.ap.to_json(), "reaches": r.reaches}
    out["good_partition"] = completeness.good_partition_probe(A, a.depth).to_json()
    _emit(_json(out))


def cmd_zsf(a):
    r = zerosumfree.count_zero_sum_free(a.p, budget=a.budget)
    js = r.to_json()
    if a.count:
        js.pop("max_size")
    elif a.max_size:
        js.pop("count")
        js.pop("log2_count_over_sqrt")
    _emit(_json(js))


def cmd_nsmall(a):
    c = zerosumfree.n_small_count(a.n)
    _emit(_json({"n": a.n, "count": str(c), "log2_count_over_sqrt": zerosumfree.n_small_exponent(a.n),
                 "convention": "sets of distinct positive integers with sum < n, empty set included"}))


def cmd_sweep(a):
    cfg = harness.read_config(a.config)
    recs = harness.threshold_sweep(cfg, workers=a.workers)
    harness.write_csv(recs, a.out, timing=cfg.timing)
    if a.json:
        with open(a.json, "w") as f:
            f.write(harness.format_json(recs) + "\n")
    bad = harness.regime_violations(recs)
    for msg in bad:
        print(f"regime check: {msg}", file=sys.stderr)
    failed = sum(r.status != "ok" for r in recs)
    print(f"{len(recs)} points, {failed} not ok, {len(bad)} regime violations", file=sys.stderr)
    return 1 if bad else 0


# -- parser -----------------------------------------------------------------

def build_parser():
    p = _Parser(prog="sumsetlab", description="Sumset and progression experiments.")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    s = sub.add_parser("sumset", help="lA, l*A, star sums, subset sums")
    s.add_argument("--op", choices=["iter", "distinct", "star", "subset"], required=True)
    s.add_argument("--l", type=int)
    s.add_argument("--mod", type=int)
    s.add_argument("--in", dest="inputs", nargs="+", required=True)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_sumset)

    s = sub.add_parser("longest-ap", help="longest arithmetic progression, JSON")
    s.add_argument("--in", dest="inputs", required=True)
    s.add_argument("--mod", type=int)
    s.add_argument("--max-diff", type=int)
    s.set_defaults(fn=cmd_longest_ap)

    s = sub.add_parser("find-gap", help="best-found proper GAP, as a GAP literal")
    s.add_argument("--in", dest="inputs", required=True)
    s.add_argument("--rank", type=int, default=2, choices=[1, 2])
    s.add_argument("--budget", type=int, default=structure.DEFAULT_BUDGET)
    s.set_defaults(fn=cmd_find_gap)

    s = sub.add_parser("construct", help="extremal constructions and their verification")
    s.add_argument("--kind", choices=["planar", "general", "mod"], required=True)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--l", type=int)
    s.add_argument("--delta", type=float, default=constructions.DEFAULT_DELTA)
    s.add_argument("--verify", action="store_true")
    s.add_argument("--out", help="write the set file here")
    s.set_defaults(fn=cmd_construct)

    s = sub.add_parser("buckets", help="representation-count buckets, JSON")
    s.add_argument("--scheme", choices=["dyadic", "harmonic"], default="harmonic")
    s.add_argument("--alpha", type=float, default=4)
    s.add_argument("--in", dest="inputs", required=True)
    s.set_defaults(fn=cmd_buckets)

    s = sub.add_parser("greedy-bigsum", help="small subset with a large distinct-summand sumset")
    s.add_argument("--in", dest="inputs", required=True)
    s.set_defaults(fn=cmd_greedy)

    s = sub.add_parser("complete-analyze", help="subset-sum analysis of a sequence prefix")
    s.add_argument("--in", dest="inputs", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--depth", type=int, default=2)
    s.set_defaults(fn=cmd_complete)

    s = sub.add_parser("zsf", help="zero-sum-free subsets of Z_p")
    s.add_argument("--p", type=int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--count", action="store_true")
    g.add_argument("--max-size", action="store_true")
    s.add_argument("--budget", type=int, default=zerosumfree.DEFAULT_NODE_BUDGET)
    s.set_defaults(fn=cmd_zsf)

    s = sub.add_parser("nsmall", help="number of n-small sets")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(fn=cmd_nsmall)

    s = sub.add_parser("threshold-sweep", help="grid sweep to CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--workers", type=int, default=1, help="points run at once; 0 runs in-process")
    s.add_argument("--json", help="also write a JSON mirror of the records")
    s.set_defaults(fn=cmd_sweep)
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.cmd is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        rc = args.fn(args)
    except (OSError, PreconditionError, CapExceeded, ValueError) as e:
        print(f"sumsetlab {args.cmd}: {e}", file=sys.stderr)
        return 1
    return int(rc or 0)


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
