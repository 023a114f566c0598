"""``operad-lab`` command line.

Exit codes: 0 success, 1 a checked property failed, 2 usage or input error.
Global flags may be given before or after the subcommand.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bar_duality as B
from . import disc_operads as D
from . import flow as F
from . import fulton_macpherson as FM
from . import geometry as g
from . import serialize as SZ
from . import suites as SU
from . import trees as TR
from .errors import OperadLabError, UsageError, ValidationError
from .geometry import Backend
from .sampling import SampleSpec

GLOBAL_DEFAULTS = {"seed": 0, "dim": 1, "norm": "linf", "backend": "exact", "samples": None,
                   "json": False}


def _global_flags(default) -> argparse.ArgumentParser:
    """Parent parser for the global flags. The copy attached to subcommands
    uses SUPPRESS defaults so it never overwrites values given earlier."""
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda k: GLOBAL_DEFAULTS[k]) if default else (lambda k: argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=d("seed"), help="sample stream seed")
    p.add_argument("--dim", type=int, default=d("dim"), help="dimension of V")
    p.add_argument("--norm", choices=["linf", "l1", "l2"], default=d("norm"))
    p.add_argument("--backend", choices=["exact", "float"], default=d("backend"))
    p.add_argument("--samples", type=int, default=d("samples"), help="number of samples")
    p.add_argument("--json", action="store_true", default=d("json"), help="machine-readable output")
    return p


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="operad-lab", parents=[_global_flags(True)],
                                  description="Point-level computations with disc, sphere and "
                                              "Fulton-MacPherson operads.")
    sub = top.add_subparsers(dest="command", required=True)
    gf = _global_flags(False)

    def add(name, help_):
        return sub.add_parser(name, parents=[gf], help=help_, description=help_)

    p = add("compose", "compose two configurations at a label of the outer one")
    p.add_argument("--outer", required=True, help="outer configuration JSON file ('-' for stdin)")
    p.add_argument("--inner", required=True, help="inner configuration JSON file")
    p.add_argument("--at", required=True, help="label of the outer configuration")
    p.add_argument("--relabel", action="store_true", help="rename colliding inner labels")

    p = add("decompose", "split a barycentre configuration along a subset of labels")
    p.add_argument("--input", required=True)
    p.add_argument("--subset", required=True, help="comma-separated labels")
    p.add_argument("--label", default="h", help="label of the collapsed block (default h)")

    p = add("classify", "report membership in every configuration class")
    p.add_argument("--input", required=True)
    p.add_argument("--eps", type=float, default=g.DEFAULT_EPS, help="float tolerance")

    p = add("trees", "labelled trees")
    tsub = p.add_subparsers(dest="action", required=True)
    e = tsub.add_parser("enumerate", parents=[gf], help="all trees on labels 1..k")
    e.add_argument("--labels", type=int, required=True)
    e.add_argument("--count-only", action="store_true")

    p = add("fm", "Fulton-MacPherson points")
    fsub = p.add_subparsers(dest="action", required=True)
    for name, help_ in [("validate", "check shape, non-constancy and coherence"),
                        ("sinha", "direction and ratio coordinates"),
                        ("stratum", "the stratum tree")]:
        a = fsub.add_parser(name, parents=[gf], help=help_)
        a.add_argument("--input", required=True)
    a = fsub.add_parser("normalize", parents=[gf], help="canonical representatives for weights")
    a.add_argument("--input", required=True)
    a.add_argument("--weights", required=True,
                   help="JSON object label -> weight, or a configuration whose radii are used")
    a = fsub.add_parser("compose", parents=[gf], help="operad composition")
    a.add_argument("--outer", required=True)
    a.add_argument("--inner", required=True)
    a.add_argument("--at", required=True)

    p = add("alpha", "pair an FM point with a bar point in the quotient sphere")
    p.add_argument("--fm", required=True, help="FM point JSON")
    p.add_argument("--bar", required=True, help="bar point JSON")
    p.add_argument("--normalize", action="store_true",
                   help="normalize the FM point for the bar point's radii first")

    p = add("flow", "retract an unbounded restricted configuration into the unit disc")
    p.add_argument("--input", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--trace", help="write the event trace JSON here")

    p = add("check", "run property suites")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--suite", help="suite name, or 'all'")
    grp.add_argument("--diagram", choices=["alpha", "pro"], help="the pairing squares")
    grp.add_argument("--list", action="store_true", help="list suites and mutants")
    p.add_argument("--mutant", help="run with a documented formula mutation")
    p.add_argument("--max-dim", type=int, help="largest dimension drawn by dimension-varying suites")
    return top


# -- helpers ---------------------------------------------------------------

def _read(path):
    try:
        if path == "-":
            return SZ.parse_json(sys.stdin.read())
        with open(path, encoding="utf-8") as fh:
            return SZ.parse_json(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(args, value, text=None):
    if args.json or text is None:
        print(json.dumps(SZ.to_json(value), indent=2))
    else:
        print(text)


def _label(text, labels):
    for k in labels:
        if str(k) == text:
            return k
    raise UsageError(f"no label {text!r}; labels are {g.sorted_labels(labels)!r}")


def _new_label(text):
    try:
        return int(text)
    except ValueError:
        return text


def _norm(args):
    return g.parse_norm(args.norm)


def _backend(args, c):
    if args.backend == "float" and c.exact:
        return c.to_float()
    return c


# -- commands --------------------------------------------------------------

def cmd_compose(args):
    a = _backend(args, SZ.config_from_json(_read(args.outer)))
    b = _backend(args, SZ.config_from_json(_read(args.inner)))
    i = _label(args.at, a.labels)
    if args.relabel:
        taken = set(a.labels)
        mapping = {}
        for k in b.ordered_labels():
            if k in taken - {i} or k in mapping.values():
                new = D.fresh_label(taken | set(b.labels) | set(mapping.values()), f"{k}_")
                mapping[k] = new
            else:
                mapping[k] = k
        b = D.relabel(b, mapping)
    _emit(args, D.compose(a, b, i))
    return 0


def cmd_decompose(args):
    c = _backend(args, SZ.config_from_json(_read(args.input)))
    J = frozenset(_label(s.strip(), c.labels) for s in args.subset.split(",") if s.strip())
    h = _new_label(args.label)
    outer, inner = D.decompose(c, J, h)
    print(json.dumps({"outer": SZ.to_json(outer), "inner": SZ.to_json(inner)}, indent=2))
    return 0


def cmd_classify(args):
    c = _backend(args, SZ.config_from_json(_read(args.input)))
    cls = D.classify(c, _norm(args), args.eps)
    d = cls.as_dict()
    _emit(args, cls, "\n".join(f"{k:16s} {'yes' if v else 'no'}" for k, v in d.items()))
    return 0


def cmd_trees(args):
    n = args.labels
    if n < 1:
        raise UsageError("--labels must be positive")
    ts = TR.enumerate_trees(range(1, n + 1))
    if args.count_only:
        _emit(args, len(ts), str(len(ts)))
    else:
        print(json.dumps([SZ.to_json(T) for T in ts], indent=None if not args.json else 2))
    return 0


def _fm(args, path):
    return SZ.fm_from_json(_read(path), norm=_norm(args))


def _weights(obj):
    if isinstance(obj, dict) and "t" in obj and "x" in obj:
        return SZ.config_from_json(obj).t
    if not isinstance(obj, dict):
        raise UsageError("weights must be a JSON object")
    return {k: SZ.decode_scalar(v, f"weights.{k}") for k, v in obj.items()}


def cmd_fm(args):
    if args.action == "validate":
        try:
            p = _fm(args, args.input)
        except ValidationError as exc:
            out = {"valid": False, "reason": str(exc), "witness": SZ.to_json(exc.witness)}
            _emit(args, out, f"invalid: {exc} (witness {exc.witness!r})")
            return 1
        _emit(args, {"valid": True, "labels": g.sorted_labels(p.labels), "dim": p.dim}, "valid")
        return 0
    if args.action == "normalize":
        p = _fm(args, args.input)
        w = _weights(_read(args.weights))
        raw = {}
        for k in p.labels:
            key = next((kk for kk in w if str(kk) == str(k)), None)
            if key is None:
                raise UsageError(f"no weight for label {k!r}")
            raw[k] = w[key]
        _emit(args, FM.fm_normalize(p, raw, _norm(args)))
        return 0
    if args.action == "compose":
        y = _fm(args, args.outer)
        z = _fm(args, args.inner)
        _emit(args, FM.fm_compose(y, z, _label(args.at, y.labels)))
        return 0
    if args.action == "sinha":
        _emit(args, FM.sinha_coords(_fm(args, args.input), _norm(args)))
        return 0
    if args.action == "stratum":
        _emit(args, FM.stratum_tree(_fm(args, args.input)))
        return 0
    raise UsageError(f"unknown fm action {args.action!r}")


def cmd_alpha(args):
    norm = _norm(args)
    y = _fm(args, args.fm)
    p = SZ.bar_from_json(_read(args.bar), norm=norm)
    if args.normalize and not g.is_basepoint(p):
        y = FM.fm_normalize(y, p.z.t, norm)
    _emit(args, B.alpha_eval(y, p, norm))
    return 0


def cmd_flow(args):
    c = SZ.config_from_json(_read(args.input))
    tr = F.flow_retract(c, _norm(args), args.tol)
    if args.trace:
        try:
            with open(args.trace, "w", encoding="utf-8") as fh:
                json.dump(SZ.to_json(tr), fh, indent=2)
        except OSError as exc:
            raise UsageError(f"cannot write {args.trace}: {exc.strerror}") from None
    if args.json:
        print(json.dumps({"events": len(tr.events), "time": tr.total_time,
                          "terminal": SZ.to_json(tr.terminal)}, indent=2))
    else:
        print(f"{len(tr.events)} events, total time {tr.total_time:.12g}")
        print(json.dumps(SZ.to_json(tr.terminal)))
    return 0


def cmd_check(args):
    if args.list:
        if args.json:
            print(json.dumps({"suites": {n: SU.SUITES[n].description for n in SU.list_suites()},
                              "mutants": {n: m.description for n, m in SU.MUTANTS.items()}},
                             indent=2))
        else:
            for n in SU.list_suites():
                print(f"{n:18s} {SU.SUITES[n].description}")
            print()
            for n, m in SU.MUTANTS.items():
                print(f"mutant {n:22s} {m.description} (caught by {', '.join(m.suites)})")
        return 0
    if args.diagram:
        names = ["alpha-diagram"] if args.diagram == "alpha" else ["kappa-pro"]
    elif args.suite == "all":
        names = SU.list_suites()
    else:
        names = [args.suite]
    backend = Backend.FLOAT if args.backend == "float" else Backend.EXACT
    reports = []
    for name in names:
        spec = SampleSpec(seed=args.seed, dim=args.dim, norm=_norm(args), backend=backend,
                          count=args.samples if args.samples is not None else 100,
                          max_dim=args.max_dim)
        if name not in SU.SUITES:
            raise UsageError(f"unknown suite {name!r}; known: {', '.join(SU.list_suites())}")
        if args.suite == "all" and SU.SUITES[name].exact_only and backend is Backend.FLOAT:
            continue
        reports.append(SU.run_suite(name, spec, args.mutant))
    if args.json:
        print(json.dumps([r.to_json() for r in reports], indent=2))
    else:
        for r in reports:
            print(r.summary())
            for w, prop in r.failures[:5]:
                print(f"  {prop}: {json.dumps(w)[:400]}")
            if len(r.failures) > 5:
                print(f"  ... {len(r.failures) - 5} more")
    return 0 if all(r.ok for r in reports) else 1


COMMANDS = {"compose": cmd_compose, "decompose": cmd_decompose, "classify": cmd_classify,
            "trees": cmd_trees, "fm": cmd_fm, "alpha": cmd_alpha, "flow": cmd_flow,
            "check": cmd_check}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    for k, v in GLOBAL_DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    try:
        return COMMANDS[args.command](args)
    except OperadLabError as exc:
        print(f"operad-lab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"operad-lab: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
