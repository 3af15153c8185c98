"""Command line front end.

Every command prints one report (JSON by default) to standard output and
exits with 0 on success, 2 on a precision error and 3 on invalid input.
Reports are deterministic: keys are sorted and no timestamps are written.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .elementary import (
    CONVENTIONS,
    ElementaryModule,
    check_funceq,
    functor_F,
    functor_G,
    growth_law,
    invariants,
    quotient_profile,
    twist,
)
from .errors import LambdaError, LevelTooDeep, PrecisionError
from .finite_dual import dual, dual_elementary_shadow, pairing_check
from .io import dumps, make_profile, parse_module, parse_tower, serialize_module, serialize_tower
from .presented import (
    TRANSITIONS,
    FiniteWTModule,
    PresentedModule,
    colimit_F_invariants,
    fit_growth,
    generic_rank,
    limit_G_invariants,
    present_elementary,
    quotient_module,
    torsion_size_seq,
)
from .tower import analyze, compare_towers, simulate

EXIT_OK, EXIT_PRECISION, EXIT_INVALID = 0, 2, 3


class CliInvalid(LambdaError):
    pass


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CliInvalid(f"{path}: {e.strerror}") from None


def _load(path, args, kinds=None):
    X = parse_module(_read(path), M=args.prec_p, D=args.prec_t, levels=args.levels, p=args.p)
    if kinds and not isinstance(X, kinds):
        names = " or ".join(k.__name__ for k in kinds)
        raise CliInvalid(f"{path}: expected a {names} input")
    return X


def _profile(X):
    prof = getattr(X, "prof", None)
    return prof.as_dict() if prof is not None else None


def _inv_dict(E: ElementaryModule):
    d = invariants(E).as_dict()
    d["class"] = E.describe()
    return d


# --------------------------------------------------------------- commands

def cmd_invariants(args):
    X = _load(args.file, args)
    inputs = {"module": serialize_module(X)}
    if isinstance(X, ElementaryModule):
        return inputs, _profile(X), {"source": "closed form", **_inv_dict(X)}
    if isinstance(X, PresentedModule):
        seq = torsion_size_seq(X, args.levels)
        fit = fit_growth(seq, X.p, min_tail=2)
        rank = X.rows - generic_rank(X.poly_matrix())
        return inputs, _profile(X), {
            "source": "growth recovery from X/omega_n X (invariants of G(X))",
            "rank": rank, "mu": fit.mu, "lambda": fit.lam, "torsion_sizes": seq,
            "fit": fit.as_dict()}
    raise CliInvalid("invariants needs an elementary or presented module")


def cmd_functor(args):
    X = _load(args.file, args, (ElementaryModule, PresentedModule))
    inputs = {"module": serialize_module(X), "functor": args.which, "verify": args.verify}
    which = args.which
    if isinstance(X, ElementaryModule):
        Y = functor_G(X) if which == "G" else functor_F(X)
        res = {"source": "closed form", "module": serialize_module(Y), **_inv_dict(Y)}
        if args.verify:
            Xp = present_elementary(X)
            got = limit_G_invariants(Xp, args.levels) if which == "G" \
                else colimit_F_invariants(Xp, args.levels)
            inv = invariants(Y)
            res["oracle"] = {"mu": got[0], "lambda": got[1], "transitions": TRANSITIONS[which]}
            res["oracle_match"] = got == (inv.mu, inv.lam)
        return inputs, _profile(X), res
    got = limit_G_invariants(X, args.levels) if which == "G" else colimit_F_invariants(X, args.levels)
    return inputs, _profile(X), {"source": "fitted from finite levels",
                                 "transitions": TRANSITIONS[which],
                                 "mu": got[0], "lambda": got[1]}


def cmd_twist(args):
    X = _load(args.file, args, (ElementaryModule,))
    Y = twist(X)
    return {"module": serialize_module(X)}, _profile(X), {
        "module": serialize_module(Y), "class": Y.describe()}


def cmd_check_funceq(args):
    A = _load(args.file1, args, (ElementaryModule,))
    B = _load(args.file2, args, (ElementaryModule,))
    return ({"module1": serialize_module(A), "module2": serialize_module(B)}, _profile(A),
            {"funceq": check_funceq(A, B), "twist_of_module2": twist(B).describe()})


def cmd_grow(args):
    X = _load(args.file, args, (ElementaryModule, PresentedModule))
    N = args.levels
    if isinstance(X, ElementaryModule):
        table = [quotient_profile(X, n) for n in range(1, N + 1)]
        source = "closed form"
        law = growth_law(X)
        extra = {"growth_law": {"mu": law.mu, "lambda": law.lam, "valid": law.valid}}
    else:
        table = [(q.free_corank, q.torsion.size_exponent)
                 for q in (quotient_module(X, n) for n in range(1, N + 1))]
        source = "Smith normal form"
        extra = {}
    seq = [t for _, t in table]
    res = {"source": source, "levels": list(range(1, N + 1)),
           "free_corank": [f for f, _ in table], "torsion_exponent": seq, **extra}
    if N >= 4:
        res["fit"] = fit_growth(seq, X.p, min_tail=2).as_dict()
    return {"module": serialize_module(X)}, _profile(X), res


def cmd_dual(args):
    X = _load(args.file, args, (FiniteWTModule, ElementaryModule))
    if isinstance(X, FiniteWTModule):
        D = dual(X)
        chk = pairing_check(X)
        res = {"dual": serialize_module(D), "size_exponent": D.size_exponent,
               "pairing_ok": chk.ok, "pairing": chk.table.as_fractions(),
               "double_dual_is_identity": dual(D) == X}
        if not chk.ok:
            res["witness"] = list(chk.witness) if chk.witness else None
            res["reason"] = chk.reason
        return {"module": serialize_module(X)}, None, res
    levels = list(range(1, min(args.levels, 3) + 1))
    res = {"levels": levels,
           "shadow": [dual_elementary_shadow(X, n) for n in levels]}
    return {"module": serialize_module(X)}, _profile(X), res


def cmd_tower(args):
    if args.action == "simulate":
        if not args.limit:
            raise CliInvalid("tower simulate needs --limit")
        E = _load(args.limit, args, (ElementaryModule,))
        t = simulate(E, args.noise, args.levels, args.seed)
        rep = analyze(t)
        return ({"limit": serialize_module(E), "noise": args.noise, "seed": args.seed},
                _profile(E), {"tower": serialize_tower(t), "sizes": t.sizes(),
                              "coranks": t.coranks(), "analysis": rep.as_dict()})
    if args.action == "analyze":
        if len(args.files) != 1:
            raise CliInvalid("tower analyze takes one tower file")
        t = parse_tower(_read(args.files[0]), M=args.prec_p)
        return {"tower": serialize_tower(t)}, None, analyze(t).as_dict()
    if len(args.files) != 2:
        raise CliInvalid("tower compare takes two tower files")
    t1 = parse_tower(_read(args.files[0]), M=args.prec_p)
    t2 = parse_tower(_read(args.files[1]), M=args.prec_p)
    bounded, witness = compare_towers(t1, t2)
    return ({"tower1": serialize_tower(t1), "tower2": serialize_tower(t2)}, None,
            {"bounded": bounded, "witness": witness,
             "analysis1": analyze(t1).as_dict(), "analysis2": analyze(t2).as_dict()})


COMMANDS = {
    "invariants": cmd_invariants,
    "functor": cmd_functor,
    "twist": cmd_twist,
    "check-funceq": cmd_check_funceq,
    "grow": cmd_grow,
    "dual": cmd_dual,
    "tower": cmd_tower,
}


# --------------------------------------------------------------- plumbing

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=None, help="prime (must match the file)")
    common.add_argument("--prec-p", type=int, default=16, help="p-adic precision M")
    common.add_argument("--prec-t", type=int, default=None,
                        help="T-adic degree D (default 128, raised for deep levels)")
    common.add_argument("--levels", type=int, default=4, help="deepest level N")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "text"), default="json")

    ap = argparse.ArgumentParser(prog="lambdamod", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("invariants", parents=[common])
    s.add_argument("file")
    s = sub.add_parser("functor", parents=[common])
    s.add_argument("which", choices=("F", "G"))
    s.add_argument("file")
    s.add_argument("--verify", action="store_true")
    s = sub.add_parser("twist", parents=[common])
    s.add_argument("file")
    s = sub.add_parser("check-funceq", parents=[common])
    s.add_argument("file1")
    s.add_argument("file2")
    s = sub.add_parser("grow", parents=[common])
    s.add_argument("file")
    s = sub.add_parser("dual", parents=[common])
    s.add_argument("file")
    s = sub.add_parser("tower", parents=[common])
    s.add_argument("action", choices=("simulate", "analyze", "compare"))
    s.add_argument("files", nargs="*")
    s.add_argument("--limit")
    s.add_argument("--noise", type=int, default=0, help="defect bound B")
    return ap


def _flags(args):
    return {"p": args.p, "prec_p": args.prec_p, "prec_t": args.prec_t,
            "levels": args.levels, "seed": args.seed}


def _text(obj, prefix=""):
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            lines.extend(_text(obj[k], f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        for i, x in enumerate(obj):
            lines.extend(_text(x, f"{prefix}[{i}]"))
    else:
        val = "null" if obj is None else (str(obj).lower() if isinstance(obj, bool) else obj)
        lines.append(f"{prefix}: {val}")
    return lines


def render(report, fmt="json") -> str:
    if fmt == "text":
        return "\n".join(_text(report)) + "\n"
    return dumps(report)


def run(argv=None):
    """Parse ``argv`` and return ``(exit_code, report)``."""
    ap = build_parser()
    args = ap.parse_args(argv)
    name = args.command if args.command != "tower" else f"tower {args.action}"
    report = {"command": name, "flags": _flags(args),
              "conventions": {**CONVENTIONS, "transitions": TRANSITIONS}}
    try:
        if args.levels < 1:
            raise CliInvalid("--levels must be >= 1")
        inputs, prof, result = COMMANDS[args.command](args)
        report.update(inputs=inputs, profile=prof, result=result,
                      status={"exit_code": EXIT_OK, "error": None})
        code = EXIT_OK
    except (PrecisionError, LevelTooDeep) as e:
        code = EXIT_PRECISION
        kind = getattr(e, "kind", "level-too-deep")
        report.update(status={"exit_code": code, "error": {"kind": kind, "message": str(e)}})
    except LambdaError as e:
        code = EXIT_INVALID
        report.update(status={"exit_code": code, "error": {
            "kind": type(e).__name__, "message": str(e),
            "location": getattr(e, "location", None)}})
    return code, report, args.format


def main(argv=None) -> int:
    code, report, fmt = run(argv)
    sys.stdout.write(render(report, fmt))
    if code:
        sys.stderr.write(report["status"]["error"]["message"] + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
