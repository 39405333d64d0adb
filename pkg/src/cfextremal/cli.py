"""Command-line front end.

One JSON document (or CSV rows) per invocation goes to stdout; diagnostics
go to stderr.  Exit codes: 0 success, 1 a verified identity failed beyond
tolerance (or a theorem-violation abort), 2 usage or input error.  Output is
byte-deterministic for identical argv and seed: fixed field order, floats
printed with 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import cyclic, integers
from .factorization import FactorizationError, fejer_riesz_z, sqrt_zm
from .groups import (GroupDescriptor, GroupElement, OmegaDescriptor,
                     TheoremViolationError, reduce_problem, solve_group)
from .integers import SolverDisagreementError
from .lp import LpError
from .sampling import random_finite_instance
from .sequences import (SeqZ, SeqZm, SupportZ, SupportZm, is_pd_z, is_pd_zm,
                        sequence_from_json)

VOLATILE_KEYS = {"wallTime"}


# ---------------------------------------------------------------------------
# deterministic serialization


def _strip_volatile(obj):
    if isinstance(obj, dict):
        return {k: _strip_volatile(v) for k, v in obj.items()
                if k not in VOLATILE_KEYS}
    if isinstance(obj, (list, tuple)):
        return [_strip_volatile(v) for v in obj]
    return obj


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if value is None:
        return "null"
    return json.dumps(str(value))


def dumps_canonical(obj) -> str:
    """JSON with insertion-ordered keys and 17-significant-digit floats."""
    if isinstance(obj, dict):
        parts = (f"{json.dumps(str(k))}:{dumps_canonical(v)}"
                 for k, v in obj.items())
        return "{" + ",".join(parts) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps_canonical(v) for v in obj) + "]"
    return _fmt(obj)


def _emit(doc, fmt: str = "json", rows_key: str | None = None):
    doc = _strip_volatile(doc)
    if fmt == "csv":
        rows = doc[rows_key] if rows_key else doc
        if not isinstance(rows, list) or not rows or not isinstance(rows[0], dict):
            raise ValueError("csv output needs a table-shaped result")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = list(rows[0].keys())
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[k]).strip('"') for k in header])
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(dumps_canonical(doc) + "\n")


# ---------------------------------------------------------------------------
# input parsing


def _parse_support_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError as e:
        raise ValueError(f"cannot parse support list {text!r}: {e}") from None


def parse_support_z(text: str) -> SupportZ:
    ks = _parse_support_list(text)
    if 0 not in ks:
        raise ValueError("support must contain 0")
    pos = sorted(k for k in ks if k > 0)
    if sorted(-k for k in ks if k < 0) != pos:
        raise ValueError(f"support {text!r} is not symmetric")
    return SupportZ(tuple(pos))


def parse_support_zm(text: str, m: int) -> SupportZm:
    ks = _parse_support_list(text)
    res = {k % m for k in ks}
    listed = frozenset(res)
    if frozenset((-k) % m for k in res) != listed:
        raise ValueError(f"support {text!r} is not symmetric mod {m}")
    return SupportZm(m, listed | {0})


def _load_sequence(args):
    if args.seq_file:
        with open(args.seq_file) as f:
            return sequence_from_json(json.load(f))
    if args.seq:
        return sequence_from_json(json.loads(args.seq))
    raise ValueError("provide --seq or --seq-file")


def _parse_element(group: GroupDescriptor, text: str) -> GroupElement:
    coords = []
    for factor, tok in zip(group.factors, text.replace(" ", "").split(",")):
        if factor.kind in ("integers", "cyclic"):
            coords.append(int(tok))
        else:
            coords.append(Fraction(tok))
    if len(coords) != len(group.factors):
        raise ValueError("coordinate count does not match the group")
    return GroupElement(group, tuple(coords))


def _load_group_omega_z(args):
    group = GroupDescriptor.parse(args.group)
    if args.omega_file:
        with open(args.omega_file) as f:
            omega_doc = json.load(f)
    elif args.omega:
        omega_doc = json.loads(args.omega)
    else:
        raise ValueError("provide --omega or --omega-file")
    omega = OmegaDescriptor.from_json(group, omega_doc)
    z = _parse_element(group, args.z)
    return group, omega, z


def _parse_n_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return _parse_support_list(text)


def _workers() -> int:
    env = os.environ.get("CF_EXTREMAL_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _parallel_map(fn, items):
    n = _workers()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# subcommands; each returns (document, identity_ok)


def _cmd_check_pd(args):
    seq = _load_sequence(args)
    cert = (is_pd_z(seq, args.tol) if isinstance(seq, SeqZ)
            else is_pd_zm(seq, args.tol))
    return cert.to_json(), True


def _cmd_factor(args):
    seq = _load_sequence(args)
    if isinstance(seq, SeqZ):
        fac = fejer_riesz_z(seq, args.tol)
    else:
        phases = None
        if args.phases:
            phases = [float(t) for t in args.phases.split(",")]
        fac = sqrt_zm(seq, phases, args.tol)
    return fac.to_json(), True


def _cmd_solve(args):
    if args.zm:
        support = parse_support_zm(args.support, args.modulus)
        solver = cyclic.k_m if args.real else cyclic.cf_m
        report = solver(support, tol=args.tol)
    else:
        support = parse_support_z(args.support)
        report = integers.cf_z(support, tol=args.tol)
    return report.to_json(), True


def _cmd_reduce(args):
    group, omega, z = _load_group_omega_z(args)
    red = reduce_problem(group, omega, z, bound=args.bound)
    return red.to_json(), True


def _cmd_solve_group(args):
    group, omega, z = _load_group_omega_z(args)
    mode = "real" if args.real else "complex"
    report = solve_group(group, omega, z, mode=mode, tol=args.tol,
                         bound=args.bound)
    return report.to_json(), True


def _cmd_duality(args):
    if args.zm:
        support = parse_support_zm(args.support, args.modulus)
        rep = cyclic.verify_duality_zm(support, tol=args.tol)
        return rep.to_json(), rep.passed
    support = parse_support_z(args.support)
    universes = None
    if args.universe:
        universes = [max(args.universe // 2, support.max_element() + 1),
                     args.universe]
    rep = integers.verify_duality_z(support, tol=args.tol, universes=universes)
    return rep.to_json(), rep.passed


def _cmd_classic_table(args):
    ns = _parse_n_range(args.n)
    rows = _parallel_map(
        lambda n: integers.classic_table([n], tol=args.tol,
                                         fine_grid_m=args.fine_grid_m)[0], ns)
    ok = all(r["exchangeVsGrid"] <= 1e-6 for r in rows)
    return {"rows": rows, "passed": ok}, ok


def _cmd_sparse_family(args):
    res = integers.sparse_family_cf(args.start, args.truncation, tol=args.tol)
    return res.to_json(), True


def _cmd_lambda(args):
    values = _parallel_map(
        lambda half: (half, integers.cf_z(SupportZ(half), tol=args.tol).value),
        [(1,) + rest for rest in
         itertools.combinations(range(2, args.universe + 1), args.n - 1)])
    best = max(values, key=lambda hv: hv[1])
    doc = {"n": args.n, "universe": args.universe,
           "bestHalf": list(best[0]), "bestValue": best[1],
           "evaluated": [[list(h), v] for h, v in values],
           "note": "best value is a certified lower bound"}
    return doc, True


def _cmd_convergence(args):
    support = parse_support_z(args.support)
    report = integers.cf_z(support, tol=args.tol, cross_check=True)
    doc = {"value": report.value,
           "gridSequence": report.meta["gridSequence"],
           "richardson": report.meta["richardson"],
           "crossCheckDelta": report.meta["crossCheckDelta"]}
    return doc, True


def _cmd_oracle_compare(args):
    rows = []
    ok = True
    if args.random:
        rng = np.random.default_rng(args.seed)
        print(f"seed {args.seed}", file=sys.stderr)
        instances = [random_finite_instance(rng, max_size=args.max_size)
                     for _ in range(args.random)]
    else:
        instances = [_load_group_omega_z(args)]
    modes = ["real", "complex"] if args.mode == "both" else [args.mode]
    for group, omega, z in instances:
        for mode in modes:
            reduced = solve_group(group, omega, z, mode=mode, tol=args.tol)
            oracle = cyclic.brute_group_oracle(group, omega, z, mode=mode,
                                               tol=args.tol)
            delta = abs(reduced.value - oracle.value)
            good = delta <= 1e-7
            ok = ok and good
            rows.append({"group": "x".join(f"Z{m}" for m in group.moduli),
                         "z": ",".join(str(c) for c in z.coords),
                         "mode": mode, "reduced": reduced.value,
                         "oracle": oracle.value, "delta": delta,
                         "passed": good})
    doc = {"rows": rows, "passed": ok}
    if args.random:
        doc["seed"] = args.seed
    return doc, ok


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cfextremal",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol_default=1e-8):
        sp.add_argument("--tol", type=float, default=tol_default)
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("check-pd", help="certify positive definiteness")
    sp.add_argument("--seq"), sp.add_argument("--seq-file")
    common(sp)
    sp.set_defaults(fn=_cmd_check_pd)

    sp = sub.add_parser("factor", help="spectral factorization theta * ~theta")
    sp.add_argument("--seq"), sp.add_argument("--seq-file")
    sp.add_argument("--phases", help="comma list of phases for the Z_m root")
    common(sp)
    sp.set_defaults(fn=_cmd_factor)

    sp = sub.add_parser("solve", help="extremal constant on Z or Z_m")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--zm", action="store_true")
    g.add_argument("--z", action="store_true")
    sp.add_argument("-m", "--modulus", type=int)
    sp.add_argument("-H", "--support", required=True,
                    help="inline symmetric set, e.g. '0,1,-1,5,-5'")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--real", action="store_true")
    mode.add_argument("--complex", dest="cplx", action="store_true")
    common(sp)
    sp.set_defaults(fn=_cmd_solve)

    for name, fn in (("reduce", _cmd_reduce), ("solve-group", _cmd_solve_group)):
        sp = sub.add_parser(name, help=f"{name} on a product group")
        sp.add_argument("--group", required=True, help="e.g. 'Z4xZ2', 'RxT'")
        sp.add_argument("--z", required=True, help="coordinates, e.g. '1,0' or '1/5'")
        sp.add_argument("--omega"), sp.add_argument("--omega-file")
        sp.add_argument("--bound", type=int)
        if name == "solve-group":
            mode = sp.add_mutually_exclusive_group()
            mode.add_argument("--real", action="store_true")
            mode.add_argument("--complex", dest="cplx", action="store_true")
        common(sp)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("duality", help="dual-set product identity")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--zm", action="store_true")
    g.add_argument("--z", action="store_true")
    sp.add_argument("-m", "--modulus", type=int)
    sp.add_argument("-H", "--support", required=True)
    sp.add_argument("--universe", type=int)
    common(sp)
    sp.set_defaults(fn=_cmd_duality)
    # the Z-side trend uses a looser default tolerance (truncation error)
    sp.set_defaults(tol=None)

    sp = sub.add_parser("classic-table", help="full-block constants vs formulas")
    sp.add_argument("-n", required=True, help="range '1..6' or list '1,2,6'")
    sp.add_argument("--fine-grid-m", type=int, default=1 << 14)
    common(sp)
    sp.set_defaults(fn=_cmd_classic_table)

    sp = sub.add_parser("sparse-family", help="gap family {0,+-1,+-N..+-M}")
    sp.add_argument("-N", "--start", type=int, required=True)
    sp.add_argument("-M", "--truncation", type=int, required=True)
    common(sp, tol_default=1e-6)
    sp.set_defaults(fn=_cmd_sparse_family)

    sp = sub.add_parser("lambda", help="exhaustive bounded-support search")
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--universe", type=int, default=12)
    common(sp)
    sp.set_defaults(fn=_cmd_lambda)

    sp = sub.add_parser("convergence", help="grid-doubling trace for one support")
    sp.add_argument("-H", "--support", required=True)
    common(sp)
    sp.set_defaults(fn=_cmd_convergence)

    sp = sub.add_parser("oracle-compare", help="reduction vs direct group oracle")
    sp.add_argument("--group"), sp.add_argument("--z")
    sp.add_argument("--omega"), sp.add_argument("--omega-file")
    sp.add_argument("--mode", choices=("real", "complex", "both"), default="both")
    sp.add_argument("--random", type=int, help="number of random instances")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-size", type=int, default=1024)
    common(sp)
    sp.set_defaults(fn=_cmd_oracle_compare)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        if e.code in (0, None):
            return 0
        _emit({"error": "invalid arguments"})
        return 2
    if getattr(args, "tol", 1e-8) is None:
        args.tol = 1e-8 if getattr(args, "zm", False) else 5e-3
    try:
        doc, ok = args.fn(args)
    except (TheoremViolationError, SolverDisagreementError) as e:
        _emit({"error": str(e), "kind": "verification-failure"})
        return 1
    except (ValueError, KeyError, TypeError, OSError,
            json.JSONDecodeError, FactorizationError) as e:
        _emit({"error": str(e)})
        return 2
    except LpError as e:
        _emit({"error": str(e), "kind": "solver-failure"})
        return 1
    rows_key = "rows" if isinstance(doc, dict) and "rows" in doc else None
    _emit(doc, fmt=getattr(args, "format", "json"), rows_key=rows_key)
    return 0 if ok else 1


def console_entry() -> None:  # pragma: no cover
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    console_entry()
