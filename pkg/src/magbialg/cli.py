"""Command-line front end: dimension tables, tree listings, primitive bases and checks.

Examples::

    magbialg dims --s all --t 3..all --max-degree 7
    magbialg enumerate --s 2,3 --max-degree 4 --format json
    magbialg primitives --s 2,3 --t 2 --dim-v 1 --max-degree 4
    magbialg verify pbw --s 2,3 --t 2 --max-degree 6
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from magbialg import series
from magbialg.algebra import MagBialgebra
from magbialg.structure import pbw_report, rigidity_report
from magbialg.trees import AritySpec, TreeError, enumerate_magroot, enumerate_trees, to_nested, to_text
from magbialg.unital import UnitalMagBialgebra

OUTPUT_DIR_ENV = "MAGBIALG_OUTPUT_DIR"
DEFAULT_DEGREE = 12
INFINITE_DEGREE_GUARD = 20

CHECKS = ("compat", "rigidity", "pbw", "koszul", "unital-compat", "unital-primitives")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    S: AritySpec
    T: AritySpec
    max_degree: int
    dim_v: int
    fmt: str
    output: Path | None
    check: str | None = None
    root_restricted: bool = False
    unital: bool = False


def _parse_set(text: str, flag: str) -> AritySpec:
    try:
        return AritySpec.parse(text)
    except TreeError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def make_config(args: argparse.Namespace) -> RunConfig:
    S = _parse_set(args.s, "--s")
    T = S if args.t is None else _parse_set(args.t, "--t")
    if not T.issubset(S):
        raise UsageError(f"--t {T} is not a subset of --s {S}")
    if args.max_degree < 1:
        raise UsageError("--max-degree must be >= 1")
    if args.dim_v < 1:
        raise UsageError("--dim-v must be >= 1")
    if not S.is_finite and args.max_degree > INFINITE_DEGREE_GUARD and not args.force:
        raise UsageError(f"--max-degree > {INFINITE_DEGREE_GUARD} with infinite S needs --force")
    output = None
    if args.output:
        output = Path(args.output)
        base = os.environ.get(OUTPUT_DIR_ENV)
        if base and not output.is_absolute():
            output = Path(base) / output
    cfg = RunConfig(
        command=args.command,
        S=S,
        T=T,
        max_degree=args.max_degree,
        dim_v=args.dim_v,
        fmt=args.format,
        output=output,
        check=getattr(args, "check", None),
        root_restricted=getattr(args, "root_restricted", False),
        unital=getattr(args, "unital", False),
    )
    if cfg.unital or (cfg.check or "").startswith("unital"):
        _unital_context(cfg)
    return cfg


def _unital_context(cfg: RunConfig) -> UnitalMagBialgebra:
    try:
        return UnitalMagBialgebra.from_sets(cfg.S, cfg.T, cfg.dim_v, cfg.max_degree)
    except TreeError as exc:
        raise UsageError(str(exc)) from None


# -- commands -----------------------------------------------------------------


def _table(cfg: RunConfig, header: list[str], rows: list[list]) -> str:
    if cfg.fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(x).rjust(w) for x, w in zip(r, widths)) for r in [header, *rows]]
    return "\n".join(lines) + "\n"


def _num(c):
    return int(c) if c.denominator == 1 else str(c)


def cmd_dims(cfg: RunConfig) -> tuple[str, int]:
    mag = series.mag_dims(cfg.S, cfg.max_degree)
    root = series.magroot_dims(cfg.S, cfg.T, cfg.max_degree)
    rows = [[n, _num(mag[n]), _num(root[n])] for n in range(1, cfg.max_degree + 1)]
    return _table(cfg, ["n", "mag", "magroot"], rows), 0


def cmd_enumerate(cfg: RunConfig) -> tuple[str, int]:
    listing = {}
    for n in range(1, cfg.max_degree + 1):
        trees = enumerate_magroot(cfg.S, cfg.T, n) if cfg.root_restricted else enumerate_trees(cfg.S, n)
        listing[n] = trees
    if cfg.fmt == "json":
        obj = {str(n): [to_nested(t) for t in ts] for n, ts in listing.items()}
        return json.dumps(obj, separators=(",", ":")) + "\n", 0
    rows = [[n, to_text(t)] for n, ts in listing.items() for t in ts]
    if cfg.fmt == "csv":
        return _table(cfg, ["n", "tree"], rows), 0
    return "".join(f"{n}\t{code}\n" for n, code in rows), 0


def cmd_primitives(cfg: RunConfig) -> tuple[str, int]:
    out = []
    if cfg.unital:
        ctx = _unital_context(cfg)
        for d in range(1, cfg.max_degree + 1):
            out.append({"degree": d, "basis": [p.to_obj(ctx.V.names) for p in ctx.unital_primitive_basis(d)]})
    else:
        ctx = MagBialgebra(cfg.S, cfg.T, cfg.dim_v, cfg.max_degree)
        for d in range(1, cfg.max_degree + 1):
            out.append({"degree": d, "basis": [p.to_obj(ctx.V.names) for p in ctx.primitive_basis(d)]})
    if cfg.fmt == "json":
        return json.dumps(out, indent=2) + "\n", 0
    rows = [[rec["degree"], len(rec["basis"])] for rec in out]
    if cfg.fmt == "csv":
        return _table(cfg, ["degree", "dimension"], rows), 0
    lines = []
    for rec in out:
        lines.append(f"degree {rec['degree']}: dimension {len(rec['basis'])}")
        for el in rec["basis"]:
            lines.append("  " + json.dumps(el, separators=(",", ":")))
    return "\n".join(lines) + "\n", 0


def _record(check: str, degree, ok: bool, witness=None) -> dict:
    return {"check": check, "degree": degree, "status": "pass" if ok else "fail", "witness": None if ok else witness}


def _by_degree(check: str, violations, degrees) -> list[dict]:
    """One record per degree, keeping the first witness found in each."""
    first: dict = {}
    for v in violations:
        first.setdefault(v["degree"], v)
    return [_record(check, d, d not in first, first.get(d)) for d in degrees]


def run_check(cfg: RunConfig) -> list[dict]:
    D = cfg.max_degree
    if cfg.check == "compat":
        ctx = MagBialgebra(cfg.S, cfg.T, cfg.dim_v, D)
        return _by_degree("compat", ctx.compat_violations(D), range(2, D + 1))
    if cfg.check == "rigidity":
        if cfg.S != cfg.T:
            raise UsageError("rigidity needs --t equal to --s")
        return rigidity_report(MagBialgebra(cfg.S, cfg.S, cfg.dim_v, D))
    if cfg.check == "pbw":
        return pbw_report(cfg.S, cfg.T, cfg.dim_v, D)
    if cfg.check == "koszul":
        result = series.substitute(series.nil_dims(cfg.S, D), series.mag_bivariate(cfg.S, D))
        report = []
        for n in range(1, D + 1):
            got = {f"{d}": str(c) for (k, d), c in result.coeffs.items() if k == n}
            want = {"0": "1"} if n == 1 else {}
            report.append(_record("koszul", n, got == want, got))
        return report
    if cfg.check == "unital-compat":
        ctx = _unital_context(cfg)
        return _by_degree("counit", ctx.counit_violations(D), range(0, D + 1)) + _by_degree(
            "unital_compat", ctx.unital_compat_violations(D), range(2, D + 1)
        )
    if cfg.check == "unital-primitives":
        ctx = _unital_context(cfg)
        report = []
        for d in range(1, D + 1):
            dim = len(ctx.unital_primitive_basis(d))
            want = len(enumerate_magroot(ctx.S, ctx.T, d)) * cfg.dim_v**d
            report.append(_record("unital_primitives", d, dim == want, {"kernel": dim, "expected": want}))
        return report
    raise UsageError(f"unknown check {cfg.check!r}")


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    report = run_check(cfg)
    code = 0 if all(r["status"] == "pass" for r in report) else 1
    if cfg.fmt == "json":
        return json.dumps(report, indent=2) + "\n", code
    if cfg.fmt == "csv":
        rows = [[r["check"], r["degree"], r["status"]] for r in report]
        return _table(cfg, ["check", "degree", "status"], rows), code
    lines = [f"{r['status'].upper():4}  {r['check']}  degree={r['degree']}" for r in report]
    for r in report:
        if r["status"] == "fail":
            lines.append(json.dumps(r, default=str))
    lines.append("ALL PASS" if code == 0 else "FAILED")
    return "\n".join(lines) + "\n", code


COMMANDS = {"dims": cmd_dims, "enumerate": cmd_enumerate, "primitives": cmd_primitives, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--s", default="2", help="arity set S: 2,3,5 | all | 3..all | odd3..all | 2..5")
    common.add_argument("--t", default=None, help="arity set T (subset of S); defaults to S")
    common.add_argument("--max-degree", type=int, default=DEFAULT_DEGREE)
    common.add_argument("--dim-v", type=int, default=1)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--output", help=f"write here instead of stdout (relative to ${OUTPUT_DIR_ENV} if set)")
    common.add_argument("--force", action="store_true", help=f"allow degree > {INFINITE_DEGREE_GUARD} for infinite S")

    parser = argparse.ArgumentParser(prog="magbialg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("dims", parents=[common], help="dimension table of Mag^S and Mag_root^{T,S}")
    p = sub.add_parser("enumerate", parents=[common], help="list planar trees up to the max degree")
    p.add_argument("--root-restricted", action="store_true", help="only trees with root arity in S minus T")
    p = sub.add_parser("primitives", parents=[common], help="primitive basis per degree")
    p.add_argument("--unital", action="store_true", help="unital (m, n) case; S and T must be {2..k}")
    p = sub.add_parser("verify", parents=[common], help="run a structural check; exit 1 on failure")
    p.add_argument("check", choices=CHECKS)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        text, code = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"magbialg: error: {exc}", file=sys.stderr)
        return 2
    if cfg.output:
        cfg.output.parent.mkdir(parents=True, exist_ok=True)
        cfg.output.write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
