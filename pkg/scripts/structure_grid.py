"""Run the structural checks over a grid of arity sets and record timings.

For every T <= S <= {2..max_arity} this runs the compatibility check and the
primitive-dimension check; for S = T it also runs the rigidity report.

    python3 scripts/structure_grid.py --max-arity 4 --max-degree 5 --dims 1 2
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

from magbialg.algebra import MagBialgebra
from magbialg.structure import rigidity_report
from magbialg.trees import AritySpec, enumerate_magroot


@dataclass
class GridConfig:
    max_arity: int = 4
    max_degree: int = 5
    dims: list[int] = field(default_factory=lambda: [1, 2])
    rigidity: bool = True
    out: Path | None = None


def subsets(xs):
    return [c for r in range(len(xs) + 1) for c in combinations(xs, r)]


def run_case(S: AritySpec, T: AritySpec, dim: int, cfg: GridConfig) -> dict:
    ctx = MagBialgebra(S, T, dim, cfg.max_degree)
    rec = {"S": str(S), "T": str(T), "dim_v": dim}

    t0 = time.perf_counter()
    rec["compat"] = ctx.compat_check()
    rec["compat_seconds"] = round(time.perf_counter() - t0, 4)

    t0 = time.perf_counter()
    dims = [len(ctx.primitive_basis(n)) for n in range(1, cfg.max_degree + 1)]
    expected = [len(enumerate_magroot(S, T, n)) * dim**n for n in range(1, cfg.max_degree + 1)]
    rec["primitive_dims"] = dims
    rec["primitives"] = dims == expected
    rec["primitives_seconds"] = round(time.perf_counter() - t0, 4)

    if cfg.rigidity and S == T:
        t0 = time.perf_counter()
        report = rigidity_report(ctx)
        rec["rigidity"] = all(r["status"] == "pass" for r in report)
        rec["rigidity_seconds"] = round(time.perf_counter() - t0, 4)
    return rec


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-arity", type=int, default=GridConfig.max_arity)
    p.add_argument("--max-degree", type=int, default=GridConfig.max_degree)
    p.add_argument("--dims", type=int, nargs="+", default=[1, 2])
    p.add_argument("--no-rigidity", action="store_true")
    p.add_argument("--out", type=Path, default=None, help="write grid.json here")
    a = p.parse_args(argv)
    cfg = GridConfig(a.max_arity, a.max_degree, a.dims, not a.no_rigidity, a.out)

    records = []
    for s in subsets(tuple(range(2, cfg.max_arity + 1))):
        for t in subsets(s):
            for dim in cfg.dims:
                rec = run_case(AritySpec.finite(s), AritySpec.finite(t), dim, cfg)
                records.append(rec)
                status = all(rec.get(k, True) for k in ("compat", "primitives", "rigidity"))
                print(
                    f"{'ok  ' if status else 'FAIL'} S={rec['S']:<8} T={rec['T']:<8} dimV={dim} "
                    f"compat {rec['compat_seconds']:.3f}s  prim {rec['primitives_seconds']:.3f}s"
                    + (f"  rigidity {rec['rigidity_seconds']:.3f}s" if "rigidity" in rec else "")
                )
    if cfg.out:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / "grid.json").write_text(json.dumps(records, indent=2) + "\n")
    return 0 if all(all(r.get(k, True) for k in ("compat", "primitives", "rigidity")) for r in records) else 1


if __name__ == "__main__":
    raise SystemExit(main())
