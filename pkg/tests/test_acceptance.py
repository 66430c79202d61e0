"""Acceptance criteria, one test each.  All comparisons are exact."""

import subprocess
import sys
import time
from fractions import Fraction
from itertools import combinations

from magbialg.algebra import MagBialgebra
from magbialg.linalg import same_span
from magbialg.series import compose, koszul_check, mag_dims, magroot_dims
from magbialg.structure import pbw_isomorphism, rigidity_check
from magbialg.trees import ALL, AritySpec, enumerate_magroot, enumerate_trees
from magbialg.unital import UnitalMagBialgebra


def _subsets(xs):
    return [c for r in range(len(xs) + 1) for c in combinations(xs, r)]


GRID = [(AritySpec.finite(S), AritySpec.finite(T)) for S in _subsets((2, 3, 4, 5)) for T in _subsets(S)]


def _timed(fn):
    start = time.perf_counter()
    ok = fn()
    return ok, time.perf_counter() - start


def test_criterion_01_printed_series(criterion):
    def run():
        a = magroot_dims(ALL, AritySpec.at_least(3), 7).as_ints()
        b = magroot_dims(ALL, AritySpec.parse("odd3..all"), 7).as_ints()
        return a == [1, 1, 2, 7, 28, 121, 550] and b == [1, 1, 2, 8, 32, 140, 640]

    ok, dt = _timed(run)
    criterion(1, "root-restricted series for T = N>=3 and T = odd >= 3", ok and dt < 1, f"{dt:.3f}s")


def _super_catalan_oracle(D):
    """f = x + f^2 / (1 - f), i.e. f = x + sum_{k>=2} f^k, by fixed-point iteration on integer lists."""
    f = [0] * (D + 1)
    for _ in range(D):
        # g = f^2 / (1 - f) = f^2 + f * g, solved degree by degree
        sq = [sum(f[i] * f[n - i] for i in range(n + 1)) for n in range(D + 1)]
        g = [0] * (D + 1)
        for n in range(D + 1):
            g[n] = sq[n] + sum(f[i] * g[n - i] for i in range(1, n + 1))
        f = [0, 1] + [g[n] for n in range(2, D + 1)]
    return f[1:]


def _closed_form(D):
    """Coefficients of (1 + x - sqrt(1 - 6x + x^2)) / 4 by the binomial series."""
    u = [Fraction(0), Fraction(-6), Fraction(1)] + [Fraction(0)] * (D - 2)
    root = [Fraction(0)] * (D + 1)
    power = [Fraction(1)] + [Fraction(0)] * D
    binom = Fraction(1)
    for j in range(D + 1):
        for n in range(D + 1):
            root[n] += binom * power[n]
        power = [sum(power[i] * u[n - i] for i in range(n + 1)) for n in range(D + 1)]
        binom = binom * (Fraction(1, 2) - j) / (j + 1)
    total = [Fraction(1) - root[0], Fraction(1) - root[1]] + [-c for c in root[2:]]
    return [c / 4 for c in total][1:]


def test_criterion_02_super_catalan(criterion):
    def run():
        got = mag_dims(ALL, 10).as_ints()
        return got == _super_catalan_oracle(10) == _closed_form(10)

    ok, dt = _timed(run)
    criterion(2, "super-Catalan numbers agree with two independent oracles to degree 10", ok and dt < 1, f"{dt:.3f}s")


def test_criterion_03_enumeration_vs_series(criterion):
    def run():
        for S, T in GRID:
            md, mr = mag_dims(S, 10), magroot_dims(S, T, 10)
            for n in range(1, 11):
                if len(enumerate_trees(S, n)) != md[n] or len(enumerate_magroot(S, T, n)) != mr[n]:
                    return False
        return True

    ok, dt = _timed(run)
    criterion(3, f"tree counts match series over {len(GRID)} pairs T <= S <= {{2,3,4,5}}, n <= 10", ok and dt < 30, f"{dt:.2f}s")


def test_criterion_04_pbw(criterion):
    def run():
        series_ok = all(compose(mag_dims(T, 12), magroot_dims(S, T, 12)) == mag_dims(S, 12) for S, T in GRID)
        pairs = [((2, 3), (2,)), ((2, 3, 4), (2, 3)), ((2, 4), (2,))]
        bij_ok = all(
            pbw_isomorphism(AritySpec.finite(S), AritySpec.finite(T), 1, n).is_bijection
            for S, T in pairs
            for n in range(1, 7)
        )
        return series_ok and bij_ok

    ok, dt = _timed(run)
    criterion(4, "series identity to degree 12 on the grid and basis bijections to degree 6", ok and dt < 60, f"{dt:.2f}s")


def test_criterion_05_compatibility(criterion):
    def run():
        vanishing = 0
        for S, T in GRID:
            for dim in (1, 2):
                ctx = MagBialgebra(S, T, dim, 6)
                if not ctx.compat_check():
                    return False, vanishing
                vanishing += sum(1 for l in ctx.S_arities for k in ctx.T_arities if k != l)
        return True, vanishing

    (ok, vanishing), dt = _timed(run)
    criterion(
        5,
        "delta_k mu_l is the identity for k = l and zero otherwise, dim V <= 2, degree <= 6",
        ok and vanishing > 0 and dt < 60,
        f"{vanishing} (k != l) arity pairs, {dt:.2f}s",
    )


def test_criterion_06_rigidity(criterion):
    def run():
        failures = []
        for S in ((2,), (3,), (2, 3)):
            for dim in (1, 2):
                report = rigidity_check(AritySpec.finite(S), dim, 5)
                failures += [r for r in report if r["status"] != "pass"]
                checks = {r["check"] for r in report}
                if len(checks) != 6:
                    failures.append({"missing checks": S})
        return not failures

    ok, dt = _timed(run)
    criterion(6, "e^2 = e, image(e) = Prim, FG = Id, GF = Id and morphism identities, D = 5", ok and dt < 120, f"{dt:.2f}s")


def test_criterion_07_primitives(criterion):
    def run():
        for S, T in GRID:
            for dim in (1, 2):
                ctx = MagBialgebra(S, T, dim, 6)
                for n in range(2, 7):
                    if len(ctx.primitive_basis(n)) != len(enumerate_magroot(S, T, n)) * dim**n:
                        return False
        # the example tree with root arity 3 lies in the kernel of delta_2 and delta_4
        ctx = MagBialgebra(AritySpec.finite([2, 3, 4, 5]), AritySpec.finite([2, 4]), 1, 4)
        x = ctx.labeled([3, 0, 2, 0, 0, 0], [0, 0, 0, 0])
        basis = ctx.basis(4)
        vec = lambda e: {i: e.coeff(b) for i, b in enumerate(basis) if e.coeff(b)}
        prim = [vec(p) for p in ctx.primitive_basis(4)]
        return same_span(prim, prim + [vec(x)])

    ok, dt = _timed(run)
    criterion(7, "primitive dimensions equal root-restricted counts times (dim V)^n, example tree primitive", ok, f"{dt:.2f}s")


def test_criterion_08_koszul(criterion):
    ok = all(koszul_check(S, 8) for S in (AritySpec.finite([2]), AritySpec.finite([2, 3]), ALL))
    criterion(8, "f_Nil(f_Mag(x, z), -z) = x for {2}, {2,3}, N>=2 at D = 8", ok)


def test_criterion_09_unital(criterion):
    def run():
        for dim in (1, 2):
            for n in range(2, 5):
                for m in range(2, n + 1):
                    if next(UnitalMagBialgebra(m, n, dim, 4).counit_violations(), None) is not None:
                        return "counit"
            for m, n in ((2, 2), (2, 3), (3, 4)):
                if not UnitalMagBialgebra(m, n, dim, 4).unital_compat_check():
                    return "compat"
        for m, n in ((2, 3), (2, 4), (3, 4)):
            H = UnitalMagBialgebra(m, n, 2, 5)
            for k in range(2, m + 1):
                if H.reduced_delta(k, H.unit()) != 0 or any(H.reduced_delta(k, H.gen(i)) != 0 for i in range(2)):
                    return "reduced"
            H1 = UnitalMagBialgebra(m, n, 1, 5)
            S, T = AritySpec.interval(2, n), AritySpec.interval(2, m)
            for d in range(1, 6):
                if len(H1.unital_primitive_basis(d)) != len(enumerate_magroot(S, T, d)):
                    return "primitives"
        return None

    failed, dt = _timed(run)
    criterion(9, "counit, compatibility agreement, reduced delta on V and 1, unital primitives", failed is None, failed or f"{dt:.2f}s")


CLI_COMMANDS = [
    ["dims", "--s", "all", "--t", "3..all", "--max-degree", "7"],
    ["dims", "--s", "2,3", "--t", "2", "--max-degree", "10", "--format", "json"],
    ["dims", "--s", "odd3..all", "--max-degree", "9", "--format", "csv"],
    ["enumerate", "--s", "2,3", "--max-degree", "5"],
    ["enumerate", "--s", "2,3,4", "--t", "2", "--root-restricted", "--max-degree", "5", "--format", "json"],
    ["primitives", "--s", "2,3", "--t", "2", "--dim-v", "2", "--max-degree", "4", "--format", "json"],
    ["primitives", "--unital", "--s", "2..4", "--t", "2..3", "--max-degree", "4"],
    ["verify", "compat", "--s", "2,3", "--t", "2", "--dim-v", "2", "--max-degree", "5", "--format", "json"],
    ["verify", "rigidity", "--s", "2", "--dim-v", "2", "--max-degree", "4"],
    ["verify", "pbw", "--s", "2,3", "--t", "2", "--max-degree", "6", "--format", "csv"],
    ["verify", "koszul", "--s", "all", "--max-degree", "8", "--format", "json"],
    ["verify", "unital-compat", "--s", "2..3", "--t", "2", "--max-degree", "4"],
    ["verify", "unital-primitives", "--s", "2..4", "--t", "2", "--max-degree", "5", "--format", "json"],
]


def test_criterion_10_cli_determinism(criterion):
    mismatched = []
    for argv in CLI_COMMANDS:
        cmd = [sys.executable, "-m", "magbialg", *argv]
        first = subprocess.run(cmd, capture_output=True)
        second = subprocess.run(cmd, capture_output=True)
        if first.returncode != 0 or first.stdout != second.stdout or first.returncode != second.returncode:
            mismatched.append(" ".join(argv))
    criterion(10, f"{len(CLI_COMMANDS)} CLI invocations byte-identical across two runs", not mismatched, "; ".join(mismatched))
