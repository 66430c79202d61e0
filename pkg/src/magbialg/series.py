"""Truncated power series with exact rational coefficients.

Used for the dimension series of the free operads and of the root-restricted
suboperads, and for the bivariate (x, z) check tying the free operad to its
nilpotent quotient.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from magbialg.trees import AritySpec, count_bivariate

DEFAULT_DEGREE = 16


class SeriesError(ValueError):
    pass


class ConsistencyError(AssertionError):
    """Two independent routes to the same quantity disagreed."""


def _frac(c) -> Fraction:
    if isinstance(c, str):
        return Fraction(c)
    return c if isinstance(c, Fraction) else Fraction(c)


@dataclass(frozen=True)
class Series:
    """``coeffs[n]`` is the coefficient of x**n for 0 <= n <= D."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise SeriesError("truncation degree must be >= 1")
        object.__setattr__(self, "coeffs", tuple(_frac(c) for c in self.coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: Iterable, D: int, constant=0) -> Series:
        """Build from a_1, a_2, ... (padded or cut to length D)."""
        cs = [_frac(c) for c in coeffs][:D]
        cs += [Fraction(0)] * (D - len(cs))
        return cls((_frac(constant), *cs))

    @classmethod
    def from_terms(cls, terms: Mapping[int, object], D: int) -> Series:
        cs = [Fraction(0)] * (D + 1)
        for n, c in terms.items():
            if n <= D:
                cs[n] += _frac(c)
        return cls(tuple(cs))

    @classmethod
    def x(cls, D: int) -> Series:
        return cls.from_terms({1: 1}, D)

    @property
    def D(self) -> int:
        return len(self.coeffs) - 1

    @property
    def has_constant(self) -> bool:
        return self.coeffs[0] != 0

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n] if 0 <= n <= self.D else Fraction(0)

    def positive(self) -> list[Fraction]:
        """Coefficients a_1..a_D."""
        return list(self.coeffs[1:])

    def as_ints(self) -> list[int]:
        out = []
        for c in self.coeffs[1:]:
            if c.denominator != 1:
                raise SeriesError(f"coefficient {c} is not an integer")
            out.append(c.numerator)
        return out

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def _check(self, other: Series) -> None:
        if self.D != other.D:
            raise SeriesError(f"truncation mismatch: {self.D} vs {other.D}")

    def __add__(self, other: Series) -> Series:
        self._check(other)
        return Series(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: Series) -> Series:
        self._check(other)
        return Series(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> Series:
        return Series(tuple(-a for a in self.coeffs))

    def scale(self, c) -> Series:
        c = _frac(c)
        return Series(tuple(c * a for a in self.coeffs))

    def __mul__(self, other: Series) -> Series:
        self._check(other)
        D = self.D
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (D + 1)
        for i, ai in enumerate(a):
            if ai:
                for j in range(D - i + 1):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return Series(tuple(out))

    def __pow__(self, k: int) -> Series:
        if k < 0:
            raise SeriesError("negative powers are not supported")
        result = Series.from_terms({0: 1}, self.D)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, inner: Series) -> Series:
        return compose(self, inner)

    def to_json(self) -> str:
        obj: dict = {"D": self.D, "coeffs": [_fmt(c) for c in self.coeffs[1:]]}
        if self.has_constant:
            obj["constant"] = _fmt(self.coeffs[0])
        return json.dumps(obj)

    @classmethod
    def from_json(cls, text: str) -> Series:
        obj = json.loads(text)
        return cls.from_coeffs(obj["coeffs"], obj["D"], obj.get("constant", "0"))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "coefficient"])
        start = 0 if self.has_constant else 1
        for n in range(start, self.D + 1):
            w.writerow([n, _fmt(self.coeffs[n])])
        return buf.getvalue()


def _fmt(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def add(f: Series, g: Series) -> Series:
    return f + g


def multiply(f: Series, g: Series) -> Series:
    return f * g


def compose(f: Series, g: Series) -> Series:
    """f(g(x)) truncated at D; g must have zero constant term."""
    f._check(g)
    if g.coeffs[0] != 0:
        raise SeriesError("inner series of a composition must have zero constant term")
    D = f.D
    out = [Fraction(0)] * (D + 1)
    out[0] = f.coeffs[0]
    power = Series.from_terms({0: 1}, D)
    for k in range(1, D + 1):
        power = power * g
        fk = f.coeffs[k]
        if fk:
            for n in range(k, D + 1):
                out[n] += fk * power.coeffs[n]
    return Series(tuple(out))


def reversion(g: Series) -> Series:
    """The series f with g(f(x)) = x, for g = x + O(x**2).

    Coefficients are solved one degree at a time: [x^n] f^k for k >= 2 only
    involves a_1..a_{n-1}, so a_n is read off the degree-n equation.
    """
    if g.coeffs[0] != 0:
        raise SeriesError("reversion needs zero constant term")
    if g.coeffs[1] != 1:
        raise SeriesError("reversion needs linear coefficient 1")
    D = g.D
    a = [Fraction(0)] * (D + 1)
    # powers[k][n] = [x^n] f^k
    powers = [[Fraction(0)] * (D + 1) for _ in range(D + 1)]
    for n in range(1, D + 1):
        for k in range(2, n + 1):
            powers[k][n] = sum(
                (a[j] * powers[k - 1][n - j] for j in range(1, n - k + 2) if a[j]),
                Fraction(0),
            )
        rest = sum((g.coeffs[k] * powers[k][n] for k in range(2, n + 1) if g.coeffs[k]), Fraction(0))
        a[n] = (1 if n == 1 else 0) - rest
        powers[1][n] = a[n]
    return Series(tuple(a))


def generator_series(S: AritySpec, D: int) -> Series:
    """x - sum_{i in S} x^i, the signed Nil^S series at z = 1."""
    terms: dict[int, object] = {1: 1}
    for i in S.materialize(D):
        terms[i] = -1
    return Series.from_terms(terms, D)


def mag_dims(S: AritySpec, D: int = DEFAULT_DEGREE) -> Series:
    """Dimensions of the free operad on one generator per arity in S."""
    if D < 1:
        raise SeriesError("D must be >= 1")
    return reversion(generator_series(S, D))


def magroot_dims(S: AritySpec, T: AritySpec, D: int = DEFAULT_DEGREE) -> Series:
    """Dimensions of the root-restricted suboperad, computed two ways.

    Route one sums powers of the Mag^S series over root arities in S minus T;
    route two composes the T generator series with the S reversion.  A
    mismatch raises ConsistencyError.
    """
    if not T.issubset(S):
        raise SeriesError(f"T = {T} is not a subset of S = {S}")
    f = mag_dims(S, D)
    by_root = Series.x(D)
    for k in S.difference(T, D):
        by_root = by_root + f**k
    by_inversion = compose(generator_series(T, D), f)
    if by_root != by_inversion:
        raise ConsistencyError(
            f"root-sum {by_root.positive()} != inversion {by_inversion.positive()} for S={S}, T={T}"
        )
    return by_root


# -- bivariate series ---------------------------------------------------------


@dataclass(frozen=True)
class BiSeries:
    """Series in x (truncated at D) and z, stored as {(n, d): coefficient}."""

    D: int
    coeffs: Mapping[tuple[int, int], Fraction]

    def __post_init__(self):
        clean = {
            (n, d): _frac(c) for (n, d), c in self.coeffs.items() if n <= self.D and _frac(c) != 0
        }
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    def __eq__(self, other) -> bool:
        return isinstance(other, BiSeries) and self.D == other.D and self.coeffs == other.coeffs

    def __add__(self, other: BiSeries) -> BiSeries:
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return BiSeries(min(self.D, other.D), out)

    def __mul__(self, other: BiSeries) -> BiSeries:
        D = min(self.D, other.D)
        out: dict[tuple[int, int], Fraction] = {}
        for (n1, d1), c1 in self.coeffs.items():
            for (n2, d2), c2 in other.coeffs.items():
                if n1 + n2 <= D:
                    key = (n1 + n2, d1 + d2)
                    out[key] = out.get(key, 0) + c1 * c2
        return BiSeries(D, out)

    def at_z(self, z) -> Series:
        z = _frac(z)
        terms: dict[int, Fraction] = {}
        for (n, d), c in self.coeffs.items():
            terms[n] = terms.get(n, 0) + c * z**d
        return Series.from_terms(terms, self.D)


def substitute(outer: BiSeries, inner: BiSeries, z_sign: int = -1) -> BiSeries:
    """outer(inner(x, z), z_sign * z): x is replaced by the inner series."""
    D = min(outer.D, inner.D)
    if any(n == 0 for n, _ in inner.coeffs):
        raise SeriesError("inner series must have no x^0 terms")
    result = BiSeries(D, {})
    powers = {1: inner}
    for (n, d), c in outer.coeffs.items():
        if n == 0:
            result = result + BiSeries(D, {(0, d): c * z_sign**d})
            continue
        for k in range(2, n + 1):
            if k not in powers:
                powers[k] = powers[k - 1] * inner
        term = BiSeries(D, {(m, e + d): c * z_sign**d * v for (m, e), v in powers[n].coeffs.items()})
        result = result + term
    return result


def mag_bivariate(S: AritySpec, D: int) -> BiSeries:
    """f_P(x, z) for P = Mag^S, counted by enumerating trees."""
    coeffs = {}
    for n in range(1, D + 1):
        for d, count in count_bivariate(S, n).items():
            coeffs[(n, d)] = count
    return BiSeries(D, coeffs)


def nil_dims(S: AritySpec, D: int = DEFAULT_DEGREE) -> BiSeries:
    """f_Q(x, z) for the nilpotent quotient Q = Nil^S: x + z * sum_{n in S} x^n."""
    coeffs = {(1, 0): 1}
    for n in S.materialize(D):
        coeffs[(n, 1)] = 1
    return BiSeries(D, coeffs)


def koszul_check(S: AritySpec, D: int) -> bool:
    """True iff f_Nil(f_Mag(x, z), -z) == x up to degree D."""
    result = substitute(nil_dims(S, D), mag_bivariate(S, D), z_sign=-1)
    return result == BiSeries(D, {(1, 0): 1})
