"""Planar reduced trees, arity sets, enumeration and operadic composition.

A tree is stored as its preorder arity code: each vertex contributes its
number of children, leaves contribute 0.  ``(0,)`` is the single leaf ``|``,
``(2, 0, 0)`` the binary corolla and ``()`` the empty tree (degree 0), which
only the unital machinery accepts.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence


class TreeError(ValueError):
    pass


class PlanarTree:
    """Immutable planar reduced tree given by its preorder arity code."""

    __slots__ = ("code", "_hash")

    def __init__(self, code: Iterable[int], *, check: bool = True):
        code = tuple(code)
        if check:
            _validate(code)
        object.__setattr__(self, "code", code)
        object.__setattr__(self, "_hash", hash(code))

    def __setattr__(self, name, value):
        raise AttributeError("PlanarTree is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return isinstance(other, PlanarTree) and self.code == other.code

    def __lt__(self, other: PlanarTree) -> bool:
        return self.code < other.code

    def __le__(self, other: PlanarTree) -> bool:
        return self.code <= other.code

    def __repr__(self) -> str:
        return f"PlanarTree({to_text(self)!r})"

    def __reduce__(self):
        return (PlanarTree, (self.code,))

    @property
    def degree(self) -> int:
        return self.code.count(0)

    @property
    def is_empty(self) -> bool:
        return not self.code

    @property
    def is_leaf(self) -> bool:
        return self.code == (0,)

    @property
    def vertex_count(self) -> int:
        """Number of internal vertices."""
        return len(self.code) - self.degree

    def arities(self) -> set[int]:
        return {a for a in self.code if a}

    def branches(self) -> tuple[PlanarTree, ...]:
        """The subtrees hanging from the root; ``()`` for a leaf or ``∅``."""
        if len(self.code) <= 1:
            return ()
        return tuple(PlanarTree(c, check=False) for c in _split(self.code[1:], self.code[0]))


def _validate(code: tuple[int, ...]) -> None:
    if not code:
        return
    pending = 1
    for i, a in enumerate(code):
        if not isinstance(a, int) or a < 0:
            raise TreeError(f"invalid code entry {a!r}")
        if a == 1:
            raise TreeError("arity-1 vertices are not allowed in reduced trees")
        if pending == 0:
            raise TreeError(f"code {code} has trailing entries after position {i}")
        pending += a - 1
    if pending != 0:
        raise TreeError(f"code {code} is incomplete")


def _split(code: Sequence[int], k: int) -> list[tuple[int, ...]]:
    """Split a concatenation of ``k`` tree codes into the individual codes."""
    out = []
    start = 0
    for _ in range(k):
        pending = 1
        i = start
        while pending:
            pending += code[i] - 1
            i += 1
        out.append(tuple(code[start:i]))
        start = i
    if start != len(code):
        raise TreeError("forest code has leftover entries")
    return out


LEAF = PlanarTree((0,))
EMPTY = PlanarTree(())


def corolla(k: int) -> PlanarTree:
    return PlanarTree((k,) + (0,) * k)


# -- arity sets ---------------------------------------------------------------


@dataclass(frozen=True)
class AritySpec:
    """A subset of {2, 3, ...}: either finite or an infinite progression.

    ``AritySpec.finite({2, 3})``, ``AritySpec.at_least(3)`` and
    ``AritySpec.progression(3, 2)`` (odd arities >= 3) cover everything the
    CLI accepts.  Infinite sets are only ever materialized up to a bound.
    """

    members: frozenset[int] = frozenset()
    start: int | None = None
    step: int = 1

    def __post_init__(self):
        if any(not isinstance(k, int) or k < 2 for k in self.members):
            raise TreeError(f"arities must be integers >= 2, got {sorted(self.members)}")
        if self.start is not None:
            if self.members:
                raise TreeError("progression arity sets carry no explicit members")
            if self.start < 2 or self.step < 1:
                raise TreeError("progression must start at >= 2 with positive step")

    @classmethod
    def finite(cls, members: Iterable[int]) -> AritySpec:
        return cls(members=frozenset(members))

    @classmethod
    def at_least(cls, start: int = 2) -> AritySpec:
        return cls(start=start)

    @classmethod
    def progression(cls, start: int, step: int) -> AritySpec:
        return cls(start=start, step=step)

    @classmethod
    def interval(cls, lo: int, hi: int) -> AritySpec:
        return cls.finite(range(lo, hi + 1))

    @classmethod
    def parse(cls, text: str) -> AritySpec:
        """Parse ``2,3,5``, ``all``, ``3..all``, ``odd3..all``, ``2..5`` or ``none``."""
        s = text.strip().lower()
        if s in ("", "none", "empty"):
            return cls.finite(())
        if s == "all":
            return cls.at_least(2)
        m = re.fullmatch(r"(odd|even)?(\d+)\.\.all", s)
        if m:
            parity, lo = m.group(1), int(m.group(2))
            if parity is None:
                return cls.at_least(lo)
            lo = max(lo, 2)
            if lo % 2 != (parity == "odd"):
                lo += 1
            return cls.progression(lo, 2)
        members: set[int] = set()
        for part in s.split(","):
            part = part.strip()
            m = re.fullmatch(r"(\d+)\.\.(\d+)", part)
            try:
                if m:
                    lo, hi = int(m.group(1)), int(m.group(2))
                    if lo > hi:
                        raise ValueError
                    members.update(range(lo, hi + 1))
                else:
                    members.add(int(part))
            except ValueError:
                raise TreeError(f"cannot parse arity set {text!r}") from None
        return cls.finite(members)

    @property
    def is_finite(self) -> bool:
        return self.start is None

    def __contains__(self, k: int) -> bool:
        if self.start is None:
            return k in self.members
        return k >= self.start and (k - self.start) % self.step == 0

    def materialize(self, bound: int) -> tuple[int, ...]:
        if self.start is None:
            return tuple(sorted(k for k in self.members if k <= bound))
        return tuple(range(self.start, bound + 1, self.step))

    def issubset(self, other: AritySpec) -> bool:
        if self.start is None:
            return all(k in other for k in self.members)
        if other.start is None:
            return False
        return self.start in other and self.step % other.step == 0

    def difference(self, other: AritySpec, bound: int) -> tuple[int, ...]:
        return tuple(k for k in self.materialize(bound) if k not in other)

    def __str__(self) -> str:
        if self.start is None:
            return ",".join(map(str, sorted(self.members))) or "none"
        if self.step == 1:
            return "all" if self.start == 2 else f"{self.start}..all"
        if self.step == 2:
            return f"{'odd' if self.start % 2 else 'even'}{self.start}..all"
        return f"{{{self.start}+{self.step}k}}"


ALL = AritySpec.at_least(2)


def _as_spec(S: AritySpec | Iterable[int]) -> AritySpec:
    return S if isinstance(S, AritySpec) else AritySpec.finite(S)


# -- enumeration --------------------------------------------------------------


@lru_cache(maxsize=None)
def _forests(arities: tuple[int, ...], k: int, n: int) -> tuple[tuple[int, ...], ...]:
    """Concatenated codes of all k-tuples of trees with n leaves in total."""
    if k == 1:
        return _tree_codes(arities, n)
    out = []
    for first in range(1, n - k + 2):
        heads = _tree_codes(arities, first)
        if not heads:
            continue
        tails = _forests(arities, k - 1, n - first)
        out.extend(h + t for h in heads for t in tails)
    return tuple(out)


@lru_cache(maxsize=None)
def _tree_codes(arities: tuple[int, ...], n: int) -> tuple[tuple[int, ...], ...]:
    if n == 1:
        return ((0,),)
    codes = [(k,) + f for k in arities if k <= n for f in _forests(arities, k, n)]
    codes.sort()
    return tuple(codes)


@lru_cache(maxsize=None)
def _trees(arities: tuple[int, ...], n: int) -> tuple[PlanarTree, ...]:
    return tuple(PlanarTree(c, check=False) for c in _tree_codes(arities, n))


def enumerate_trees(S: AritySpec | Iterable[int], n: int) -> list[PlanarTree]:
    """All trees with n leaves and internal arities in S, in code order."""
    if n < 1:
        raise TreeError("degree must be >= 1")
    return list(_trees(_as_spec(S).materialize(n), n))


def count_trees(S: AritySpec | Iterable[int], n: int) -> int:
    return len(_tree_codes(_as_spec(S).materialize(n), n))


def enumerate_magroot(S: AritySpec | Iterable[int], T: AritySpec | Iterable[int], n: int) -> list[PlanarTree]:
    """Trees of degree n spanning the root-restricted operad: root arity in S minus T."""
    S, T = _as_spec(S), _as_spec(T)
    if not T.issubset(S):
        raise TreeError(f"T = {T} is not a subset of S = {S}")
    if n == 1:
        return [LEAF]
    return [t for t in _trees(S.materialize(n), n) if t.code[0] not in T]


def count_bivariate(S: AritySpec | Iterable[int], n: int) -> dict[int, int]:
    """Map from number of internal vertices to number of trees of degree n."""
    counts: dict[int, int] = {}
    for t in enumerate_trees(S, n):
        d = t.vertex_count
        counts[d] = counts.get(d, 0) + 1
    return dict(sorted(counts.items()))


def in_arity_set(t: PlanarTree, S: AritySpec | Iterable[int]) -> bool:
    S = _as_spec(S)
    return all(a in S for a in t.code if a)


# -- composition --------------------------------------------------------------


def graft(k: int, *children: PlanarTree) -> PlanarTree:
    if k < 2:
        raise TreeError(f"grafting arity must be >= 2, got {k}")
    if len(children) != k:
        raise TreeError(f"graft({k}) needs {k} children, got {len(children)}")
    if any(c.is_empty for c in children):
        raise TreeError("cannot graft the empty tree")
    return PlanarTree((k,) + tuple(itertools.chain.from_iterable(c.code for c in children)), check=False)


def ungraft(m: int, t: PlanarTree) -> tuple[PlanarTree, ...] | None:
    """Root decomposition of t if its root has arity m, else None (zero)."""
    if len(t.code) <= 1 or t.code[0] != m:
        return None
    return t.branches()


def root_arity(t: PlanarTree) -> int | None:
    return t.code[0] if len(t.code) > 1 else None


def plug(t: PlanarTree, args: Sequence[PlanarTree]) -> PlanarTree:
    """Operadic composition: substitute args[i] for the i-th leaf of t."""
    if len(args) != t.degree:
        raise TreeError(f"tree of degree {t.degree} cannot take {len(args)} arguments")
    if any(a.is_empty for a in args):
        raise TreeError("cannot plug the empty tree")
    it = iter(args)
    out: list[int] = []
    for a in t.code:
        if a:
            out.append(a)
        else:
            out.extend(next(it).code)
    return PlanarTree(out, check=False)


# -- text and JSON formats ----------------------------------------------------


def to_text(t: PlanarTree) -> str:
    return ",".join(map(str, t.code))


def from_text(text: str) -> PlanarTree:
    text = text.strip()
    if not text:
        return EMPTY
    try:
        return PlanarTree(int(x) for x in text.split(","))
    except ValueError:
        raise TreeError(f"cannot parse tree {text!r}") from None


def to_nested(t: PlanarTree):
    """Nested-list form: leaf ``[]``, vertex = list of children, ∅ = None."""
    if t.is_empty:
        return None
    if t.is_leaf:
        return []
    return [to_nested(b) for b in t.branches()]


def from_nested(obj) -> PlanarTree:
    if obj is None:
        return EMPTY

    def walk(node, out):
        if not isinstance(node, list):
            raise TreeError(f"tree JSON nodes must be lists, got {node!r}")
        out.append(len(node))
        for child in node:
            walk(child, out)

    code: list[int] = []
    walk(obj, code)
    return PlanarTree(code)


def to_json(t: PlanarTree) -> str:
    return json.dumps(to_nested(t), separators=(",", ":"))


def from_json(text: str) -> PlanarTree:
    return from_nested(json.loads(text))
