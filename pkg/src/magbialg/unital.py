"""Unital (m, n)-magmatic bialgebras: S = {2..n}, T = {2..m}, unit = empty tree.

Grafting absorbs units (``mu_l`` with a unit argument is ``mu_{l-1}`` on the
rest), ungrafting sums over every way of writing a tree as a k-fold grafting
with empty slots allowed, and primitives are taken with respect to the reduced
co-operations defined through shuffles.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from magbialg import linalg
from magbialg.algebra import (
    UNIT,
    BasisSpace,
    Element,
    LabeledTree,
    MagBialgebra,
    TensorElement,
    _fmt,
    _show,
)
from magbialg.series import ConsistencyError
from magbialg.trees import AritySpec, TreeError, enumerate_magroot, enumerate_trees, graft


class UnitalElement(Element):
    """Element of K·1 ⊕ H̄; ``unit_coeff`` is the augmentation."""

    __slots__ = ()

    def to_obj(self, names: Sequence[str]) -> dict:
        return {"unit": _fmt(self.unit_coeff), "terms": super().to_obj(names)}

    def to_json(self, names: Sequence[str]) -> str:
        return json.dumps(self.to_obj(names))

    @classmethod
    def from_obj(cls, obj: dict, names: Sequence[str]) -> UnitalElement:
        body = Element.from_obj(obj["terms"], names)
        return cls(list(body.terms.items()) + [(UNIT, Fraction(obj["unit"]))])

    @classmethod
    def from_json(cls, text: str, names: Sequence[str]) -> UnitalElement:
        return cls.from_obj(json.loads(text), names)


def _unital(x: Element) -> UnitalElement:
    if isinstance(x, UnitalElement):
        return x
    out = object.__new__(UnitalElement)
    out.terms = dict(x.terms)
    return out


@lru_cache(maxsize=None)
def shuffles(p: int, q: int) -> tuple[tuple[int, ...], ...]:
    """(p, q)-shuffles as tuples of images (1-based), in lexicographic order."""
    if p < 0 or q < 0:
        raise ValueError("shuffle sizes must be >= 0")
    out = []
    for first in itertools.combinations(range(1, p + q + 1), p):
        rest = [i for i in range(1, p + q + 1) if i not in first]
        out.append(tuple(first) + tuple(rest))
    return tuple(sorted(out))


def _unit_spread(lt: LabeledTree, k: int) -> Iterator[tuple[LabeledTree, ...]]:
    """1^{⊗i} ⊗ lt ⊗ 1^{⊗k-i-1} for i = 0..k-1."""
    for i in range(k):
        yield (UNIT,) * i + (lt,) + (UNIT,) * (k - i - 1)


def _placements(items: Sequence[LabeledTree], k: int) -> Iterator[tuple[LabeledTree, ...]]:
    """Interleave ``items`` in order with units to fill k slots."""
    for pos in itertools.combinations(range(k), len(items)):
        slots = [UNIT] * k
        for p, it in zip(pos, items):
            slots[p] = it
        yield tuple(slots)


def _branches(lt: LabeledTree) -> tuple[LabeledTree, ...]:
    out = []
    pos = 0
    for b in lt.shape.branches():
        out.append(LabeledTree(b, lt.labels[pos : pos + b.degree]))
        pos += b.degree
    return tuple(out)


def _collapse(parts: Sequence[LabeledTree]) -> LabeledTree:
    """Graft with unit absorption: drop units, mu_1 = Id, empty input gives 1."""
    rest = [p for p in parts if p != UNIT]
    if not rest:
        return UNIT
    if len(rest) == 1:
        return rest[0]
    shape = graft(len(rest), *(p.shape for p in rest))
    return LabeledTree(shape, tuple(itertools.chain.from_iterable(p.labels for p in rest)))


class UnitalMagBialgebra:
    """The free unital n-magmatic algebra on V with its m-ary co-operations."""

    def __init__(self, m: int, n: int, V: BasisSpace | int, max_degree: int):
        if not 2 <= m <= n:
            raise TreeError(f"need 2 <= m <= n, got m={m}, n={n}")
        self.m, self.n = m, n
        self.S = AritySpec.interval(2, n)
        self.T = AritySpec.interval(2, m)
        self.free = MagBialgebra(self.S, self.T, V, max_degree)
        self.V = self.free.V
        self.max_degree = max_degree

    @classmethod
    def from_sets(cls, S: AritySpec, T: AritySpec, V, max_degree: int) -> UnitalMagBialgebra:
        """Accept only interval arity sets {2..n} ⊇ {2..m}."""
        for name, A in (("S", S), ("T", T)):
            if not A.is_finite or not A.members or A.materialize(max(A.members)) != tuple(range(2, max(A.members) + 1)):
                raise TreeError(f"unital mode needs {name} = {{2..k}}, got {A}")
        return cls(max(T.members), max(S.members), V, max_degree)

    def __repr__(self) -> str:
        return f"UnitalMagBialgebra(m={self.m}, n={self.n}, dim V={self.V.dim}, D={self.max_degree})"

    def unit(self) -> UnitalElement:
        return UnitalElement.basis(UNIT)

    def gen(self, label) -> UnitalElement:
        return _unital(self.free.gen(label))

    def labeled(self, code, labels, coeff=1) -> UnitalElement:
        return _unital(self.free.labeled(code, labels, coeff))

    def basis(self, d: int) -> list[LabeledTree]:
        return [UNIT] if d == 0 else self.free.basis(d)

    # operations

    def unital_mu(self, l: int, *args: Element) -> UnitalElement:
        if not 2 <= l <= self.n:
            raise TreeError(f"no {l}-ary operation in the unital {self.n}-magmatic algebra")
        if len(args) != l:
            raise ValueError(f"mu({l}) needs {l} arguments")
        terms: dict = {}
        for combo in itertools.product(*(a.terms.items() for a in args)):
            key = _collapse([lt for lt, _ in combo])
            c = Fraction(1)
            for _, v in combo:
                c *= v
            terms[key] = terms.get(key, 0) + c
        out = UnitalElement(terms)
        self.free._check_degree(out)
        return out

    def unital_delta(self, k: int, x: Element) -> TensorElement:
        """Ungrafting with empty trees allowed, by the explicit case split."""
        if not 2 <= k <= self.m:
            raise TreeError(f"no {k}-ary co-operation for m = {self.m}")
        terms: dict = {}

        def put(key, c):
            terms[key] = terms.get(key, 0) + c

        for lt, c in x.terms.items():
            if lt == UNIT:
                put((UNIT,) * k, c)
                continue
            for key in _unit_spread(lt, k):
                put(key, c)
            if not lt.shape.is_leaf:
                bs = _branches(lt)
                if len(bs) <= k:
                    for key in _placements(bs, k):
                        put(key, c)
        return TensorElement(k, terms)

    def unified_delta(self, k: int, x: Element) -> TensorElement:
        """Brute force: sum of y_1 ⊗ ... ⊗ y_k over all k-tuples of basis
        trees (units allowed) whose unital k-fold grafting equals the term."""
        terms: dict = {}
        for lt, c in x.terms.items():
            for ys in self._tuples_of_degree(k, lt.degree):
                if _collapse(ys) == lt:
                    terms[ys] = terms.get(ys, 0) + c
        return TensorElement(k, terms)

    def _tuples_of_degree(self, k: int, d: int) -> Iterator[tuple[LabeledTree, ...]]:
        if k == 0:
            if d == 0:
                yield ()
            return
        for first in range(d + 1):
            for lt in self.basis(first):
                for rest in self._tuples_of_degree(k - 1, d - first):
                    yield (lt,) + rest

    def reduced_delta(self, k: int, x: Element) -> TensorElement:
        """delta_k = Delta_k - sum_{l<k} sum_{σ ∈ Sh(l, k-l)} σ(delta_l, 1, ..., 1).

        Acts on the augmentation ideal: the unit component of x is dropped,
        so reduced co-operations vanish on 1.
        """
        if not 1 <= k <= self.m:
            raise TreeError(f"no reduced {k}-ary co-operation for m = {self.m}")
        xbar = x.reduced()
        cache: dict[int, TensorElement] = {1: TensorElement(1, {(lt,): c for lt, c in xbar.terms.items()})}
        for j in range(2, k + 1):
            out = self.unital_delta(j, xbar)
            for l in range(1, j):
                padded = cache[l].tensor(TensorElement(j - l, {(UNIT,) * (j - l): 1}))
                for sigma in shuffles(l, j - l):
                    out = out - padded.permute([s - 1 for s in sigma])
            cache[j] = out
        return cache[k]

    def reduced_delta_tree(self, t, x: Element) -> TensorElement:
        if t.is_leaf:
            return TensorElement(1, {(lt,): c for lt, c in x.reduced().terms.items()})
        first = self.reduced_delta(t.code[0], x)
        out = TensorElement(t.degree)
        for key, c in first.terms.items():
            piece = TensorElement(0, {(): 1})
            for b, lt in zip(t.branches(), key):
                piece = piece.tensor(self.reduced_delta_tree(b, Element.basis(lt)))
            out = out + c * piece
        return out

    # checks

    def case_split_delta_mu(self, k: int, xs: Sequence[LabeledTree]) -> TensorElement:
        """Case-split formula (k < l, k = l, k > l) for Delta_k ∘ mu_l."""
        l = len(xs)
        xbar = _collapse(xs)
        terms: dict = {}
        for key in _unit_spread(xbar, k):
            terms[key] = terms.get(key, 0) + 1
        if k == l:
            terms[tuple(xs)] = terms.get(tuple(xs), 0) + 1
        elif k > l:
            for key in _placements(xs, k):
                terms[key] = terms.get(key, 0) + 1
        return TensorElement(k, terms)

    def unital_compat_violations(self, max_degree: int | None = None) -> Iterator[dict]:
        D = self.max_degree if max_degree is None else max_degree
        for l in range(2, self.n + 1):
            for xs in self.free.basis_tuples(l, D):
                prod = self.unital_mu(l, *(Element.basis(x) for x in xs))
                for k in range(2, self.m + 1):
                    impl = self.unital_delta(k, prod)
                    case_split = self.case_split_delta_mu(k, xs)
                    unified = self.unified_delta(k, prod)
                    if not impl == case_split == unified:
                        yield {
                            "degree": sum(x.degree for x in xs),
                            "k": k,
                            "l": l,
                            "inputs": [_show(x) for x in xs],
                            "implementation": repr(impl),
                            "case_split": repr(case_split),
                            "unified": repr(unified),
                        }

    def unital_compat_check(self, max_degree: int | None = None) -> bool:
        return next(self.unital_compat_violations(max_degree), None) is None

    def counit_violations(self, max_degree: int | None = None) -> Iterator[dict]:
        """Augmenting any k-1 slots of Delta_k(x) must give back x."""
        D = self.max_degree if max_degree is None else max_degree
        for d in range(0, D + 1):
            for lt in self.basis(d):
                x = Element.basis(lt)
                for k in range(2, self.m + 1):
                    dx = self.unital_delta(k, x)
                    for i in range(k):
                        if dx.counit_slots(i) != x:
                            yield {"degree": d, "k": k, "slot": i, "input": _show(lt)}

    def unital_primitive_basis(self, d: int) -> list[UnitalElement]:
        """Common kernel of the reduced co-operations delta_k, 2 <= k <= m, in degree d >= 1."""
        if d < 1:
            raise ValueError("primitive degrees start at 1")
        basis = self.basis(d)
        rows: dict = {}
        cols = []
        for lt in basis:
            col = {}
            for k in range(2, self.m + 1):
                for key, c in self.reduced_delta(k, Element.basis(lt)).terms.items():
                    col[rows.setdefault((k, key), len(rows))] = c
            cols.append(col)
        kern = linalg.kernel_of_columns(len(basis), cols)
        expected = enumerate_magroot(self.S, self.T, d)
        if len(kern) != len(expected) * self.V.dim**d:
            raise ConsistencyError(
                f"unital primitives in degree {d}: kernel dim {len(kern)} != {len(expected)} * {self.V.dim}^{d}"
            )
        span = [{j: Fraction(1)} for j, lt in enumerate(basis) if lt.shape.is_leaf or lt.shape.code[0] > self.m]
        if not linalg.same_span(kern, span):
            raise ConsistencyError(f"unital primitive kernel disagrees with root-arity span in degree {d}")
        return [UnitalElement((basis[j], c) for j, c in vec.items()) for vec in kern]

    def unital_filtration_degree(self, x: Element) -> int:
        """Least r such that every composite reduced co-operation of arity > r kills x."""
        xbar = x.reduced()
        if not xbar:
            return 0
        top = xbar.max_tree_degree()
        r = 1
        for a in range(top, 1, -1):
            if any(self.reduced_delta_tree(t, xbar) for t in enumerate_trees(self.T, a)):
                r = a
                break
        if self.m == self.n and r != top:
            raise ConsistencyError(f"filtration degree {r} != tree degree {top}")
        return r

    def reduced_view(self) -> MagBialgebra:
        """The augmentation ideal with reduced co-operations, for the rigidity checks."""
        return _ReducedView(self)


class _ReducedView(MagBialgebra):
    def __init__(self, unital: UnitalMagBialgebra):
        super().__init__(unital.S, unital.T, unital.V, unital.max_degree)
        self.unital = unital

    def delta(self, m: int, x: Element) -> TensorElement:
        return self.unital.reduced_delta(m, x)

    def primitive_basis(self, n: int) -> list[Element]:
        return [Element(p.terms) for p in self.unital.unital_primitive_basis(n)]


def unital_primitive_basis(m: int, n: int, V, degree: int) -> list[UnitalElement]:
    return UnitalMagBialgebra(m, n, V, degree).unital_primitive_basis(degree)


def unital_compat_check(m: int, n: int, V, max_degree: int) -> bool:
    return UnitalMagBialgebra(m, n, V, max_degree).unital_compat_check()
