"""The free S-magmatic algebra on a labelled basis, with T-ary ungrafting.

Elements are exact rational combinations of labelled trees.  A
:class:`MagBialgebra` fixes the arity sets ``T ⊆ S``, the label space and a
truncation degree; every operation that would leave the truncation raises
:class:`TruncationError` instead of dropping terms.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence

from magbialg import linalg
from magbialg.series import ConsistencyError
from magbialg.trees import (
    EMPTY,
    LEAF,
    AritySpec,
    PlanarTree,
    TreeError,
    enumerate_trees,
    from_nested,
    graft,
    to_nested,
)


class TruncationError(ValueError):
    pass


class LabeledTree(NamedTuple):
    shape: PlanarTree
    labels: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.labels)


UNIT = LabeledTree(EMPTY, ())


def term_key(lt: LabeledTree):
    return (len(lt.labels), lt.shape.code, lt.labels)


def _frac(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


_ONE = Fraction(1)


def _prod(values) -> Fraction:
    # skipping unit factors avoids most Fraction multiplications on basis inputs
    c = _ONE
    for v in values:
        if v.numerator != v.denominator:
            c = c * v
    return c


def _fmt(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


class _Linear:
    """Shared arithmetic for finitely supported combinations of hashable keys."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        if type(terms) is dict:
            # keys are already distinct
            self.terms = {k: c if type(c) is Fraction else Fraction(c) for k, c in terms.items() if c}
            return
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for k, c in items:
            c = _frac(c)
            if c:
                acc[k] = acc.get(k, 0) + c
        self.terms = {k: c for k, c in acc.items() if c}

    def _new(self, terms):
        out = object.__new__(type(self))
        out._copy_meta(self)
        out.terms = terms
        return out

    def _copy_meta(self, other) -> None:
        pass

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        return isinstance(other, _Linear) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._new(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def __rmul__(self, c):
        c = _frac(c)
        if not c:
            return self._new({})
        return self._new({k: c * v for k, v in self.terms.items()})

    def coeff(self, key) -> Fraction:
        return self.terms.get(key, Fraction(0))


class Element(_Linear):
    """Linear combination of labelled trees; the unit is the labelled ∅."""

    __slots__ = ()

    def __iter__(self) -> Iterator[tuple[LabeledTree, Fraction]]:
        return iter(sorted(self.terms.items(), key=lambda kv: term_key(kv[0])))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{_show(lt)}" for lt, c in self)

    @classmethod
    def basis(cls, lt: LabeledTree) -> Element:
        out = object.__new__(cls)
        out.terms = {lt: _ONE}
        return out

    @property
    def unit_coeff(self) -> Fraction:
        return self.terms.get(UNIT, Fraction(0))

    def reduced(self) -> Element:
        """The component without the unit."""
        return self._new({k: c for k, c in self.terms.items() if k != UNIT})

    def degrees(self) -> set[int]:
        return {lt.degree for lt in self.terms}

    def max_tree_degree(self) -> int:
        return max((lt.degree for lt in self.terms), default=0)

    def homogeneous(self, d: int) -> Element:
        return self._new({k: c for k, c in self.terms.items() if k.degree == d})

    def to_obj(self, names: Sequence[str]) -> list:
        return [
            {"tree": to_nested(lt.shape), "labels": [names[i] for i in lt.labels], "coeff": _fmt(c)}
            for lt, c in self
            if lt != UNIT
        ]

    def to_json(self, names: Sequence[str]) -> str:
        return json.dumps(self.to_obj(names))

    @classmethod
    def from_obj(cls, obj: list, names: Sequence[str]) -> Element:
        index = {n: i for i, n in enumerate(names)}
        return cls(
            (LabeledTree(from_nested(t["tree"]), tuple(index[x] for x in t["labels"])), Fraction(t["coeff"]))
            for t in obj
        )

    @classmethod
    def from_json(cls, text: str, names: Sequence[str]) -> Element:
        return cls.from_obj(json.loads(text), names)


def _show(lt: LabeledTree) -> str:
    if lt == UNIT:
        return "1"
    return f"[{','.join(map(str, lt.shape.code))};{','.join(map(str, lt.labels))}]"


class TensorElement(_Linear):
    """Linear combination of m-tuples of labelled trees."""

    __slots__ = ("arity",)

    def __init__(self, arity: int, terms: Mapping | Iterable = ()):
        super().__init__(terms)
        self.arity = arity
        for k in self.terms:
            if len(k) != arity:
                raise ValueError(f"tensor term {k} does not have arity {arity}")

    def _copy_meta(self, other) -> None:
        self.arity = other.arity

    def __eq__(self, other) -> bool:
        if isinstance(other, TensorElement) and other.arity != self.arity:
            return not self.terms and not other.terms
        return super().__eq__(other)

    __hash__ = _Linear.__hash__

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda kv: tuple(term_key(x) for x in kv[0])))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*" + "⊗".join(_show(x) for x in k) for k, c in self)

    @classmethod
    def pure(cls, factors: Sequence[Element]) -> TensorElement:
        """Expand f_1 ⊗ ... ⊗ f_m multilinearly."""
        terms: dict = {}
        for combo in itertools.product(*(f.terms.items() for f in factors)):
            key = tuple(lt for lt, _ in combo)
            c = _prod(v for _, v in combo)
            terms[key] = terms[key] + c if key in terms else c
        return cls(len(factors), terms)

    def tensor(self, other: TensorElement) -> TensorElement:
        terms: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                terms[a + b] = terms.get(a + b, 0) + ca * cb
        return TensorElement(self.arity + other.arity, terms)

    def apply(self, maps: Sequence[Callable[[Element], Element]]) -> TensorElement:
        """(f_1 ⊗ ... ⊗ f_m) applied termwise."""
        if len(maps) != self.arity:
            raise ValueError("need one map per tensor factor")
        out = TensorElement(self.arity)
        for key, c in self.terms.items():
            images = [f(Element.basis(lt)) for f, lt in zip(maps, key)]
            out = out + c * TensorElement.pure(images)
        return out

    def permute(self, sigma: Sequence[int]) -> TensorElement:
        """Move factor i to position sigma[i] (0-based)."""
        out: dict = {}
        for key, c in self.terms.items():
            new = [None] * self.arity
            for i, lt in enumerate(key):
                new[sigma[i]] = lt
            out[tuple(new)] = c
        return TensorElement(self.arity, out)

    def counit_slots(self, keep: int) -> Element:
        """Apply the augmentation to every slot except ``keep``."""
        out: dict = {}
        for key, c in self.terms.items():
            if all(lt == UNIT for i, lt in enumerate(key) if i != keep):
                out[key[keep]] = out.get(key[keep], 0) + c
        return Element(out)

    def to_obj(self, names: Sequence[str]) -> list:
        return [
            {
                "factors": [
                    {"tree": to_nested(lt.shape), "labels": [names[i] for i in lt.labels]} for lt in key
                ],
                "coeff": _fmt(c),
            }
            for key, c in self
        ]

    def to_json(self, names: Sequence[str]) -> str:
        return json.dumps(self.to_obj(names))

    @classmethod
    def from_obj(cls, arity: int, obj: list, names: Sequence[str]) -> TensorElement:
        index = {n: i for i, n in enumerate(names)}
        return cls(
            arity,
            (
                (
                    tuple(
                        LabeledTree(from_nested(f["tree"]), tuple(index[x] for x in f["labels"]))
                        for f in t["factors"]
                    ),
                    Fraction(t["coeff"]),
                )
                for t in obj
            ),
        )


def identity_tensor(xs: Sequence[Element]) -> TensorElement:
    return TensorElement.pure(xs)


# -- the ambient space --------------------------------------------------------


@dataclass(frozen=True)
class BasisSpace:
    """Basis of the label space V; ``weights`` grade labels (default all 1)."""

    names: tuple[str, ...]
    weights: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("basis names must be distinct")
        if self.weights is not None and len(self.weights) != len(self.names):
            raise ValueError("one weight per basis name")

    @classmethod
    def standard(cls, dim: int) -> BasisSpace:
        if dim == 1:
            return cls(("v",))
        return cls(tuple(f"v{i + 1}" for i in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.names)

    def weight(self, i: int) -> int:
        return 1 if self.weights is None else self.weights[i]

    def index(self, name: str) -> int:
        return self.names.index(name)


class MagBialgebra:
    """Mag^S(V) with grafting for arities in S and ungrafting for arities in T."""

    def __init__(self, S: AritySpec, T: AritySpec, V: BasisSpace | int, max_degree: int):
        if not isinstance(V, BasisSpace):
            V = BasisSpace.standard(V)
        if not T.issubset(S):
            raise TreeError(f"T = {T} is not a subset of S = {S}")
        if max_degree < 1:
            raise ValueError("max_degree must be >= 1")
        self.S, self.T, self.V, self.max_degree = S, T, V, max_degree
        self.S_arities = S.materialize(max_degree)
        self.T_arities = T.materialize(max_degree)
        self._basis_cache: dict[int, list[LabeledTree]] = {}

    def __repr__(self) -> str:
        return f"MagBialgebra(S={self.S}, T={self.T}, dim V={self.V.dim}, D={self.max_degree})"

    # construction

    def weight(self, lt: LabeledTree) -> int:
        if self.V.weights is None:
            return len(lt.labels)
        return sum(self.V.weights[i] for i in lt.labels)

    def gen(self, label: int | str) -> Element:
        i = self.V.index(label) if isinstance(label, str) else label
        if not 0 <= i < self.V.dim:
            raise IndexError(f"no basis vector {label!r}")
        return Element.basis(LabeledTree(LEAF, (i,)))

    def labeled(self, code: Sequence[int] | PlanarTree, labels: Sequence[int | str], coeff=1) -> Element:
        shape = code if isinstance(code, PlanarTree) else PlanarTree(code)
        idx = tuple(self.V.index(x) if isinstance(x, str) else x for x in labels)
        if len(idx) != shape.degree:
            raise ValueError("one label per leaf")
        if any(a not in self.S for a in shape.code if a):
            raise TreeError(f"tree {shape} uses arities outside S = {self.S}")
        lt = LabeledTree(shape, idx)
        if self.weight(lt) > self.max_degree:
            raise TruncationError(f"degree {self.weight(lt)} exceeds truncation {self.max_degree}")
        return _frac(coeff) * Element.basis(lt)

    def zero(self) -> Element:
        return Element()

    def basis(self, d: int) -> list[LabeledTree]:
        """Labelled trees of total weight d, ordered by (tree code, labels)."""
        if d in self._basis_cache:
            return self._basis_cache[d]
        if self.V.weights is None:
            out = [
                LabeledTree(t, labels)
                for t in (enumerate_trees(self.S, d) if d >= 1 else [])
                for labels in itertools.product(range(self.V.dim), repeat=d)
            ]
        else:
            out = []
            for k in range(1, d + 1):
                for t in enumerate_trees(self.S, k):
                    for labels in itertools.product(range(self.V.dim), repeat=k):
                        lt = LabeledTree(t, labels)
                        if self.weight(lt) == d:
                            out.append(lt)
            out.sort(key=lambda lt: (lt.shape.code, lt.labels))
        self._basis_cache[d] = out
        return out

    def dimension(self, d: int) -> int:
        return len(self.basis(d))

    def _check_degree(self, x: Element) -> None:
        for lt in x.terms:
            if self.weight(lt) > self.max_degree:
                raise TruncationError(f"degree {self.weight(lt)} exceeds truncation {self.max_degree}")

    # operations

    def mu(self, n: int, *args: Element) -> Element:
        """n-ary grafting, extended multilinearly."""
        if n not in self.S:
            raise TreeError(f"no {n}-ary operation: {n} not in S = {self.S}")
        if len(args) != n:
            raise ValueError(f"mu({n}) needs {n} arguments")
        terms: dict = {}
        for combo in itertools.product(*(a.terms.items() for a in args)):
            lts = [lt for lt, _ in combo]
            if any(lt == UNIT for lt in lts):
                raise TreeError("non-unital grafting got the unit")
            c = _prod(v for _, v in combo)
            key = LabeledTree(graft(n, *(lt.shape for lt in lts)), tuple(itertools.chain(*(lt.labels for lt in lts))))
            terms[key] = terms[key] + c if key in terms else c
        out = Element(terms)
        self._check_degree(out)
        return out

    def mu_tree(self, t: PlanarTree, args: Sequence[Element]) -> Element:
        """Evaluate the composite operation shaped like t on args."""
        if len(args) != t.degree:
            raise ValueError(f"tree of degree {t.degree} needs {t.degree} arguments")
        if t.is_leaf:
            return args[0]
        out = []
        pos = 0
        for b in t.branches():
            out.append(self.mu_tree(b, args[pos : pos + b.degree]))
            pos += b.degree
        return self.mu(t.code[0], *out)

    def delta(self, m: int, x: Element) -> TensorElement:
        """m-ary ungrafting: root branches of trees with root arity m, else 0."""
        if m not in self.T:
            raise TreeError(f"no {m}-ary co-operation: {m} not in T = {self.T}")
        return _ungraft_element(m, x)

    def delta_tree(self, t: PlanarTree, x: Element) -> TensorElement:
        """Iterated ungrafting shaped like t (identity for the leaf)."""
        if t.is_empty:
            raise TreeError("delta_tree needs a non-empty tree")
        if t.is_leaf:
            return TensorElement(1, {(lt,): c for lt, c in x.terms.items()})
        k = t.code[0]
        first = self.delta(k, x)
        branches = t.branches()
        out = TensorElement(t.degree)
        for key, c in first.terms.items():
            piece = TensorElement(0, {(): Fraction(1)})
            for b, lt in zip(branches, key):
                sub = self.delta_tree(b, Element.basis(lt))
                if not sub:
                    piece = None
                    break
                piece = piece.tensor(sub)
            if piece is not None:
                out = out + c * piece
        return out

    # checks

    def basis_tuples(self, l: int, max_degree: int) -> Iterator[tuple[LabeledTree, ...]]:
        """All l-tuples of basis trees with total weight <= max_degree."""

        def rec(slots, budget):
            if slots == 0:
                yield ()
                return
            for d in range(1, budget - slots + 2):
                for lt in self.basis(d):
                    for rest in rec(slots - 1, budget - d):
                        yield (lt,) + rest

        yield from rec(l, max_degree)

    def compat_violations(self, max_degree: int | None = None) -> Iterator[dict]:
        """Witnesses where delta_k(mu_l(x)) differs from x (k = l) or 0 (k != l)."""
        D = self.max_degree if max_degree is None else max_degree
        for l in self.S.materialize(D):
            for xs in self.basis_tuples(l, D):
                args = [Element.basis(lt) for lt in xs]
                prod = self.mu(l, *args)
                for k in self.T_arities:
                    if k > D:
                        continue
                    got = self.delta(k, prod)
                    want = identity_tensor(args) if k == l else TensorElement(k)
                    if got != want:
                        yield {
                            "degree": sum(x.degree for x in xs),
                            "k": k,
                            "l": l,
                            "inputs": [_show(x) for x in xs],
                            "got": repr(got),
                        }

    def compat_check(self, max_degree: int | None = None) -> bool:
        return next(self.compat_violations(max_degree), None) is None

    def star(self, n: int, *fs: GradedMap) -> GradedMap:
        """n-convolution mu_n ∘ (f_1 ⊗ ... ⊗ f_n) ∘ delta_n."""
        if n not in self.S or n not in self.T:
            raise TreeError(f"convolution needs {n} in both S and T")
        if len(fs) != n:
            raise ValueError(f"star({n}) needs {n} maps")

        def apply(x: Element) -> Element:
            out = Element()
            for key, c in self.delta(n, x).terms.items():
                out = out + c * self.mu(n, *(f(Element.basis(lt)) for f, lt in zip(fs, key)))
            return out

        return GradedMap.from_function(self, self, apply)

    def star_tree(self, t: PlanarTree, f: GradedMap) -> GradedMap:
        if t.is_leaf:
            return f
        return self.star(t.code[0], *(self.star_tree(b, f) for b in t.branches()))

    def coproduct_columns(self, n: int, arities: Sequence[int] | None = None):
        """Stacked co-operation matrix on degree n, as sparse columns."""
        arities = self.T_arities if arities is None else arities
        rows: dict = {}
        cols = []
        for lt in self.basis(n):
            col = {}
            x = Element.basis(lt)
            for k in arities:
                for key, c in self.delta(k, x).terms.items():
                    col[rows.setdefault((k, key), len(rows))] = c
            cols.append(col)
        return cols

    def primitive_basis(self, n: int) -> list[Element]:
        """Exact basis of the common kernel of the T-ary co-operations in degree n.

        The kernel is cross-checked against the span of labelled trees whose
        root arity lies in S minus T (all of V in degree 1).
        """
        basis = self.basis(n)
        kern = linalg.kernel_of_columns(len(basis), self.coproduct_columns(n))
        prims = [Element((basis[j], c) for j, c in vec.items()) for vec in kern]
        expected = [
            {j: Fraction(1)}
            for j, lt in enumerate(basis)
            if lt.shape.is_leaf or lt.shape.code[0] not in self.T
        ]
        if not linalg.same_span(kern, expected):
            raise ConsistencyError(f"primitive kernel disagrees with root-arity span in degree {n}")
        return prims

    def filtration_degree(self, x: Element) -> int:
        """Least r such that every composite co-operation of arity > r kills x."""
        if not x:
            return 0
        top = max(self.weight(lt) for lt in x.terms)
        r = 1
        for a in range(top, 1, -1):
            if any(self.delta_tree(t, x) for t in enumerate_trees(self.T, a)):
                r = a
                break
        if self.S_arities == self.T_arities and self.V.weights is None and r != x.max_tree_degree():
            raise ConsistencyError(f"filtration degree {r} != tree degree {x.max_tree_degree()}")
        return r


def _ungraft_element(m: int, x: Element) -> TensorElement:
    out: dict = {}
    for lt, c in x.terms.items():
        code = lt.shape.code
        if len(code) <= 1 or code[0] != m:
            continue
        key = []
        pos = 0
        for b in lt.shape.branches():
            key.append(LabeledTree(b, lt.labels[pos : pos + b.degree]))
            pos += b.degree
        key = tuple(key)
        out[key] = out.get(key, 0) + c
    return TensorElement(m, out)


# -- graded maps --------------------------------------------------------------


class GradedMap:
    """Degree-preserving linear map stored as sparse columns per degree.

    ``columns[d][b]`` is the image of source basis vector ``b`` of weight d.
    """

    def __init__(self, source, target, columns: dict[int, dict[LabeledTree, Element]]):
        self.source, self.target, self.columns = source, target, columns

    @classmethod
    def from_function(cls, source, target, fn: Callable[[Element], Element], degrees: Iterable[int] | None = None):
        degrees = range(1, source.max_degree + 1) if degrees is None else degrees
        columns: dict[int, dict[LabeledTree, Element]] = {}
        for d in degrees:
            col = {}
            for b in source.basis(d):
                img = fn(Element.basis(b))
                for lt in img.terms:
                    if target.weight(lt) != d:
                        raise ValueError(f"map is not degree-preserving at {b}")
                col[b] = img
            columns[d] = col
        return cls(source, target, columns)

    @classmethod
    def identity(cls, ctx) -> GradedMap:
        return cls.from_function(ctx, ctx, lambda x: x)

    @property
    def degrees(self) -> list[int]:
        return sorted(self.columns)

    def apply(self, x: Element) -> Element:
        terms: dict = {}
        for lt, c in x.terms.items():
            d = self.source.weight(lt)
            try:
                img = self.columns[d][lt]
            except KeyError:
                raise TruncationError(f"{_show(lt)} is outside the domain of this map") from None
            for k, v in img.terms.items():
                terms[k] = terms.get(k, 0) + c * v
        return Element(terms)

    __call__ = apply

    def compose(self, inner: GradedMap) -> GradedMap:
        """self ∘ inner."""
        cols = {d: {b: self.apply(img) for b, img in inner.columns[d].items()} for d in inner.columns}
        return GradedMap(inner.source, self.target, cols)

    def __matmul__(self, inner: GradedMap) -> GradedMap:
        return self.compose(inner)

    def _combine(self, other: GradedMap, sign: int) -> GradedMap:
        cols = {}
        for d in self.columns:
            cols[d] = {b: img + sign * other.columns[d][b] for b, img in self.columns[d].items()}
        return GradedMap(self.source, self.target, cols)

    def __add__(self, other: GradedMap) -> GradedMap:
        return self._combine(other, 1)

    def __sub__(self, other: GradedMap) -> GradedMap:
        return self._combine(other, -1)

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedMap) and self.columns == other.columns

    def is_identity(self) -> bool:
        return all(img == Element.basis(b) for col in self.columns.values() for b, img in col.items())

    def matrix(self, d: int) -> list[list[Fraction]]:
        """Dense matrix in degree d: rows target basis, columns source basis."""
        src = self.source.basis(d)
        tgt = {lt: i for i, lt in enumerate(self.target.basis(d))}
        m = [[Fraction(0)] * len(src) for _ in tgt]
        for j, b in enumerate(src):
            for lt, c in self.columns[d][b].terms.items():
                m[tgt[lt]][j] = c
        return m

    def sparse_columns(self, d: int) -> list[dict[int, Fraction]]:
        tgt = {lt: i for i, lt in enumerate(self.target.basis(d))}
        return [{tgt[lt]: c for lt, c in self.columns[d][b].terms.items()} for b in self.source.basis(d)]

    def rank(self, d: int) -> int:
        return linalg.sparse_rank(self.sparse_columns(d))
