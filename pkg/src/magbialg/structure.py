"""Rigidity and PBW machinery on truncated free bialgebras.

For S = T the projector ``e``, the coalgebra map ``G : H -> Mag^S(Prim H)``
and the algebra map ``F`` in the other direction are built as explicit
per-degree maps, and the identities relating them are checked exactly.  For
T ⊆ S the PBW decomposition is checked as a bijection between composite
basis items and labelled S-trees.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from magbialg import linalg
from magbialg.algebra import (
    BasisSpace,
    Element,
    GradedMap,
    LabeledTree,
    MagBialgebra,
    TreeError,
    term_key,
)
from magbialg.series import ConsistencyError
from magbialg.trees import AritySpec, PlanarTree, enumerate_magroot, enumerate_trees, plug

__all__ = [
    "GradedMap",
    "PrimitiveSpace",
    "projector_e",
    "G_map",
    "F_map",
    "rigidity_check",
    "PBWBasisItem",
    "PBWMap",
    "pbw_basis",
    "pbw_isomorphism",
]


def _require_rigid(ctx) -> None:
    if tuple(ctx.S_arities) != tuple(ctx.T_arities):
        raise TreeError(f"rigidity needs S = T, got S = {ctx.S}, T = {ctx.T}")


def projector_e(ctx) -> GradedMap:
    """e = Id - sum_{n in S} star_n(Id, ..., Id)."""
    _require_rigid(ctx)
    ident = GradedMap.identity(ctx)
    e = ident
    for n in ctx.S_arities:
        e = e - ctx.star(n, *([ident] * n))
    return e


class PrimitiveSpace:
    """A basis of Prim H, graded, with coordinates for primitive elements."""

    def __init__(self, ctx):
        self.ctx = ctx
        self.elements: list[Element] = []
        self.degrees: list[int] = []
        self.leads: list[LabeledTree] = []
        for d in range(1, ctx.max_degree + 1):
            ps = ctx.primitive_basis(d)
            for p in ps:
                # kernel vectors carry coefficient 1 on their free column, which no other vector touches
                lead = next(lt for lt, c in p if c == 1 and all(q is p or lt not in q.terms for q in ps))
                self.elements.append(p)
                self.degrees.append(d)
                self.leads.append(lead)
        self.names = tuple(self._name(p, i) for i, p in enumerate(self.elements))

    def _name(self, p: Element, i: int) -> str:
        (lt, c), *rest = list(p)
        if not rest and c == 1 and lt.shape.is_leaf:
            return self.ctx.V.names[lt.labels[0]]
        return f"p{i + 1}"

    def space(self) -> BasisSpace:
        weights = None if all(d == 1 for d in self.degrees) else tuple(self.degrees)
        return BasisSpace(self.names, weights)

    def coordinates(self, y: Element) -> dict[int, Fraction]:
        coords = {j: y.coeff(lead) for j, lead in enumerate(self.leads) if y.coeff(lead)}
        recon = Element()
        for j, c in coords.items():
            recon = recon + c * self.elements[j]
        if recon != y:
            raise ConsistencyError(f"{y!r} is not in the primitive span")
        return coords


def free_on_primitives(ctx, prim: PrimitiveSpace) -> MagBialgebra:
    return MagBialgebra(ctx.S, ctx.T, prim.space(), ctx.max_degree)


def G_map(ctx, prim: PrimitiveSpace | None = None, e: GradedMap | None = None):
    """G(x) = sum over trees t of t labelled by e^{⊗}(delta_t(x)).

    Returns ``(G, target)`` where target is the free algebra on Prim H.
    """
    _require_rigid(ctx)
    prim = prim or PrimitiveSpace(ctx)
    e = e or projector_e(ctx)
    target = free_on_primitives(ctx, prim)
    trees = {k: enumerate_trees(ctx.S, k) for k in range(1, ctx.max_degree + 1)}

    def apply(x: Element) -> Element:
        top = max((ctx.weight(lt) for lt in x.terms), default=0)
        terms: dict = {}
        for k in range(1, top + 1):
            for t in trees[k]:
                for key, c in ctx.delta_tree(t, x).terms.items():
                    factors = [prim.coordinates(e(Element.basis(lt))) for lt in key]
                    for combo in itertools.product(*(f.items() for f in factors)):
                        coeff = c
                        for _, v in combo:
                            coeff *= v
                        lt = LabeledTree(t, tuple(j for j, _ in combo))
                        terms[lt] = terms.get(lt, 0) + coeff
        return Element(terms)

    return GradedMap.from_function(ctx, target, apply), target


def F_map(ctx, target: MagBialgebra, prim: PrimitiveSpace) -> GradedMap:
    """F(t; p_1..p_k) = mu_t(p_1, ..., p_k) evaluated in H."""

    def apply(x: Element) -> Element:
        out = Element()
        for lt, c in x.terms.items():
            out = out + c * ctx.mu_tree(lt.shape, [prim.elements[j] for j in lt.labels])
        return out

    return GradedMap.from_function(target, ctx, apply)


def _result(check: str, degree: int | None, ok: bool, witness=None) -> dict:
    return {"check": check, "degree": degree, "status": "pass" if ok else "fail", "witness": None if ok else witness}


def rigidity_report(ctx) -> list[dict]:
    """Every identity of the rigidity argument, one record per check and degree."""
    _require_rigid(ctx)
    D = ctx.max_degree
    report = []
    e = projector_e(ctx)
    prim = PrimitiveSpace(ctx)
    G, target = G_map(ctx, prim, e)
    F = F_map(ctx, target, prim)
    ee = e @ e
    FG = F @ G
    GF = G @ F
    for d in range(1, D + 1):
        bad = next((b for b in ctx.basis(d) if ee.columns[d][b] != e.columns[d][b]), None)
        report.append(_result("e_idempotent", d, bad is None, repr(bad)))
        prim_d = [
            {j: c for j, c in enumerate(p.coeff(b) for b in ctx.basis(d)) if c}
            for p, pd in zip(prim.elements, prim.degrees)
            if pd == d
        ]
        ok = linalg.same_span(e.sparse_columns(d), prim_d)
        report.append(_result("image_e_is_primitive", d, ok, f"rank e = {e.rank(d)}, dim Prim = {len(prim_d)}"))
        bad = next((b for b in ctx.basis(d) if FG.columns[d][b] != Element.basis(b)), None)
        report.append(_result("F_after_G_is_identity", d, bad is None, repr(bad)))
        bad = next((b for b in target.basis(d) if GF.columns[d][b] != Element.basis(b)), None)
        report.append(_result("G_after_F_is_identity", d, bad is None, repr(bad)))
    for d, bad in _algebra_morphism_failures(ctx, target, G):
        report.append(_result("G_algebra_morphism", d, bad is None, bad))
    for d, bad in _coalgebra_morphism_failures(ctx, target, F):
        report.append(_result("F_coalgebra_morphism", d, bad is None, bad))
    return report


def _algebra_morphism_failures(ctx, target, G) -> Iterator[tuple[int, object]]:
    """mu_n(G x_1, ..., G x_n) == G(mu_n(x_1, ..., x_n)), grouped by output degree."""
    D = ctx.max_degree
    failures: dict[int, object] = {d: None for d in range(2, D + 1)}
    for n in ctx.S_arities:
        for xs in ctx.basis_tuples(n, D):
            args = [Element.basis(lt) for lt in xs]
            lhs = target.mu(n, *(G(a) for a in args))
            rhs = G(ctx.mu(n, *args))
            if lhs != rhs:
                d = sum(ctx.weight(lt) for lt in xs)
                failures[d] = failures[d] or f"n={n}, inputs={xs}"
    yield from failures.items()


def _coalgebra_morphism_failures(ctx, target, F) -> Iterator[tuple[int, object]]:
    """delta_n(F x) == (F ⊗ ... ⊗ F)(ungraft_n x) on every target basis vector."""
    for d in range(1, ctx.max_degree + 1):
        bad = None
        for b in target.basis(d):
            x = Element.basis(b)
            fx = F(x)
            for n in ctx.T_arities:
                if ctx.delta(n, fx) != target.delta(n, x).apply([F] * n):
                    bad = bad or f"n={n}, x={b}"
        yield d, bad


def rigidity_check(S: AritySpec, V: BasisSpace | int, D: int) -> list[dict]:
    return rigidity_report(MagBialgebra(S, S, V, D))


# -- PBW ----------------------------------------------------------------------


@dataclass(frozen=True)
class PBWBasisItem:
    """An outer T-tree with one (root-restricted tree, labels) per outer leaf."""

    outer: PlanarTree
    inner: tuple[LabeledTree, ...]

    @property
    def degree(self) -> int:
        return sum(lt.degree for lt in self.inner)

    def sort_key(self):
        return (self.outer.code, tuple(term_key(lt) for lt in self.inner))


def _compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    for cuts in itertools.combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(k))


def pbw_basis(S: AritySpec, T: AritySpec, V: BasisSpace | int, n: int) -> list[PBWBasisItem]:
    """Basis of degree n of Mag^T ∘ Mag_root^{T,S}(V)."""
    dim = V.dim if isinstance(V, BasisSpace) else V
    items = []
    root_trees = {d: enumerate_magroot(S, T, d) for d in range(1, n + 1)}
    for k in range(1, n + 1):
        for outer in enumerate_trees(T, k):
            for comp in _compositions(n, k):
                choices = [
                    [LabeledTree(t, labels) for t in root_trees[d] for labels in itertools.product(range(dim), repeat=d)]
                    for d in comp
                ]
                for inner in itertools.product(*choices):
                    items.append(PBWBasisItem(outer, tuple(inner)))
    items.sort(key=PBWBasisItem.sort_key)
    return items


def pbw_image(item: PBWBasisItem) -> LabeledTree:
    """Plug the inner trees into the outer leaves, left to right."""
    shape = plug(item.outer, [lt.shape for lt in item.inner])
    return LabeledTree(shape, tuple(itertools.chain.from_iterable(lt.labels for lt in item.inner)))


@dataclass
class PBWMap:
    images: dict[PBWBasisItem, LabeledTree]
    collisions: list[LabeledTree] = field(default_factory=list)
    missing: list[LabeledTree] = field(default_factory=list)

    @property
    def is_bijection(self) -> bool:
        return not self.collisions and not self.missing


def pbw_isomorphism(S: AritySpec, T: AritySpec, V: BasisSpace | int, n: int) -> PBWMap:
    """Map the composite basis to labelled S-trees and check bijectivity in degree n."""
    ctx = MagBialgebra(S, T, V, n)
    images = {item: pbw_image(item) for item in pbw_basis(S, T, V, n)}
    seen: dict[LabeledTree, int] = {}
    for lt in images.values():
        seen[lt] = seen.get(lt, 0) + 1
    collisions = sorted((lt for lt, c in seen.items() if c > 1), key=term_key)
    missing = [lt for lt in ctx.basis(n) if lt not in seen]
    stray = [lt for lt in seen if lt not in set(ctx.basis(n))]
    return PBWMap(images, collisions, missing + sorted(stray, key=term_key))


def pbw_report(S: AritySpec, T: AritySpec, V: BasisSpace | int, max_degree: int) -> list[dict]:
    from magbialg.series import compose, mag_dims, magroot_dims

    report = []
    dim = V.dim if isinstance(V, BasisSpace) else V
    composed = compose(mag_dims(T, max_degree), magroot_dims(S, T, max_degree))
    direct = mag_dims(S, max_degree)
    for n in range(1, max_degree + 1):
        m = pbw_isomorphism(S, T, V, n)
        witness = {"collisions": [repr(x) for x in m.collisions[:5]], "missing": [repr(x) for x in m.missing[:5]]}
        report.append(_result("pbw_bijection", n, m.is_bijection, witness))
        ok = composed[n] == direct[n] and len(m.images) == direct[n] * dim**n
        report.append(
            _result("pbw_series", n, ok, {"composed": str(composed[n]), "direct": str(direct[n]), "items": len(m.images)})
        )
    return report


def sum_of_star_trees(ctx, f: GradedMap) -> GradedMap:
    """sum over trees t of degree <= D of star_t(f)."""
    total = None
    for k in range(1, ctx.max_degree + 1):
        for t in enumerate_trees(ctx.S, k):
            st = ctx.star_tree(t, f)
            total = st if total is None else total + st
    return total
