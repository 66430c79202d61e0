import pytest

from magbialg.algebra import Element, LabeledTree, MagBialgebra
from magbialg.series import compose, mag_dims, magroot_dims
from magbialg.structure import (
    F_map,
    G_map,
    PBWBasisItem,
    PrimitiveSpace,
    pbw_basis,
    pbw_image,
    pbw_isomorphism,
    pbw_report,
    projector_e,
    rigidity_check,
    rigidity_report,
    sum_of_star_trees,
)
from magbialg.trees import LEAF, AritySpec, PlanarTree, TreeError, corolla, enumerate_trees

S2 = AritySpec.finite([2])
S23 = AritySpec.finite([2, 3])


def _failures(report):
    return [r for r in report if r["status"] != "pass"]


@pytest.fixture(scope="module")
def rigid():
    ctx = MagBialgebra(S23, S23, 2, 4)
    prim = PrimitiveSpace(ctx)
    e = projector_e(ctx)
    G, target = G_map(ctx, prim, e)
    F = F_map(ctx, target, prim)
    return ctx, e, prim, G, target, F


def test_projector_examples(rigid):
    ctx, e, *_ = rigid
    v, w = ctx.gen(0), ctx.gen(1)
    assert e(v) == v
    assert e(ctx.mu(2, v, w)) == 0
    assert e(ctx.mu(3, v, w, v)) == 0
    assert e @ e == e


def test_projector_requires_rigid_context():
    with pytest.raises(TreeError):
        projector_e(MagBialgebra(S23, S2, 1, 3))


def test_G_and_F_examples(rigid):
    ctx, e, prim, G, target, F = rigid
    v, w = ctx.gen(0), ctx.gen(1)
    x = ctx.mu(2, v, w)
    # on the free object the primitives of degree 1 are V itself
    assert G(v) == target.gen(0)
    assert G(x) == target.labeled([2, 0, 0], [0, 1])
    assert F(target.gen(1)) == w
    assert F(target.labeled([2, 0, 0], [0, 1])) == x


def test_G_is_coalgebra_morphism(rigid):
    ctx, e, prim, G, target, F = rigid
    for d in range(1, ctx.max_degree + 1):
        for b in ctx.basis(d):
            x = Element.basis(b)
            for k in (2, 3):
                assert ctx.delta(k, x).apply([G] * k) == target.delta(k, G(x))


def test_F_G_inverse(rigid):
    ctx, e, prim, G, target, F = rigid
    assert (F @ G).is_identity()
    assert (G @ F).is_identity()


def test_sum_of_star_trees_is_identity(rigid):
    ctx, e, *_ = rigid
    assert sum_of_star_trees(ctx, e).is_identity()


def test_rank_of_e_is_primitive_dimension(rigid):
    ctx, e, prim, *_ = rigid
    for d in range(1, ctx.max_degree + 1):
        assert e.rank(d) == sum(1 for pd in prim.degrees if pd == d)


@pytest.mark.parametrize("S", [(), (2,), (3,), (2, 3), (2, 4)])
@pytest.mark.parametrize("dim", [1, 2])
def test_rigidity_grid(S, dim):
    S = AritySpec.finite(S)
    report = rigidity_check(S, dim, 5)
    assert report and not _failures(report)


def test_rigidity_report_schema():
    report = rigidity_report(MagBialgebra(S2, S2, 1, 3))
    assert {r["check"] for r in report} == {
        "e_idempotent",
        "image_e_is_primitive",
        "F_after_G_is_identity",
        "G_after_F_is_identity",
        "G_algebra_morphism",
        "F_coalgebra_morphism",
    }
    assert all(set(r) == {"check", "degree", "status", "witness"} for r in report)


def test_rigidity_empty_set_is_vacuous():
    assert not _failures(rigidity_check(AritySpec.finite(()), 1, 3))


# -- PBW ------------------------------------------------------------------------


def test_pbw_counts():
    assert len(pbw_basis(S23, S2, 1, 3)) == 3
    assert len(pbw_basis(S23, S2, 1, 4)) == 10
    for n in range(1, 6):
        items = pbw_basis(S23, S23, 1, n)
        assert len(items) == len(enumerate_trees(S23, n))
        assert all(it.inner == tuple(LabeledTree(LEAF, (i.labels[0],)) for i in it.inner) for it in items)


def test_pbw_image_examples():
    t = LabeledTree(corolla(3), (0, 0, 0))
    assert pbw_image(PBWBasisItem(LEAF, (t,))) == t
    v = LabeledTree(LEAF, (0,))
    got = pbw_image(PBWBasisItem(corolla(2), (v, t)))
    assert got == LabeledTree(PlanarTree((2, 0, 3, 0, 0, 0)), (0, 0, 0, 0))


@pytest.mark.parametrize(
    "S, T", [(S23, S2), (AritySpec.finite([2, 3, 4]), S23), (AritySpec.finite([2, 4]), S2)]
)
def test_pbw_bijection(S, T):
    for n in range(1, 7):
        assert pbw_isomorphism(S, T, 1, n).is_bijection


def test_pbw_bijection_with_labels():
    for n in range(1, 5):
        m = pbw_isomorphism(S23, S2, 2, n)
        assert m.is_bijection and len(m.images) == mag_dims(S23, n)[n] * 2**n


def test_pbw_series_identity_infinite():
    S, T = AritySpec.at_least(2), AritySpec.at_least(3)
    assert compose(mag_dims(T, 12), magroot_dims(S, T, 12)) == mag_dims(S, 12)


def test_pbw_report_passes():
    assert not _failures(pbw_report(S23, S2, 1, 6))
