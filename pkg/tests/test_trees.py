from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magbialg.trees import (
    ALL,
    EMPTY,
    LEAF,
    AritySpec,
    PlanarTree,
    TreeError,
    corolla,
    count_bivariate,
    count_trees,
    enumerate_magroot,
    enumerate_trees,
    from_json,
    from_nested,
    from_text,
    graft,
    in_arity_set,
    plug,
    root_arity,
    to_json,
    to_nested,
    to_text,
    ungraft,
)


@st.composite
def trees(draw, arities=(2, 3, 4), max_vertices=4):
    """Random planar reduced tree with internal arities from ``arities``."""
    budget = [draw(st.integers(0, max_vertices))]

    def build():
        if budget[0] == 0 or draw(st.booleans()):
            return LEAF
        budget[0] -= 1
        k = draw(st.sampled_from(arities))
        return graft(k, *(build() for _ in range(k)))

    return build()


# -- construction -------------------------------------------------------------


def test_leaf_and_empty():
    assert LEAF.degree == 1 and LEAF.is_leaf and not LEAF.is_empty
    assert EMPTY.degree == 0 and EMPTY.is_empty
    assert LEAF.vertex_count == 0


def test_corolla():
    c = corolla(3)
    assert c.code == (3, 0, 0, 0)
    assert c.degree == 3 and c.vertex_count == 1 and c.arities() == {3}


@pytest.mark.parametrize("code", [(1, 0), (2, 0), (0, 0), (2, 0, 0, 0), (-1,), (3, 0, 0)])
def test_invalid_codes(code):
    with pytest.raises(TreeError):
        PlanarTree(code)


def test_branches_and_root():
    t = PlanarTree((3, 0, 2, 0, 0, 0))
    assert t.branches() == (LEAF, corolla(2), LEAF)
    assert root_arity(t) == 3
    assert root_arity(LEAF) is None
    assert t.degree == 4


def test_graft_requires_matching_arity():
    with pytest.raises(TreeError):
        graft(3, LEAF, LEAF)
    with pytest.raises(TreeError):
        graft(1, LEAF)


@given(trees())
def test_ungraft_inverts_graft(t):
    if t.is_leaf:
        assert all(ungraft(m, t) is None for m in (2, 3, 4))
        return
    k = root_arity(t)
    children = ungraft(k, t)
    assert graft(k, *children) == t
    assert all(ungraft(m, t) is None for m in (2, 3, 4, 5) if m != k)


@given(trees(), trees(), trees())
def test_plug_associative(a, b, c):
    # plug c into every leaf of b, then b into every leaf of a, in both bracketings
    left = plug(plug(a, [b] * a.degree), [c] * (a.degree * b.degree))
    right = plug(a, [plug(b, [c] * b.degree)] * a.degree)
    assert left == right


@given(trees())
def test_plug_leaves_is_identity(t):
    assert plug(t, [LEAF] * t.degree) == t
    assert plug(LEAF, [t]) == t


def test_plug_arity_mismatch():
    with pytest.raises(TreeError):
        plug(corolla(2), [LEAF])


# -- arity sets ---------------------------------------------------------------


@pytest.mark.parametrize(
    "text, inside, outside",
    [
        ("2,3,5", [2, 3, 5], [4, 6]),
        ("all", [2, 3, 17], []),
        ("3..all", [3, 4, 50], [2]),
        ("odd3..all", [3, 5, 21], [2, 4, 6]),
        ("2..5", [2, 5], [6]),
        ("none", [], [2, 3]),
    ],
)
def test_parse_arity_sets(text, inside, outside):
    S = AritySpec.parse(text)
    assert all(k in S for k in inside)
    assert not any(k in S for k in outside)


@pytest.mark.parametrize("text", ["1,2", "x", "5..2", "0", "2,,3"])
def test_parse_rejects(text):
    with pytest.raises(TreeError):
        AritySpec.parse(text)


def test_parse_empty_set():
    assert AritySpec.parse("") == AritySpec.parse("none") == AritySpec.finite(())


def test_arity_subset_and_difference():
    S = AritySpec.at_least(2)
    T = AritySpec.at_least(3)
    assert T.issubset(S) and not S.issubset(T)
    assert S.difference(T, 10) == (2,)
    assert AritySpec.parse("odd3..all").issubset(T)
    assert AritySpec.finite([2, 4]).issubset(AritySpec.progression(2, 2))
    assert not AritySpec.progression(2, 2).issubset(AritySpec.finite([2, 4]))


@given(st.sets(st.integers(2, 9), max_size=5))
def test_parse_str_roundtrip(members):
    S = AritySpec.finite(members)
    assert AritySpec.parse(str(S)) == S if members else str(S) == "none"


# -- enumeration --------------------------------------------------------------


def _brute_trees(arities, n):
    """All trees with n leaves by recursive grafting, independent of the memoized enumerator."""
    if n == 1:
        return {LEAF}
    out = set()
    for k in arities:
        for split in product(range(1, n), repeat=k):
            if sum(split) != n:
                continue
            for kids in product(*(_brute_trees(arities, s) for s in split)):
                out.add(graft(k, *kids))
    return out


@pytest.mark.parametrize("arities", [(2,), (3,), (2, 3), (2, 4), (2, 3, 4, 5)])
@pytest.mark.parametrize("n", range(1, 8))
def test_enumeration_matches_brute_force(arities, n):
    got = enumerate_trees(arities, n)
    assert len(got) == len(set(got))
    assert set(got) == _brute_trees(arities, n)
    assert got == sorted(got)


def test_catalan_and_super_catalan():
    assert [count_trees({2}, n) for n in range(1, 9)] == [1, 1, 2, 5, 14, 42, 132, 429]
    assert [count_trees(ALL, n) for n in range(1, 11)] == [1, 1, 3, 11, 45, 197, 903, 4279, 20793, 103049]


def test_enumerate_infinite_set_uses_bounded_arities():
    assert set(enumerate_trees(ALL, 4)) == _brute_trees((2, 3, 4), 4)


def test_magroot_enumeration():
    got = enumerate_magroot({2, 3}, {2}, 4)
    assert all(root_arity(t) == 3 for t in got)
    assert len(got) == 3
    assert enumerate_magroot({2, 3}, {2, 3}, 4) == []
    assert enumerate_magroot({2, 3}, {2}, 1) == [LEAF]
    with pytest.raises(TreeError):
        enumerate_magroot({2}, {3}, 3)


def test_count_bivariate():
    # trees with 4 leaves over arities 2,3,4 graded by internal vertices
    assert count_bivariate(ALL, 4) == {1: 1, 2: 5, 3: 5}
    for n in range(1, 8):
        assert sum(count_bivariate(ALL, n).values()) == count_trees(ALL, n)


def test_in_arity_set():
    t = PlanarTree((3, 0, 2, 0, 0, 0))
    assert in_arity_set(t, {2, 3})
    assert not in_arity_set(t, {2})
    assert in_arity_set(LEAF, set())


# -- formats ------------------------------------------------------------------


@given(trees())
def test_text_roundtrip(t):
    assert from_text(to_text(t)) == t


@given(trees())
def test_nested_and_json_roundtrip(t):
    assert from_nested(to_nested(t)) == t
    assert from_json(to_json(t)) == t


def test_empty_tree_formats():
    assert to_text(EMPTY) == ""
    assert from_text("") == EMPTY
    assert to_nested(EMPTY) is None
    assert from_nested(None) == EMPTY
    assert to_nested(LEAF) == []
    assert to_nested(corolla(2)) == [[], []]


@settings(max_examples=50)
@given(trees())
def test_hash_and_order_consistent(t):
    u = PlanarTree(t.code)
    assert u == t and hash(u) == hash(t)
    assert u <= t and not u < t
