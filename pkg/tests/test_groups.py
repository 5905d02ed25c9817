"""Finite-group layer: multiplication tables, homomorphisms, conjugation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohomtc.groups import (
    GeneratorsDoNotGenerate,
    centralizer,
    conjugation_orbits,
    diagonal_embedding,
    direct_product,
    find_conjugator,
    hom_from_generator_images,
    make_cyclic,
    make_klein_four,
    make_quaternion,
    pair_index,
    product_hom,
    projection_hom,
    unpair_index,
)

settings.register_profile("groups", deadline=None, max_examples=40)
settings.load_profile("groups")

STANDARD = [make_cyclic(2), make_cyclic(3), make_cyclic(4),
            make_klein_four(), make_quaternion(1), make_quaternion(2)]


@pytest.mark.parametrize("G", STANDARD, ids=lambda G: G.name)
def test_axioms(G):
    G.validate()
    assert G.op(G.identity, 1 % G.order) == 1 % G.order
    for a in range(G.order):
        assert G.op(a, G.inv(a)) == G.identity
        assert G.op(G.inv(a), a) == G.identity


@pytest.mark.parametrize("m,order,xorder", [(1, 8, 4), (2, 16, 8), (3, 24, 12)])
def test_quaternion_structure(m, order, xorder):
    Q = make_quaternion(m)
    gx = dict(Q.generators)["x"]
    gy = dict(Q.generators)["y"]
    assert Q.order == order
    assert Q.element_order(gx) == xorder
    assert Q.element_order(gy) == 4
    # y^2 = x^(2m) (the unique central involution) and y x y^-1 = x^-1
    assert Q.op(gy, gy) == Q.power(gx, 2 * m)
    assert Q.conj(gy, gx) == Q.inv(gx)
    assert len(Q.center) == 2


def test_constructors_memoized():
    assert make_quaternion(1) is make_quaternion(1)
    assert make_cyclic(4) is make_cyclic(4)
    assert make_klein_four() is make_klein_four()


def test_klein_four_is_elementary_abelian():
    V = make_klein_four()
    assert V.order == 4 and V.is_abelian
    for a in range(1, 4):
        assert V.element_order(a) == 2


def test_direct_product_indexing():
    Q, C = make_quaternion(1), make_cyclic(3)
    P = direct_product(Q, C)
    assert P.order == 24
    P.validate()
    for a in range(Q.order):
        for b in range(C.order):
            assert unpair_index(P, pair_index(P, a, b)) == (a, b)
    pL, pR = projection_hom(P, 0), projection_hom(P, 1)
    pL.verify(), pR.verify()
    assert pL(pair_index(P, 5, 2)) == 5
    assert pR(pair_index(P, 5, 2)) == 2


def test_diagonal_embedding():
    Q = make_quaternion(1)
    Q2 = direct_product(Q, Q)
    d = diagonal_embedding(Q, Q2)
    d.verify()
    for a in range(Q.order):
        assert unpair_index(Q2, d(a)) == (a, a)


def test_quotient_onto_klein_four():
    Q, V = make_quaternion(1), make_klein_four()
    pi = hom_from_generator_images(
        Q, V, [dict(V.generators)["x"], dict(V.generators)["y"]])
    pi.verify()
    assert sorted(pi.kernel_elements()) == sorted(Q.center)
    assert not pi.is_injective
    pp = product_hom(pi, pi, direct_product(Q, Q), direct_product(V, V))
    pp.verify()


def test_bad_generator_images_rejected():
    # C4 -> C2 sending the generator to the identity is a homomorphism,
    # but sending the C2 generator to an order-4 element is not
    with pytest.raises(ValueError):
        hom_from_generator_images(make_cyclic(2), make_cyclic(4), [1]).verify()


def test_conjugacy_classes_q8():
    Q = make_quaternion(1)
    orbits = conjugation_orbits(Q, 1)
    # nontrivial classes: {-1}, {x, x^-1}, {y, y^-1}, {xy, (xy)^-1}
    assert len(orbits) == 4
    assert sorted(len(o) for _, o in orbits) == [1, 2, 2, 2]
    cent_orders = sorted(len(centralizer(Q, rep)) for rep, _ in orbits)
    assert cent_orders == [4, 4, 4, 8]


def test_conjugation_orbit_counts_pairs():
    # abelian: every tuple is its own orbit
    assert len(conjugation_orbits(make_klein_four(), 2)) == 9
    assert len(conjugation_orbits(make_quaternion(1), 2)) == 19


@given(st.sampled_from(STANDARD), st.data())
def test_find_conjugator_consistent(G, data):
    a = data.draw(st.integers(1, G.order - 1))
    g = data.draw(st.integers(0, G.order - 1))
    b = G.conj(g, a)
    h = find_conjugator(G, (a,), (b,))
    assert h is not None
    assert G.conj(h, a) == b


@given(st.sampled_from(STANDARD))
def test_centralizer_is_subgroup(G):
    for rep, _ in conjugation_orbits(G, 1):
        cent = centralizer(G, rep)
        assert G.identity in cent
        s = set(cent)
        for a in cent:
            assert G.inv(a) in s
        assert G.order % len(cent) == 0


@pytest.mark.parametrize("G", STANDARD, ids=lambda G: G.name)
def test_bfs_trees_factorize(G):
    for e, parent, pos in G.bfs_tree[1:]:
        assert e == G.op(parent, G.generators[pos][1])
    for e, parent, pos in G.bfs_tree_left[1:]:
        assert e == G.op(G.generators[pos][1], parent)
    assert {e for e, _, _ in G.bfs_tree} == set(range(G.order))
    assert {e for e, _, _ in G.bfs_tree_left} == set(range(G.order))


def test_subgroup_of_quaternion():
    Q = make_quaternion(1)
    gx = dict(Q.generators)["x"]
    elems = sorted({Q.power(gx, k) for k in range(4)})
    H, incl = Q.subgroup(elems)
    H.validate()
    assert H.order == 4
    incl.verify()
    assert incl.is_injective


def test_nongenerating_set_rejected():
    Q = make_quaternion(1)
    bad = Q.__class__(Q.name, Q.mul, [("c", Q.power(dict(Q.generators)["x"], 2))],
                      Q.element_names)
    with pytest.raises(GeneratorsDoNotGenerate):
        bad.bfs_tree  # noqa: B018 - property evaluation raises


def test_round_trip_record():
    Q = make_quaternion(2)
    R = Q.__class__.from_record(Q.to_record())
    assert np.array_equal(R.mul, Q.mul)
    assert R.generators == Q.generators
    R.validate()
