"""Cohomology groups and cup products against independent oracles."""

import numpy as np
import pytest

from cohomtc.cohomology import apply_coboundary, is_cocycle
from cohomtc.gf2 import FpMatrix
from cohomtc.groups import (
    hom_from_generator_images,
    make_cyclic,
    make_klein_four,
    make_quaternion,
)


BETTI_ORACLE = [
    # cyclic 2-groups: one class in every degree
    (make_cyclic(2), [1, 1, 1, 1, 1, 1, 1, 1]),
    (make_cyclic(4), [1, 1, 1, 1, 1, 1, 1, 1]),
    # elementary abelian of rank 2: polynomial on two degree-1 classes
    (make_klein_four(), [1, 2, 3, 4, 5, 6, 7, 8]),
    # generalized quaternion: period 4
    (make_quaternion(1), [1, 2, 2, 1, 1, 2, 2, 1]),
    (make_quaternion(2), [1, 2, 2, 1, 1, 2, 2, 1]),
]


@pytest.mark.parametrize("G,row", BETTI_ORACLE, ids=lambda v: getattr(v, "name", None))
def test_graded_dimensions(G, row, ws):
    assert ws.betti(G, 7) == row


def test_odd_order_is_invisible(ws):
    assert ws.betti(make_cyclic(3), 4) == [1, 0, 0, 0, 0]


def test_square_dimensions_satisfy_kuenneth(ws):
    for G in (make_cyclic(2), make_klein_four(), make_quaternion(1)):
        row = ws.betti(G, 6)
        sq = ws.betti(ws.square(G), 6)
        for r in range(7):
            assert sq[r] == sum(row[i] * row[r - i] for i in range(r + 1))


def test_coboundaries_are_cocycles_with_zero_class(ws):
    G = make_quaternion(1)
    R = ws.res(G)
    M = ws.trivial(G)
    rng = np.random.default_rng(5)
    for r in (0, 1, 2):
        coch = FpMatrix.from_dense(
            rng.integers(0, 2, (1, R.ranks[r] * M.dim)).astype(np.uint8))
        db = apply_coboundary(R, M, r, coch)
        assert is_cocycle(R, M, r + 1, db)
        assert ws.cohomology(G, M, r + 1).class_of(db).is_zero()


def test_basis_classes_are_independent_cocycles(ws):
    G = make_klein_four()
    R = ws.res(G)
    M = ws.trivial(G)
    for r in (1, 2, 3):
        H = ws.cohomology(G, M, r)
        for z in H.basis_classes():
            assert is_cocycle(R, M, r, z.rep)
        stacked = FpMatrix.vstack([z.coords for z in H.basis_classes()])
        assert stacked.rank() == H.dim


def test_klein_ring_is_polynomial(ws):
    """H^*(V; F_2) = F_2[x, y]: the monomials of each degree are a basis."""
    from cohomtc.spaces import named_h1_pair

    V = make_klein_four()
    x, y = named_h1_pair(ws, V, dict(V.generators)["x"], dict(V.generators)["y"])
    cup = ws.cup_trivial
    by_degree = {1: [x, y]}
    for r in (2, 3, 4):
        prev = by_degree[r - 1]
        by_degree[r] = [cup(z, x) for z in prev] + [cup(prev[-1], y)]
        mons = by_degree[r]
        assert len(mons) == r + 1 == ws.cohomology(V, ws.trivial(V), r).dim
        assert FpMatrix.vstack([z.coords for z in mons]).rank() == r + 1


def test_cup_commutes_at_p2(ws):
    V = make_klein_four()
    H1 = ws.cohomology(V, ws.trivial(V), 1)
    H2 = ws.cohomology(V, ws.trivial(V), 2)
    for a in H1.basis_classes():
        for b in H2.basis_classes():
            assert ws.cup_trivial(a, b) == ws.cup_trivial(b, a)


def test_cup_associative(ws):
    V = make_klein_four()
    a, b = ws.cohomology(V, ws.trivial(V), 1).basis_classes()[:2]
    c = ws.cohomology(V, ws.trivial(V), 2).basis_classes()[1]
    cup = ws.cup_trivial
    assert cup(cup(a, b), c) == cup(a, cup(b, c))


def test_unit_acts_as_identity(ws):
    Q = make_quaternion(1)
    one = ws.cohomology(Q, ws.trivial(Q), 0).basis_classes()[0]
    for r in (1, 2, 3, 4):
        for z in ws.cohomology(Q, ws.trivial(Q), r).basis_classes():
            assert ws.cup_trivial(one, z) == z
            assert ws.cup_trivial(z, one) == z


def test_pullback_is_a_ring_map(ws):
    """Restriction along Q8 -> V commutes with cup products: an
    independent consistency check between the chain-map lift and the two
    diagonal approximations."""
    Q, V = make_quaternion(1), make_klein_four()
    pi = hom_from_generator_images(
        Q, V, [dict(V.generators)["x"], dict(V.generators)["y"]])

    def pull(z):
        return ws.restrict_class(pi, "varpi", z, ws.trivial(Q))

    H1 = ws.cohomology(V, ws.trivial(V), 1)
    for a in H1.basis_classes():
        for b in H1.basis_classes():
            assert pull(ws.cup_trivial(a, b)) == ws.cup_trivial(pull(a), pull(b))


def test_cross_product_dimensions(ws):
    """Cross products of basis classes of complementary degrees are
    linearly independent in the cohomology of the square."""
    from cohomtc.spaces import cross_class

    G = make_quaternion(1)
    P = ws.square(G)
    r = 3
    rows = []
    for i in range(r + 1):
        for a in ws.cohomology(G, ws.trivial(G), i).basis_classes():
            for b in ws.cohomology(G, ws.trivial(G), r - i).basis_classes():
                rows.append(cross_class(ws, a, b).coords)
    stacked = FpMatrix.vstack(rows)
    assert stacked.nrows == ws.cohomology(P, ws.trivial(P), r).dim
    assert stacked.rank() == stacked.nrows
