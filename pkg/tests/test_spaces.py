"""Named ring generators, Kuenneth decomposition, truncated space rings."""

import numpy as np
import pytest

from cohomtc.gf2 import FpMatrix
from cohomtc.groups import make_cyclic, make_klein_four, make_quaternion
from cohomtc.spaces import (
    QUATERNION_BETTI_ROW,
    QuaternionRingData,
    TruncatedRing,
    cross_class,
    element_order,
    h1_value,
    klein_square_classes,
    kuenneth_decompose,
    named_h1_pair,
)


def test_element_order():
    Q = make_quaternion(2)
    gx = dict(Q.generators)["x"]
    assert element_order(Q, 0) == 1
    assert element_order(Q, gx) == 8
    assert element_order(make_cyclic(6), 1) == 6


def test_h1_values_separate_generators(ws):
    V = make_klein_four()
    gx, gy = dict(V.generators)["x"], dict(V.generators)["y"]
    x, y = named_h1_pair(ws, V, gx, gy)
    assert (h1_value(ws, x, gx), h1_value(ws, x, gy)) == (1, 0)
    assert (h1_value(ws, y, gx), h1_value(ws, y, gy)) == (0, 1)
    # the third involution sees both classes
    gz = V.op(gx, gy)
    assert h1_value(ws, x, gz) == 1 and h1_value(ws, y, gz) == 1


def test_h1_value_vanishes_on_odd_order(ws):
    C6 = make_cyclic(6)
    z = ws.cohomology(C6, ws.trivial(C6), 1).basis_classes()[0]
    # restriction to the odd-order part is invisible at p = 2
    g2 = 2  # element of order 3 in C6
    assert element_order(C6, g2) == 3
    assert h1_value(ws, z, g2) == 0


@pytest.mark.parametrize("m,origin", [(1, "varpi^*(y_V)"), (2, "varpi^*(x_V+y_V)")])
def test_quaternion_ring_generator_selection(m, origin, ws):
    ring = QuaternionRingData(ws, m)
    assert ring.betti == QUATERNION_BETTI_ROW
    assert all(ok for _, ok in ring.relations)
    assert ring.y_origin == origin
    # x is always the pullback of x_V; y pulls back from y_source
    assert ring.x == ring._pull(ring.x_V)
    assert ring.y == ring._pull(ring.y_source)


def test_quaternion_degree4_periodicity(ws):
    """Multiplication by the degree-4 class is injective H^r -> H^{r+4}."""
    ring = QuaternionRingData(ws, 1)
    for r in (0, 1, 2, 3):
        H = ws.cohomology(ring.Q, ws.trivial(ring.Q), r)
        rows = [ring.cup(z, ring.e).coords for z in H.basis_classes()]
        assert FpMatrix.vstack(rows).rank() == H.dim


def test_kuenneth_decompose_cross_product(ws):
    """Decomposing a pure cross product returns exactly one component
    with a single unit entry."""
    V = make_klein_four()
    a = ws.cohomology(V, ws.trivial(V), 1).basis_classes()[0]
    b = ws.cohomology(V, ws.trivial(V), 2).basis_classes()[1]
    z = cross_class(ws, a, b)
    decomp = kuenneth_decompose(ws, V, 3, z)
    assert list(decomp.keys()) == [(1, 2)]
    mat = decomp[(1, 2)]
    assert mat.sum() == 1 and mat[0, 1] == 1


def test_kuenneth_decompose_sum(ws):
    V = make_klein_four()
    H1 = ws.cohomology(V, ws.trivial(V), 1)
    a, b = H1.basis_classes()
    z = cross_class(ws, a, b) + cross_class(ws, b, a)
    decomp = kuenneth_decompose(ws, V, 2, z)
    assert list(decomp.keys()) == [(1, 1)]
    assert np.array_equal(decomp[(1, 1)], np.array([[0, 1], [1, 0]], dtype=np.uint8))


def test_klein_square_classes_structure(ws):
    gens, v = klein_square_classes(ws)
    P = ws.square(make_klein_four())
    for z in gens.values():
        assert z.parent.group.key == P.key and z.parent.degree == 1
    for z in v.values():
        assert z.parent.degree == 3
        assert not z.is_zero()
    # the three degree-3 certificate classes are pairwise distinct
    assert len({z.coords.to_bytes() for z in v.values()}) == 3


def test_truncated_ring_kills_high_degrees(ws):
    ring = QuaternionRingData(ws, 1)
    trunc = TruncatedRing(ws, ring, d=3)
    assert trunc.dims == [1, 2, 2, 1]
    r, z = trunc.product(2, ws.cohomology(ring.Q, ws.trivial(ring.Q), 2).basis_classes()[0],
                         2, ws.cohomology(ring.Q, ws.trivial(ring.Q), 2).basis_classes()[0])
    assert r == 4 and z is None
    r, z = trunc.product(1, ring.x, 2, ring.cup(ring.x, ring.y))
    assert r == 3 and z is not None


def test_report_records_are_serializable(report_m1):
    import json

    rec = report_m1.to_record()
    json.dumps(rec)  # no numpy leaks into the record
    assert rec["tc_lower"] == rec["conclusion"] == 6
    text = report_m1.render_text()
    assert "TC = 6" in text
    assert all(ok for _, ok in report_m1.checks)
