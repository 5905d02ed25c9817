"""Named self-check registry: every module-level invariant exercised in
one deterministic run.  Each check raises on failure; the runner prints
one fixed-width line per check."""

from __future__ import annotations

import os
import tempfile
import time

import numpy as np

from .cohomology import is_cocycle
from .gf2 import FpMatrix
from .groups import (
    conjugation_orbits,
    find_conjugator,
    hom_from_generator_images,
    make_cyclic,
    make_klein_four,
    make_quaternion,
)
from .tc import TCEngine
from .workspace import Workspace


class _Session:
    def __init__(self):
        self.ws = Workspace()
        self.engine = TCEngine(self.ws)


def check_gf2_linear_algebra(s):
    rng = np.random.default_rng(7)
    for _ in range(10):
        a = FpMatrix.from_dense(rng.integers(0, 2, (13, 9)).astype(np.uint8))
        b = FpMatrix.from_dense(rng.integers(0, 2, (9, 11)).astype(np.uint8))
        c = FpMatrix.from_dense(rng.integers(0, 2, (11, 5)).astype(np.uint8))
        assert (a @ b) @ c == a @ (b @ c)
        assert a.rank() + a.kernel().dim == a.nrows
        k = a.kernel()
        if k.dim:
            assert (k.basis @ a).is_zero()


def check_group_axioms(s):
    for G in (make_cyclic(2), make_cyclic(4), make_klein_four(),
              make_quaternion(1), make_quaternion(2)):
        G.validate()
    Q = make_quaternion(1)
    assert len(conjugation_orbits(Q, 1)) == 4  # nontrivial conjugacy classes
    assert find_conjugator(Q, (2,), (Q.inv(2),)) is not None


def check_resolutions(s):
    for G in (make_cyclic(2), make_quaternion(1)):
        s.ws.res(G).verify()
    P = s.ws.square(make_cyclic(2))
    s.ws.res(P).verify()


def check_orbit_tables(s):
    """Orbit tables agree with the action matrices on every element,
    including over nonabelian groups with nontrivial coefficients."""
    rng = np.random.default_rng(3)
    Q = make_quaternion(1)
    for M in (s.ws.aug_ideal(Q), s.ws.tower(Q, 1).hd_mid):
        row = FpMatrix.from_dense(
            rng.integers(0, 2, (1, M.dim)).astype(np.uint8))
        T = M.orbit_table(row)
        for g in range(M.group.order):
            assert T.row(g) == (row @ M.action(g)).row(0)


def check_betti_numbers(s):
    assert s.ws.betti(make_cyclic(2), 5) == [1, 1, 1, 1, 1, 1]
    assert s.ws.betti(make_cyclic(4), 5) == [1, 1, 1, 1, 1, 1]
    assert s.ws.betti(make_klein_four(), 4) == [1, 2, 3, 4, 5]
    assert s.ws.betti(make_quaternion(1), 7) == [1, 2, 2, 1, 1, 2, 2, 1]


def check_quaternion_rings(s):
    from .spaces import QuaternionRingData

    for m in (1, 2):
        ring = QuaternionRingData(s.ws, m)
        assert all(ok for _, ok in ring.relations)


def check_canonical_class(s):
    for G in (make_cyclic(2), make_cyclic(4), make_klein_four(),
              make_quaternion(1)):
        v = s.engine.canonical_class(G)
        assert not v.cls.is_zero()
        # route agreement is asserted inside canonical_class
        assert v.construction == "bockstein+explicit-bar"


def check_canonical_power(s):
    C2 = make_cyclic(2)
    Gamma = s.ws.square(C2)
    v2 = s.engine.canonical_power(C2, 2)
    assert not s.ws.cohomology(
        Gamma, s.ws.ipow(C2, 2), 2).class_of(v2).is_zero()
    v3 = s.engine.canonical_power(C2, 3)
    assert is_cocycle(s.ws.res(Gamma), s.ws.ipow(C2, 3), 3, v3)


def check_filtration_methods_agree(s):
    C2 = make_cyclic(2)
    Gamma = s.ws.square(C2)
    for r in (1, 2):
        H = s.ws.cohomology(Gamma, s.ws.trivial(Gamma), r)
        for z in H.basis_classes():
            c1, c2 = s.engine.d_degree_both(z, r)
            assert c1.certified_n == c2.certified_n
            assert s.engine.zero_divisor_test(z) == (c1.certified_n >= 1)


def check_filtration_landmark(s):
    """Image dims 3, 2, 1 at r = 3 over C2, and an explicit class of
    certified weight exactly 2 under both methods."""
    C2 = make_cyclic(2)
    dims = []
    for n in (1, 2, 3):
        _, images = s.engine.direct_image(C2, 3, n)
        dims.append(FpMatrix.vstack([w.coords for w in images]).rank())
    assert dims == [3, 2, 1]


def check_product_rule(s):
    from .spaces import klein_square_classes

    gens, _ = klein_square_classes(s.ws)
    tx = gens["xL"] + gens["xR"]
    ty = gens["yL"] + gens["yR"]
    second = s.ws.cup_trivial(tx, gens["yR"]) + s.ws.cup_trivial(ty, gens["xL"])
    c1 = s.engine.d_degree_direct(tx, 1, class_expr="tau_x")
    c2 = s.engine.d_degree_direct(second, 2,
                                  class_expr="tau_x*yR + tau_y*xL")
    assert c1.certified_n == 1 and c2.certified_n >= 1
    prod = s.engine.product_rule_combine(c1, c2)
    assert prod.certified_n == c1.certified_n + c2.certified_n
    assert prod.all_checks_passed()


def check_e1_dimensions(s):
    assert sum(b.dim for b in s.engine.e1_page(make_cyclic(2), 1, 2).blocks) == 1
    assert sum(b.dim for b in s.engine.e1_page(make_klein_four(), 1, 2).blocks) == 18
    assert sum(b.dim for b in s.engine.e1_page(make_quaternion(1), 1, 1).blocks) == 5


def check_psi_naturality(s):
    Q, V = make_quaternion(1), make_klein_four()
    pi = hom_from_generator_images(Q, V, [2, 1])
    pageQ = s.engine.e1_page(Q, 1, 1)
    pageV = s.engine.e1_page(V, 1, 1)
    for (repB, _) in pageQ.orbits:
        for (repA, _) in pageV.orbits:
            psi = s.engine.psi_map(pi, repA, repB, 1)
            imgs = tuple(pi(e) for e in repB)
            on = 0 not in imgs and find_conjugator(V, imgs, repA) is not None
            assert psi.on_orbit == on
            if not on:
                assert psi.is_zero_map()
            else:
                g = find_conjugator(V, imgs, repA)
                oracle = s.engine.restriction_between_centralizers(
                    pi, repA, repB, 1, conjugator=g)
                assert psi.matrix == oracle


def check_class_expressions(s):
    from .classexpr import (
        ClassExprError,
        context_for_group,
        parse_class_expr,
        print_class_expr,
    )
    from .spaces import klein_square_classes

    for text in ("v1", "tau_x^2*yR + tau_x*tau_y*xL", "(xL + xR)^2",
                 "xL xR yL"):
        node = parse_class_expr(text)
        printed = print_class_expr(node)
        assert parse_class_expr(printed) == node
    ctx = context_for_group(s.ws, make_klein_four())
    _, v = klein_square_classes(s.ws)
    d, z = ctx.evaluate(parse_class_expr("v1"))
    assert (d, z) == (3, v[1])
    d0, z0 = ctx.evaluate(parse_class_expr("xL + xL"))
    assert z0.is_zero()
    try:
        parse_class_expr("tau_x * (xL + yR")
    except ClassExprError as exc:
        assert exc.position == 16
    else:
        raise AssertionError("unbalanced parenthesis accepted")


def check_cache_roundtrip(s):
    from .cache import ResolutionCache

    with tempfile.TemporaryDirectory() as d:
        cache = ResolutionCache(d)
        ws = Workspace(cache_dir=d)
        Q = make_quaternion(1)
        R = ws.res(Q)
        R2 = cache.load(Q, 2, 8)
        assert R2 is not None
        assert R2.ranks == R.ranks
        assert all(R2.diff[n] == R.diff[n] for n in range(1, R.max_degree + 1))
        # tamper: flip a byte and confirm the checksum rejects the entry
        files = [f for f in os.listdir(d) if not f.startswith(".")]
        path = os.path.join(d, files[0])
        blob = bytearray(open(path, "rb").read())
        blob[len(blob) // 2] ^= 1
        open(path, "wb").write(bytes(blob))
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            assert cache.load(Q, 2, 8) is None


CHECKS = [
    ("gf2 exact linear algebra", check_gf2_linear_algebra),
    ("group axioms and conjugacy", check_group_axioms),
    ("free resolutions verify", check_resolutions),
    ("orbit tables match actions", check_orbit_tables),
    ("graded dimensions", check_betti_numbers),
    ("quaternion ring relations", check_quaternion_rings),
    ("canonical class double construction", check_canonical_class),
    ("canonical powers", check_canonical_power),
    ("filtration methods agree", check_filtration_methods_agree),
    ("filtration landmark dims 3,2,1", check_filtration_landmark),
    ("product rule combines weights", check_product_rule),
    ("E1 page dimensions", check_e1_dimensions),
    ("psi naturality on/off orbit", check_psi_naturality),
    ("class expressions", check_class_expressions),
    ("cache round trip and tamper", check_cache_roundtrip),
]


def run_selftest(out=print):
    session = _Session()
    failures = 0
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            fn(session)
            status = "ok"
        except Exception as exc:  # noqa: BLE001 - report and continue
            status = f"FAIL: {exc!r}"
            failures += 1
        ms = (time.perf_counter() - t0) * 1000
        out(f"[{'ok' if status == 'ok' else 'FAIL'}] {name:<40} {ms:9.1f} ms"
            + ("" if status == "ok" else f"  {status}"))
    out(f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed")
    return failures
