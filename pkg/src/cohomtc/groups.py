"""Finite groups as dense multiplication tables.

Elements are indices 0..order-1 with identity at 0.  The constructors
cover the cast needed downstream: cyclic groups, generalized quaternion
groups of order 8m, the Klein four group, and binary direct products.
Everything is immutable after construction and safe to share.
"""

from __future__ import annotations

import hashlib
from functools import cached_property
from itertools import product

import numpy as np


class RelationViolation(ValueError):
    """Generator images do not satisfy the source group's relations."""


class IdentityInTuple(ValueError):
    """Tuple entries must be non-identity elements."""


class GeneratorsDoNotGenerate(ValueError):
    pass


class FiniteGroup:
    def __init__(self, name, mul, generators, element_names):
        self.name = name
        self.mul = np.ascontiguousarray(mul, dtype=np.int32)
        self.order = self.mul.shape[0]
        self.generators = list(generators)
        self.element_names = list(element_names)
        inv = np.full(self.order, -1, dtype=np.int32)
        for a in range(self.order):
            hits = np.nonzero(self.mul[a] == 0)[0]
            if hits.size != 1:
                raise ValueError("multiplication table has no unique inverse")
            inv[a] = hits[0]
        self.inverse = inv
        # direct-product bookkeeping, populated by direct_product()
        self.factors = None

    # -- basic structure ------------------------------------------------

    @property
    def identity(self):
        return 0

    def op(self, a, b):
        return int(self.mul[a, b])

    def inv(self, a):
        return int(self.inverse[a])

    def conj(self, g, a):
        """g a g^-1."""
        return int(self.mul[self.mul[g, a], self.inverse[g]])

    def element_order(self, a):
        k, e = 1, a
        while e != 0:
            e = self.op(e, a)
            k += 1
        return k

    def power(self, a, n):
        e = 0
        n = n % self.element_order(a) if n < 0 else n
        for _ in range(n):
            e = self.op(e, a)
        return e

    @cached_property
    def key(self):
        h = hashlib.sha256()
        h.update(self.name.encode())
        h.update(self.mul.tobytes())
        return f"{self.name}-{self.order}-{h.hexdigest()[:12]}"

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"

    @cached_property
    def is_abelian(self):
        return bool(np.array_equal(self.mul, self.mul.T))

    @cached_property
    def center(self):
        mask = np.all(self.mul == self.mul.T, axis=1)
        return [int(i) for i in np.nonzero(mask)[0]]

    def validate(self):
        """Check associativity, identity, inverses and generator closure."""
        n = self.order
        m = self.mul
        if not (np.array_equal(m[0], np.arange(n)) and np.array_equal(m[:, 0], np.arange(n))):
            raise ValueError("index 0 is not an identity")
        # (ab)c == a(bc), vectorized over b, c for each a
        for a in range(n):
            if not np.array_equal(m[m[a], :], m[a][m]):
                raise ValueError("associativity fails")
        for a in range(n):
            if m[a, self.inverse[a]] != 0:
                raise ValueError("inverse table inconsistent")
        if len(self.closure([g for _, g in self.generators])) != n:
            raise GeneratorsDoNotGenerate(self.name)
        return True

    def closure(self, elements):
        """Subgroup generated by the given elements, as a sorted list."""
        seen = {0}
        frontier = [0]
        gens = list(elements)
        while frontier:
            nxt = []
            for e in frontier:
                for g in gens:
                    f = self.op(e, g)
                    if f not in seen:
                        seen.add(f)
                        nxt.append(f)
            frontier = nxt
        return sorted(seen)

    @cached_property
    def bfs_tree(self):
        """Breadth-first factorization: ordered [(element, parent, gen_pos)].

        Every element is parent * generators[gen_pos]; the identity comes
        first with parent -1.  Deterministic, used for lazily extending
        generator actions to whole-group actions.
        """
        gens = [g for _, g in self.generators]
        seen = {0}
        out = [(0, -1, -1)]
        frontier = [0]
        while frontier:
            nxt = []
            for e in frontier:
                for pos, g in enumerate(gens):
                    f = self.op(e, g)
                    if f not in seen:
                        seen.add(f)
                        out.append((f, e, pos))
                        nxt.append(f)
            frontier = nxt
        if len(out) != self.order:
            raise GeneratorsDoNotGenerate(self.name)
        return out

    @cached_property
    def bfs_tree_left(self):
        """Like bfs_tree, but every element is generators[gen_pos] * parent.

        Matrix actions in the row convention compose contravariantly
        (action(gh) = action(h) @ action(g)), so building the orbit of a
        row by successive right-multiplication with generator matrices
        walks this left-factored tree.
        """
        gens = [g for _, g in self.generators]
        seen = {0}
        out = [(0, -1, -1)]
        frontier = [0]
        while frontier:
            nxt = []
            for e in frontier:
                for pos, g in enumerate(gens):
                    f = self.op(g, e)
                    if f not in seen:
                        seen.add(f)
                        out.append((f, e, pos))
                        nxt.append(f)
            frontier = nxt
        if len(out) != self.order:
            raise GeneratorsDoNotGenerate(self.name)
        return out

    # -- subgroups ------------------------------------------------------

    def subgroup(self, elements, name=None):
        """Subgroup on the given element list; returns (group, inclusion)."""
        elems = sorted(set(int(e) for e in elements))
        if 0 not in elems:
            raise ValueError("subgroup must contain the identity")
        pos = {e: i for i, e in enumerate(elems)}
        n = len(elems)
        mul = np.zeros((n, n), dtype=np.int32)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                c = self.op(a, b)
                if c not in pos:
                    raise ValueError("element set is not closed")
                mul[i, j] = pos[c]
        names = [self.element_names[e] for e in elems]
        gens = _greedy_generators(mul)
        gen_list = [(names[g], g) for g in gens]
        sub = FiniteGroup(name or f"{self.name}<{n}>", mul, gen_list, names)
        incl = GroupHomomorphism(sub, self, np.array(elems, dtype=np.int32))
        return sub, incl

    # -- serialization --------------------------------------------------

    def to_record(self):
        return {
            "schema_version": 1,
            "name": self.name,
            "order": self.order,
            "generators": [[n, int(i)] for n, i in self.generators],
            "element_names": self.element_names,
            "mul": [int(v) for v in self.mul.reshape(-1)],
        }

    @classmethod
    def from_record(cls, rec):
        n = rec["order"]
        mul = np.array(rec["mul"], dtype=np.int32).reshape(n, n)
        gens = [(name, int(i)) for name, i in rec["generators"]]
        return cls(rec["name"], mul, gens, rec["element_names"])


def _greedy_generators(mul):
    """Small generating set for a multiplication table, deterministically."""
    n = mul.shape[0]
    gens = []
    span = {0}
    for e in range(1, n):
        if e in span:
            continue
        gens.append(e)
        # closure of current generators
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    b = int(mul[a, g])
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt
        span = seen
        if len(span) == n:
            break
    return gens


class GroupHomomorphism:
    def __init__(self, source, target, image):
        self.source = source
        self.target = target
        self.image = np.ascontiguousarray(image, dtype=np.int32)
        if self.image.shape != (source.order,):
            raise ValueError("image map has wrong length")

    def __call__(self, a):
        return int(self.image[a])

    def compose(self, inner: "GroupHomomorphism") -> "GroupHomomorphism":
        """self o inner."""
        if inner.target.key != self.source.key:
            raise ValueError("composition mismatch")
        return GroupHomomorphism(inner.source, self.target, self.image[inner.image])

    def kernel_elements(self):
        return [int(i) for i in np.nonzero(self.image == 0)[0]]

    @property
    def is_injective(self):
        return len(set(self.image.tolist())) == self.source.order

    def verify(self):
        img = self.image
        lhs = img[self.source.mul]
        rhs = self.target.mul[img[:, None], img[None, :]]
        if not np.array_equal(lhs, rhs):
            raise RelationViolation("not a homomorphism")
        return True


def identity_hom(G):
    return GroupHomomorphism(G, G, np.arange(G.order, dtype=np.int32))


def hom_from_generator_images(source, target, images):
    """Total homomorphism from images of source.generators.

    Walks the BFS factorization to define the map on every element and
    rejects inconsistent assignments (RelationViolation).
    """
    if len(images) != len(source.generators):
        raise ValueError("one image per generator required")
    img = np.full(source.order, -1, dtype=np.int32)
    img[0] = 0
    for e, parent, pos in source.bfs_tree:
        if parent < 0:
            continue
        img[e] = target.op(img[parent], images[pos])
    hom = GroupHomomorphism(source, target, img)
    hom.verify()
    return hom


# -- constructors -------------------------------------------------------

# Standard groups are canonical objects: downstream caches (squares,
# coefficient modules, cohomology groups) key on object identity in
# places, so repeated construction must return the same instance.
_group_cache = {}


def _memoized(key, build):
    G = _group_cache.get(key)
    if G is None:
        G = build()
        _group_cache[key] = G
    return G


def make_cyclic(n, name=None):
    """Cyclic group of order n with generator t."""
    if name is None:
        return _memoized(("C", n), lambda: make_cyclic(n, name=f"C{n}"))
    if n < 1:
        raise ValueError("order must be positive")
    mul = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    names = ["1"] + [f"t^{i}" if i > 1 else "t" for i in range(1, n)]
    gens = [("t", 1 % n)] if n > 1 else []
    return FiniteGroup(name or f"C{n}", mul, gens, names)


def make_quaternion(m, name=None):
    """Generalized quaternion group of order 8m.

    Generators x of order 4m and y of order 4 with y^2 = x^{2m} and
    y x y^-1 = x^-1.  Elements are +-x^i y^j and the central element
    x^{2m} is written -1.
    """
    if name is None:
        return _memoized(("Q", m), lambda: make_quaternion(m, name=f"Q{8 * m}"))
    if m < 1:
        raise ValueError("m must be positive")
    n4 = 4 * m
    order = 8 * m

    def idx(i, j):
        return (i % n4) * 2 + (j % 2)

    mul = np.zeros((order, order), dtype=np.int32)
    for i, j, k, l in product(range(n4), range(2), range(n4), range(2)):
        if j == 0:
            ii, jj = i + k, l
        else:
            ii, jj = i - k, 1 + l
            if jj == 2:
                ii, jj = ii + 2 * m, 0
        mul[idx(i, j), idx(k, l)] = idx(ii, jj)

    names = [""] * order
    for i, j in product(range(n4), range(2)):
        sign = "" if i < 2 * m else "-"
        ii = i if i < 2 * m else i - 2 * m
        xpart = "" if ii == 0 else ("x" if ii == 1 else f"x^{ii}")
        ypart = "" if j == 0 else "y"
        body = (xpart + ypart) or "1"
        names[idx(i, j)] = sign + body if sign else body
    gens = [("x", idx(1, 0)), ("y", idx(0, 1))]
    return FiniteGroup(name or f"Q{order}", mul, gens, names)


def direct_product(G, H, name=None):
    """Componentwise product; pairing of (a, b) is a * |H| + b."""
    nG, nH = G.order, H.order
    a = np.repeat(np.arange(nG), nH)
    b = np.tile(np.arange(nH), nG)
    mul = G.mul[a[:, None], a[None, :]] * nH + H.mul[b[:, None], b[None, :]]
    names = [
        f"({G.element_names[i]},{H.element_names[j]})"
        for i in range(nG)
        for j in range(nH)
    ]
    gens = [(f"{n}L", g * nH) for n, g in G.generators] + [
        (f"{n}R", g) for n, g in H.generators
    ]
    P = FiniteGroup(name or f"{G.name}x{H.name}", mul, gens, names)
    P.factors = (G, H)
    return P


def pair_index(P, a, b):
    G, H = P.factors
    return a * H.order + b


def unpair_index(P, c):
    G, H = P.factors
    return divmod(int(c), H.order)


def make_klein_four():
    return _memoized(("V4",), _build_klein_four)


def _build_klein_four():
    C2 = make_cyclic(2)
    V = direct_product(C2, C2, name="V4")
    V.generators = [("x", 2), ("y", 1)]
    V.element_names = ["1", "y", "x", "xy"]
    # cached bfs_tree depends on generators; rebuild lazily from scratch
    V.__dict__.pop("bfs_tree", None)
    V.__dict__.pop("bfs_tree_left", None)
    # V is a base group here (it gets its own diagonal approximation and
    # its own square V x V downstream), not a product
    V.factors = None
    return V


def diagonal_embedding(G, G2):
    """G -> G2 = G x G, g -> (g, g)."""
    if G2.factors is None or G2.factors[0] is not G or G2.factors[1] is not G:
        raise ValueError("G2 must be direct_product(G, G)")
    img = np.arange(G.order, dtype=np.int32) * G.order + np.arange(G.order, dtype=np.int32)
    return GroupHomomorphism(G, G2, img)


def projection_hom(P, which):
    """Projection of a direct product onto one factor (0 left, 1 right)."""
    G, H = P.factors
    a = np.repeat(np.arange(G.order), H.order).astype(np.int32)
    b = np.tile(np.arange(H.order), G.order).astype(np.int32)
    return GroupHomomorphism(P, G if which == 0 else H, a if which == 0 else b)


def product_hom(f: GroupHomomorphism, g: GroupHomomorphism, src_prod, tgt_prod):
    """f x g between direct products."""
    nH = src_prod.factors[1].order
    img = np.zeros(src_prod.order, dtype=np.int32)
    for c in range(src_prod.order):
        a, b = divmod(c, nH)
        img[c] = f(a) * tgt_prod.factors[1].order + g(b)
    return GroupHomomorphism(src_prod, tgt_prod, img)


# -- tuples, centralizers, orbits ---------------------------------------


def check_tuple(G, entries):
    t = tuple(int(e) for e in entries)
    if any(e == 0 for e in t):
        raise IdentityInTuple(str(t))
    if any(not 0 < e < G.order for e in t):
        raise ValueError("entry out of range")
    return t


def centralizer(G, entries):
    """Sorted elements commuting with every entry of the tuple."""
    t = check_tuple(G, entries)
    mask = np.ones(G.order, dtype=bool)
    for a in t:
        mask &= G.mul[:, a] == G.mul[a, :]
    return [int(i) for i in np.nonzero(mask)[0]]


def conjugation_orbits(G, s):
    """Orbits of (G \\ 1)^s under componentwise conjugation.

    Returns a list of (representative, sorted orbit list); representatives
    are lexicographically least and the orbit list is sorted, so output is
    deterministic.
    """
    if s < 1:
        raise ValueError("arity must be >= 1")
    nonid = range(1, G.order)
    seen = set()
    orbits = []
    for t in product(nonid, repeat=s):
        if t in seen:
            continue
        orbit = set()
        frontier = [t]
        orbit.add(t)
        while frontier:
            cur = frontier.pop()
            for g in range(G.order):
                img = tuple(G.conj(g, a) for a in cur)
                if img not in orbit:
                    orbit.add(img)
                    frontier.append(img)
        rep = min(orbit)
        orbits.append((rep, sorted(orbit)))
        seen |= orbit
    orbits.sort(key=lambda item: item[0])
    return orbits


def find_conjugator(G, src, dst):
    """g with g * src * g^-1 == dst componentwise, or None."""
    for g in range(G.order):
        if all(G.conj(g, a) == b for a, b in zip(src, dst)):
            return g
    return None
