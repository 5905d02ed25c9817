"""Finite-dimensional modules over group algebras F_p[G].

A GModule stores a group, a dimension and a rule g -> invertible matrix.
Row convention throughout: vectors are rows and g acts by v @ action(g),
so action(gh) = action(h) @ action(g).

The coefficient systems built here are the ones cohomology needs: the
group algebra of G with the two-sided G x G action (a,b).c = a c b^{-1},
its augmentation ideal with basis {g - 1}, diagonal tensor powers,
duals against trivial coefficients, restrictions along homomorphisms,
and the short exact sequences linking consecutive tensor powers.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .gf2 import FpMatrix
from .groups import FiniteGroup, GroupHomomorphism, direct_product, unpair_index

# modules below dim threshold cache every action matrix; larger ones
# cache only what gets requested (tensor cubes over 256-element groups
# would otherwise hold hundreds of MB)
_CACHE_ALL_DIM = 1024

# tensor-product modules above this dimension never materialize their
# (dim x dim) action matrices for orbit tables; the action is applied one
# Kronecker factor at a time on dense rows instead
_BIG_TENSOR_DIM = 8192


def _apply_tensor_factors(dense_row: np.ndarray, factor_mats) -> np.ndarray:
    """row @ (A_1 (x) ... (x) A_k) without forming the Kronecker product.

    factor_mats are dense int32 matrices; the row is reshaped to a
    k-dimensional array and each factor is contracted along its own axis.
    """
    dims = [m.shape[0] for m in factor_mats]
    arr = dense_row.reshape(dims)
    for i, mat in enumerate(factor_mats):
        arr = np.tensordot(arr, mat, axes=([i], [0]))
        arr = np.moveaxis(arr, -1, i) & 1
    return arr.reshape(-1)

_square_cache: dict[str, FiniteGroup] = {}


def group_square(G: FiniteGroup) -> FiniteGroup:
    """G x G, memoized so coefficient modules share one group object."""
    P = _square_cache.get(G.key)
    if P is None:
        P = direct_product(G, G)
        _square_cache[G.key] = P
    return P


class GModule:
    def __init__(self, group, dim, act, name, basis_labels=None, p=2):
        self.group = group
        self.dim = dim
        self.p = p
        self.name = name
        self.basis_labels = basis_labels or [f"b{i}" for i in range(dim)]
        self._act = act
        self._cache: dict[int, FpMatrix] = {}
        self._cache_all = dim <= _CACHE_ALL_DIM
        # Kronecker factorization of the action (set by tensor
        # constructors); lets orbit tables on huge tensor powers run
        # factor-by-factor
        self.tensor_factors: list["GModule"] | None = None

    @property
    def key(self):
        h = hashlib.sha256(f"{self.group.key}|{self.name}|{self.p}".encode())
        return h.hexdigest()[:16]

    def action(self, g) -> FpMatrix:
        g = int(g)
        A = self._cache.get(g)
        if A is None:
            A = self._act(g)
            if self._cache_all or g in (e for _, e in self.group.generators):
                self._cache[g] = A
        return A

    def act(self, g, row: FpMatrix) -> FpMatrix:
        return row @ self.action(g)

    def sum_action(self, elements) -> FpMatrix:
        """Matrix of the group-algebra element sum(elements) (with multiplicity)."""
        out = FpMatrix.zeros(self.dim, self.dim, p=self.p)
        for g in elements:
            out = out + self.action(g)
        return out

    def orbit_table(self, row: FpMatrix) -> FpMatrix:
        """Stack of g . row for every g, in element order, built by BFS.

        Only generator action matrices are needed, so this stays cheap on
        high-dimensional modules.
        """
        if self.tensor_factors is not None and self.dim > _BIG_TENSOR_DIM:
            return self._orbit_table_factored(row)
        gens = [self.action(g) for _, g in self.group.generators]
        rows = [None] * self.group.order
        # Actions compose contravariantly, so right-multiplying by a
        # generator matrix prepends that generator: walk the left tree.
        for e, parent, pos in self.group.bfs_tree_left:
            rows[e] = row if parent < 0 else rows[parent] @ gens[pos]
        return FpMatrix.vstack(rows)

    def _orbit_table_factored(self, row: FpMatrix) -> FpMatrix:
        gen_mats = [
            [f.action(g).to_dense().astype(np.int32) for f in self.tensor_factors]
            for _, g in self.group.generators
        ]
        rows = [None] * self.group.order
        for e, parent, pos in self.group.bfs_tree_left:
            if parent < 0:
                rows[e] = row.to_dense()[0].astype(np.int32)
            else:
                rows[e] = _apply_tensor_factors(rows[parent], gen_mats[pos])
        return FpMatrix.from_dense(np.asarray(rows, dtype=np.uint8), p=self.p)

    def verify_action(self, full=False):
        """Check action(1) = id and the (anti)homomorphism property."""
        n = self.group.order
        if self.action(0) != FpMatrix.identity(self.dim, p=self.p):
            raise ValueError(f"{self.name}: identity does not act trivially")
        if full:
            pairs = [(g, h) for g in range(n) for h in range(n)]
        else:
            rng = np.random.default_rng(0)
            gens = [g for _, g in self.group.generators]
            pairs = [(g, int(rng.integers(n))) for g in gens for _ in range(4)]
        for g, h in pairs:
            gh = self.group.op(g, h)
            if self.action(gh) != self.action(h) @ self.action(g):
                raise ValueError(f"{self.name}: action not multiplicative at ({g},{h})")
        return True

    def invariants(self):
        """Fixed subspace as a Subspace (canonical echelon basis)."""
        gens = [g for _, g in self.group.generators]
        if not gens:
            return FpMatrix.identity(self.dim, p=self.p).row_space()
        stacked = FpMatrix.hstack(
            [self.action(g) - FpMatrix.identity(self.dim, p=self.p) for g in gens]
        )
        return stacked.kernel()

    def to_record(self):
        return {
            "schema_version": 1,
            "group": self.group.key,
            "dim": self.dim,
            "prime": self.p,
            "name": self.name,
            "labels": self.basis_labels,
            "generator_actions": {
                gname: self.action(g).to_dense().reshape(-1).tolist()
                for gname, g in self.group.generators
            },
        }

    def __repr__(self):
        return f"GModule({self.name}, dim={self.dim}, over {self.group.name})"


class ModuleMap:
    """Equivariant linear map; applied as row @ matrix (src.dim x tgt.dim)."""

    def __init__(self, source: GModule, target: GModule, matrix: FpMatrix, check=True):
        if source.group.key != target.group.key:
            raise ValueError("module map requires a common group")
        if matrix.nrows != source.dim or matrix.ncols != target.dim:
            raise ValueError("matrix shape mismatch")
        self.source = source
        self.target = target
        self.matrix = matrix
        if check:
            self.verify()

    def verify(self):
        for _, g in self.source.group.generators:
            if self.source.action(g) @ self.matrix != self.matrix @ self.target.action(g):
                raise ValueError("map is not equivariant")
        return True

    def __call__(self, row: FpMatrix) -> FpMatrix:
        return row @ self.matrix

    def compose(self, then: "ModuleMap") -> "ModuleMap":
        if then.source.dim != self.target.dim:
            raise ValueError("composition mismatch")
        return ModuleMap(self.source, then.target, self.matrix @ then.matrix, check=False)

    def dualize(self, hd_source: GModule, hd_target: GModule) -> "ModuleMap":
        """Precomposition map between the duals (arrow reversed)."""
        return ModuleMap(hd_target, hd_source, self.matrix.transpose(), check=False)

    @property
    def rank(self):
        return self.matrix.rank()

    def is_zero(self):
        return self.matrix.is_zero()


# -- constructors -------------------------------------------------------


def trivial_module(G, dim=1, p=2):
    I = FpMatrix.identity(dim, p=p)
    return GModule(G, dim, lambda g: I, f"triv{dim}", p=p)


def conj_group_algebra(G, p=2):
    """F_p[G] as a module over G x G via (a,b).c = a c b^{-1}."""
    Gamma = group_square(G)
    n = G.order

    def act(c):
        a, b = unpair_index(Gamma, c)
        binv = G.inv(b)
        dense = np.zeros((n, n), dtype=np.uint8)
        for g in range(n):
            dense[g, G.op(G.op(a, g), binv)] = 1
        return FpMatrix.from_dense(dense, p=p)

    return GModule(Gamma, n, act, f"FpG({G.name})", list(G.element_names), p=p)


def augmentation_ideal(G, p=2):
    """Augmentation ideal of conj_group_algebra(G), basis {g-1 : g != 1}.

    The returned module carries the whole short exact sequence
    0 -> I -> F_p[G] -> F_p -> 0 as attributes `inclusion` and
    `augmentation` (exactness is verified).
    """
    Gamma = group_square(G)
    n = G.order
    alg = conj_group_algebra(G, p=p)

    def act(c):
        a, b = unpair_index(Gamma, c)
        binv = G.inv(b)
        shift = G.op(a, binv)  # (a,b).(g-1) = (a g b^-1 - 1) - (a b^-1 - 1)
        dense = np.zeros((n - 1, n - 1), dtype=np.uint8)
        for g in range(1, n):
            img = G.op(G.op(a, g), binv)
            if img != 0:
                dense[g - 1, img - 1] ^= 1
            if shift != 0:
                dense[g - 1, shift - 1] ^= 1
        return FpMatrix.from_dense(dense, p=p)

    labels = [f"{G.element_names[g]}-1" for g in range(1, n)]
    M = GModule(Gamma, n - 1, act, f"I({G.name})", labels, p=p)

    inc = np.zeros((n - 1, n), dtype=np.uint8)
    for g in range(1, n):
        inc[g - 1, g] = 1
        inc[g - 1, 0] = p - 1
    M.inclusion = ModuleMap(M, alg, FpMatrix.from_dense(inc, p=p))
    triv = trivial_module(Gamma, p=p)
    M.augmentation = ModuleMap(alg, triv, FpMatrix.from_dense(np.ones((n, 1), np.uint8), p=p))
    M.algebra = alg
    if not M.inclusion.compose(M.augmentation).is_zero():
        raise ValueError("augmentation sequence not a complex")
    if M.inclusion.rank != n - 1 or M.augmentation.rank != 1:
        raise ValueError("augmentation sequence not exact")
    return M


def tensor_diagonal(M: GModule, N: GModule) -> GModule:
    if M.group.key != N.group.key:
        raise ValueError("tensor_diagonal requires a common group")
    dim = M.dim * N.dim
    act = lambda g: M.action(g).kron(N.action(g))
    labels = None
    if dim <= 4096:
        labels = [f"{a}(x){b}" for a in M.basis_labels for b in N.basis_labels]
    out = GModule(M.group, dim, act, f"({M.name}(x){N.name})", labels, p=M.p)
    out.tensor_factors = (M.tensor_factors or [M]) + (N.tensor_factors or [N])
    return out


def tensor_power(M: GModule, s: int) -> GModule:
    """s-fold diagonal tensor power, left-nested (first factor is the
    major index).  s = 0 gives the trivial module."""
    if s == 0:
        return trivial_module(M.group, p=M.p)
    out = M
    for _ in range(s - 1):
        out = tensor_diagonal(M, out)
    return out


def external_tensor(M: GModule, N: GModule, P: FiniteGroup) -> GModule:
    """M (x) N over P = G x H, with (g,h).(m (x) n) = (g.m) (x) (h.n)."""
    if P.factors is None:
        raise ValueError("P must be a direct product")
    act = lambda c: M.action(unpair_index(P, c)[0]).kron(N.action(unpair_index(P, c)[1]))
    return GModule(P, M.dim * N.dim, act, f"({M.name}[x]{N.name})", p=M.p)


def hom_dual(M: GModule) -> GModule:
    """Dual against trivial 1-dim coefficients: (g.f)(m) = f(g^-1 m)."""
    G = M.group
    act = lambda g: M.action(G.inv(g)).transpose()
    labels = [f"{l}^" for l in M.basis_labels] if M.basis_labels else None
    out = GModule(G, M.dim, act, f"hd({M.name})", labels, p=M.p)
    if M.tensor_factors is not None:
        # (A (x) B)^T = A^T (x) B^T, so the dual action factors the same way
        out.tensor_factors = [hom_dual(f) for f in M.tensor_factors]
    return out


def restrict(alpha: GroupHomomorphism, M: GModule) -> GModule:
    if M.group.key != alpha.target.key:
        raise ValueError("module not over the homomorphism target")
    return GModule(
        alpha.source,
        M.dim,
        lambda h: M.action(alpha(h)),
        f"res[{alpha.source.name}->{alpha.target.name}]({M.name})",
        M.basis_labels,
        p=M.p,
    )


class SESTower:
    """0 -> I^{(x)s+1} -> F_p[G] (x) I^{(x)s} -> I^{(x)s} -> 0 over G x G,
    plus the dualized sequence 0 -> hd(quo) -> hd(mid) -> hd(sub) -> 0."""

    def __init__(self, G, s, p=2):
        if s < 0:
            raise ValueError("s must be >= 0")
        self.group = group_square(G)
        self.s = s
        I = augmentation_ideal(G, p=p)
        Is = tensor_power(I, s)
        self.sub = tensor_diagonal(I, Is) if s > 0 else I
        self.mid = tensor_diagonal(I.algebra, Is)
        self.quo = Is
        eye = FpMatrix.identity(Is.dim, p=p)
        self.left = ModuleMap(self.sub, self.mid, I.inclusion.matrix.kron(eye), check=False)
        self.right = ModuleMap(self.mid, self.quo, I.augmentation.matrix.kron(eye), check=False)
        self.hd_sub = hom_dual(self.sub)
        self.hd_mid = hom_dual(self.mid)
        self.hd_quo = hom_dual(self.quo)
        self.hd_left = self.right.dualize(self.hd_mid, self.hd_quo)
        self.hd_right = self.left.dualize(self.hd_sub, self.hd_mid)

    def verify(self):
        self.left.verify()
        self.right.verify()
        if not self.left.compose(self.right).is_zero():
            raise ValueError("ses composite nonzero")
        if self.left.rank != self.sub.dim or self.right.rank != self.quo.dim:
            raise ValueError("ses not exact at the ends")
        if self.left.rank + self.right.rank != self.mid.dim:
            raise ValueError("ses not exact in the middle")
        return True


def ses_tower(G, s, p=2):
    return SESTower(G, s, p=p)


# -- orbit decomposition of the diagonal restriction --------------------


def tuple_index(G, t):
    """Index of (a_1-1)(x)...(x)(a_s-1) in the tensor-power basis."""
    d = G.order - 1
    idx = 0
    for a in t:
        idx = idx * d + (a - 1)
    return idx


def orbit_permutation_module(G, orbit, p=2):
    """Permutation module on a conjugation orbit of tuples, over G."""
    pos = {t: i for i, t in enumerate(orbit)}
    n = len(orbit)

    def act(g):
        dense = np.zeros((n, n), dtype=np.uint8)
        for i, t in enumerate(orbit):
            dense[i, pos[tuple(G.conj(g, a) for a in t)]] = 1
        return FpMatrix.from_dense(dense, p=p)

    labels = ["(" + ",".join(G.element_names[a] for a in t) + ")" for t in orbit]
    return GModule(G, n, act, f"Z[O{orbit[0]}]({G.name})", labels, p=p)


def orbit_decomposition(G, s, orbits, p=2):
    """Change of basis splitting restrict(diag, I^{(x)s}) into orbit blocks.

    The diagonal (g,g)-action sends a-1 to gag^{-1}-1 exactly (the cross
    term a b^{-1}-1 vanishes at b = a), so the decomposition matrix is the
    permutation regrouping tuple-basis indices by orbit.  Returns
    (blocks, perm) with perm[k] = tuple index of the k-th concatenated
    orbit element.
    """
    blocks = [orbit_permutation_module(G, orb, p=p) for _, orb in orbits]
    perm = []
    for _, orb in orbits:
        perm.extend(tuple_index(G, t) for t in orb)
    d = (G.order - 1) ** s
    if sorted(perm) != list(range(d)):
        raise ValueError("orbits do not partition the tuple basis")
    return blocks, np.array(perm, dtype=np.int64)
