"""Group cohomology H^r(G; M) from a free resolution, with cup products,
cross products, restrictions, connecting homomorphisms and ring checks.

A degree-r cochain is an equivariant map Hom_{F_p[G]}(F_r, M), stored as
the row vector of its generator values: length ranks[r] * dim M,
gen-major.  The coboundary is (delta f)(gen) = f(d gen).

Ext groups in the first variable are always folded into cohomology with
hom_dual coefficients (field coefficients make this exact), so one
resolution per group powers everything.
"""

from __future__ import annotations

import numpy as np

from .gf2 import FpMatrix, RowSolver, Subspace
from .gmodule import GModule, ModuleMap, external_tensor, tensor_diagonal
from .resolution import ChainMap, FreeResolution


class ResolutionTooShort(ValueError):
    pass


# -- cochain plumbing ---------------------------------------------------


def cochain_values(R: FreeResolution, M: GModule, r: int, coch: FpMatrix):
    """Split a cochain row into its per-generator value rows (1 x dim M)."""
    return [
        coch.take_cols(range(i * M.dim, (i + 1) * M.dim)) for i in range(R.ranks[r])
    ]


def value_tables(R, M, r, coch):
    """Orbit table of each generator value: row g of table j is g . f_j."""
    return [M.orbit_table(v) for v in cochain_values(R, M, r, coch)]


def apply_coboundary(R: FreeResolution, M: GModule, r: int, coch: FpMatrix) -> FpMatrix:
    """delta f as a degree-(r+1) cochain row, via orbit tables (no full
    coboundary matrix is materialized)."""
    if r + 1 > R.max_degree:
        raise ResolutionTooShort(f"need differentials to degree {r + 1}")
    n = R.group.order
    tables = value_tables(R, M, r, coch)
    pieces = []
    for i in range(R.ranks[r + 1]):
        d_row = R.diff[r + 1].row(R.gen_index(r + 1, i)).to_dense()[0].reshape(R.ranks[r], n)
        val = FpMatrix.zeros(1, M.dim, p=M.p)
        for j in range(R.ranks[r]):
            if d_row[j].any():
                val = val + FpMatrix.from_dense(d_row[j].reshape(1, -1), p=M.p) @ tables[j]
        pieces.append(val)
    return FpMatrix.hstack(pieces)


def coboundary_matrix(R: FreeResolution, M: GModule, r: int) -> FpMatrix:
    """Matrix of delta: C^r -> C^{r+1} in the row convention."""
    if r + 1 > R.max_degree:
        raise ResolutionTooShort(f"need differentials to degree {r + 1}")
    n = R.group.order
    dm = M.dim
    out = np.zeros((R.ranks[r] * dm, R.ranks[r + 1] * dm), dtype=np.uint8)
    for i in range(R.ranks[r + 1]):
        d_row = R.diff[r + 1].row(R.gen_index(r + 1, i)).to_dense()[0].reshape(R.ranks[r], n)
        for j in range(R.ranks[r]):
            elems = np.nonzero(d_row[j])[0]
            if elems.size == 0:
                continue
            block = M.sum_action(int(e) for e in elems)
            out[j * dm:(j + 1) * dm, i * dm:(i + 1) * dm] = block.to_dense()
    return FpMatrix.from_dense(out, p=M.p)


def is_cocycle(R, M, r, coch) -> bool:
    return apply_coboundary(R, M, r, coch).is_zero()


# -- cohomology groups --------------------------------------------------


class CohomologyClass:
    __slots__ = ("parent", "coords", "rep")

    def __init__(self, parent, coords: FpMatrix, rep: FpMatrix):
        self.parent = parent
        self.coords = coords
        self.rep = rep

    def is_zero(self):
        return self.coords.is_zero()

    def __eq__(self, other):
        return (
            isinstance(other, CohomologyClass)
            and self.parent is other.parent
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((id(self.parent), self.coords))

    def __add__(self, other):
        if other.parent is not self.parent:
            raise ValueError("classes live in different cohomology groups")
        return self.parent.class_of(self.rep + other.rep)

    def __repr__(self):
        return f"[{self.coords.to_dense()[0].tolist()}] in {self.parent}"


class CohomologyGroup:
    """H^r(G; M) computed from the resolution R with canonical echelon
    representatives."""

    def __init__(self, R: FreeResolution, M: GModule, r: int):
        if r + 1 > R.max_degree:
            raise ResolutionTooShort(f"H^{r} needs a resolution to degree {r + 1}")
        self.resolution = R
        self.module = M
        self.degree = r
        self.group = R.group
        d_out = coboundary_matrix(R, M, r)
        self.cocycles = d_out.kernel()
        if r == 0:
            self.coboundaries = Subspace(
                R.ranks[0] * M.dim, FpMatrix.zeros(0, R.ranks[0] * M.dim, p=M.p), []
            )
        else:
            self.coboundaries = coboundary_matrix(R, M, r - 1).row_space()
        reps = []
        span = self.coboundaries
        for k in range(self.cocycles.dim):
            v = self.cocycles.basis.row(k)
            if span.contains(v):
                continue
            reps.append(v)
            span = Subspace.from_rows(
                span.ambient, FpMatrix.vstack([span.basis] + [v])
            )
        self.basis = reps
        self.dim = len(reps)
        self._solver = None

    def _get_solver(self):
        if self._solver is None:
            mats = self.basis + [self.coboundaries.basis]
            self._solver = RowSolver(FpMatrix.vstack(mats)) if self.basis else None
        return self._solver

    def class_of(self, coch: FpMatrix) -> CohomologyClass:
        """Class of a cocycle row (verified)."""
        if not is_cocycle(self.resolution, self.module, self.degree, coch):
            raise ValueError("not a cocycle")
        if self.dim == 0:
            return CohomologyClass(self, FpMatrix.zeros(1, 0, p=self.module.p), coch)
        x = self._get_solver().solve(coch)
        if x is None:
            raise ValueError("cocycle outside the computed cocycle space")
        coords = x.take_cols(range(self.dim))
        return CohomologyClass(self, coords, coch)

    def zero(self):
        return CohomologyClass(
            self, FpMatrix.zeros(1, self.dim, p=self.module.p),
            FpMatrix.zeros(1, self.resolution.ranks[self.degree] * self.module.dim, p=self.module.p),
        )

    def basis_classes(self):
        return [self.class_of(v) for v in self.basis]

    def from_coords(self, coords: FpMatrix) -> CohomologyClass:
        rep = FpMatrix.zeros(1, self.cocycles.ambient, p=self.module.p)
        dense = coords.to_dense()[0]
        for k in np.nonzero(dense)[0]:
            rep = rep + self.basis[int(k)]
        return CohomologyClass(self, coords.copy(), rep)

    def __repr__(self):
        return f"H^{self.degree}({self.group.name}; {self.module.name}) dim {self.dim}"


def betti_table(dims, title="degree  dim"):
    lines = [title]
    for r, d in enumerate(dims):
        lines.append(f"{r:>6}  {d}")
    return "\n".join(lines)


# -- coefficient pairings ----------------------------------------------


class CoefficientPairing:
    """Equivariant pairing mu: M (x) N -> L, consumed in Gram form.

    contract takes the dim M x dim N matrix T = sum_k m_k (x) n_k (as
    coordinates) and returns the 1 x dim L row of mu applied to it.

    A pairing may also supply contract_pair(Z1, C_dense, Z2), the value of
    contract on the accumulated T = sum Z1^T C Z2 computed one block at a
    time without materializing T; cup products prefer it when present
    (contraction is linear, so per-block results just add).  This is what
    keeps evaluation against huge tensor powers feasible.
    """

    def __init__(self, M: GModule, N: GModule, L: GModule, contract, name,
                 contract_pair=None):
        self.M = M
        self.N = N
        self.L = L
        self._contract = contract
        self.name = name
        self.contract_pair = contract_pair

    def contract(self, T: FpMatrix) -> FpMatrix:
        return self._contract(T)


def kron_pairing(M: GModule, N: GModule, L: GModule | None = None) -> CoefficientPairing:
    """The identity pairing M (x) N -> M (x) N (Kronecker coordinates)."""
    if L is None:
        L = tensor_diagonal(M, N)
    contract = lambda T: FpMatrix.from_dense(T.to_dense().reshape(1, -1), p=M.p)
    return CoefficientPairing(M, N, L, contract, "kron")


def scalar_pairing(M, N, L, dense_matrix: np.ndarray, name="mu"):
    """Pairing given by an explicit (dim M * dim N) x dim L matrix."""
    mat = FpMatrix.from_dense(dense_matrix, p=M.p)
    contract = lambda T: FpMatrix.from_dense(T.to_dense().reshape(1, -1), p=M.p) @ mat
    return CoefficientPairing(M, N, L, contract, name)


def trivial_pairing(triv: GModule) -> CoefficientPairing:
    contract = lambda T: T.copy()
    return CoefficientPairing(triv, triv, triv, contract, "triv")


def reversal_permutation(d: int, n: int) -> np.ndarray:
    """Index permutation of {0..d^n-1} reversing the tensor factors."""
    rem = np.arange(d ** n, dtype=np.int64)
    out = np.zeros(d ** n, dtype=np.int64)
    for _ in range(n):
        rem, digit = np.divmod(rem, d)
        out = out * d + digit
    return out


def ev_pairing(Ipow: GModule, hd_Ipow: GModule, triv: GModule, d: int, n: int):
    """Evaluation with argument reversal:
    ev(x_1 (x) ... (x) x_n (x) f) = f(x_n (x) ... (x) x_1)."""
    rev = reversal_permutation(d, n)

    def contract(T: FpMatrix) -> FpMatrix:
        dense = T.to_dense()
        total = int(dense[np.arange(dense.shape[0]), rev].sum()) % Ipow.p
        return FpMatrix.from_dense(np.array([[total]], dtype=np.uint8), p=Ipow.p)

    # factored route: the T-contraction of one block Z1^T C Z2 equals
    # sum_{g1,g2} C[g1,g2] <Z1[g1], Z2[g2] o rev>, a small Gram matrix
    # against C -- no d^n x d^n matrix is ever formed
    permuted = {}

    def contract_pair(Z1: FpMatrix, C_dense: np.ndarray, Z2: FpMatrix) -> FpMatrix:
        entry = permuted.get(id(Z2))
        if entry is None or entry[0] is not Z2:
            entry = (Z2, Z2.take_cols(rev))
            permuted[id(Z2)] = entry
        W = (Z1 @ entry[1].transpose()).to_dense()
        total = int((W.astype(np.int64) * C_dense).sum()) % Ipow.p
        return FpMatrix.from_dense(np.array([[total]], dtype=np.uint8), p=Ipow.p)

    return CoefficientPairing(Ipow, hd_Ipow, triv, contract, f"ev{n}",
                              contract_pair=contract_pair)


# -- cup products -------------------------------------------------------


def diag_block_table(cm: ChainMap, RT: FreeResolution):
    """Coefficient matrices of a diagonal approximation, per generator.

    Returns table[n][i] = dict mapping (p1, i1, i2) -> |G| x |G| uint8
    matrix C with C[g1, g2] the coefficient of ((p1,i1,i2), (g1,g2)) in
    the image of generator i of degree n (p2 = n - p1).
    """
    G = cm.source.group
    nG = G.order
    table = []
    for n in range(len(cm.mats)):
        pos = {g: k for k, g in enumerate(RT.gens[n])}
        per_gen = []
        for i in range(cm.source.ranks[n]):
            row = cm.mats[n].row(cm.source.gen_index(n, i)).to_dense()[0]
            row = row.reshape(len(RT.gens[n]), nG, nG)
            blocks = {}
            for (p1, i1, i2), k in pos.items():
                if row[k].any():
                    blocks[(p1, i1, i2)] = row[k].copy()
            per_gen.append(blocks)
        table.append(per_gen)
    return table


def cup_base(R: FreeResolution, diag_table, r1, coch1, r2, coch2,
             pairing: CoefficientPairing) -> FpMatrix:
    """Cup product cochain over a base group G from its diagonal
    approximation blocks; modules of the pairing are G-modules."""
    M, N = pairing.M, pairing.N
    n = r1 + r2
    Z1 = {i: M.orbit_table(v) for i, v in enumerate(cochain_values(R, M, r1, coch1))}
    Z2 = {j: N.orbit_table(v) for j, v in enumerate(cochain_values(R, N, r2, coch2))}
    factored = pairing.contract_pair
    pieces = []
    for i in range(R.ranks[n]):
        blocks = [
            (i1, i2, C)
            for (p1, i1, i2), C in diag_table[n][i].items()
            if p1 == r1
        ]
        if factored is not None:
            acc = FpMatrix.zeros(1, pairing.L.dim, p=M.p)
            for i1, i2, C in blocks:
                acc = acc + factored(Z1[i1], C, Z2[i2])
            pieces.append(acc)
            continue
        T = FpMatrix.zeros(M.dim, N.dim, p=M.p)
        for i1, i2, C in blocks:
            Cm = FpMatrix.from_dense(C, p=M.p)
            T = T + Z1[i1].transpose() @ Cm @ Z2[i2]
        pieces.append(pairing.contract(T))
    return FpMatrix.hstack(pieces)


def cup_product_group(RP: FreeResolution, dtG, dtH, nG, nH, r1, coch1, r2, coch2,
                      pairing: CoefficientPairing) -> FpMatrix:
    """Cup product over P = G x H using only the factor groups' diagonal
    blocks: the diagonal of a product is the reordered tensor of the
    factor diagonals (signs vanish, p = 2)."""
    M, N = pairing.M, pairing.N
    if M.p != 2:
        raise ValueError("product-group cup products implemented for p = 2")
    n = r1 + r2
    pos1 = {g: k for k, g in enumerate(RP.gens[r1])}
    pos2 = {g: k for k, g in enumerate(RP.gens[r2])}
    vals1 = cochain_values(RP, M, r1, coch1)
    vals2 = cochain_values(RP, N, r2, coch2)
    Z1_cache: dict = {}
    Z2_cache: dict = {}

    def Z(cache, mod, vals, pos, gen):
        t = cache.get(gen)
        if t is None:
            t = mod.orbit_table(vals[pos[gen]])
            cache[gen] = t
        return t

    factored = pairing.contract_pair
    pieces = []
    for K, (a, i, j) in enumerate(RP.gens[n]):
        b = n - a
        acc = FpMatrix.zeros(1, pairing.L.dim, p=2) if factored is not None \
            else FpMatrix.zeros(M.dim, N.dim, p=2)
        for (p1, i1, i2), CG in dtG[a][i].items():
            p2 = a - p1
            for (q1, j1, j2), CH in dtH[b][j].items():
                q2 = b - q1
                if p1 + q1 != r1:
                    continue
                g1 = (p1, i1, j1)
                g2 = (p2, i2, j2)
                if g1 not in pos1 or g2 not in pos2:
                    continue
                C = np.kron(CG, CH) & 1
                Z1 = Z(Z1_cache, M, vals1, pos1, g1)
                Z2 = Z(Z2_cache, N, vals2, pos2, g2)
                if factored is not None:
                    acc = acc + factored(Z1, C, Z2)
                else:
                    acc = acc + Z1.transpose() @ FpMatrix.from_dense(C, p=2) @ Z2
        pieces.append(acc if factored is not None else pairing.contract(acc))
    return FpMatrix.hstack(pieces)


def cross_product(RG, RH, RP, M, N, MxN, r1, coch1, r2, coch2) -> FpMatrix:
    """External product: the cochain on RG (x) RH whose value on generator
    (r1, i, j) is value1_i (x) value2_j and which vanishes on every other
    degree split."""
    vals1 = cochain_values(RG, M, r1, coch1)
    vals2 = cochain_values(RH, N, r2, coch2)
    n = r1 + r2
    pieces = []
    for (a, i, j) in RP.gens[n]:
        if a == r1:
            pieces.append(vals1[i].kron(vals2[j]))
        else:
            pieces.append(FpMatrix.zeros(1, MxN.dim, p=M.p))
    return FpMatrix.hstack(pieces)


# -- restriction and connecting homomorphism ----------------------------


def restrict_cochain(cm: ChainMap, M: GModule, r: int, coch: FpMatrix) -> FpMatrix:
    """Pull a cochain back along a chain map lifted over alpha: the result
    is a cochain on cm.source valued in restrict(alpha, M)."""
    R_src, R_tgt = cm.source, cm.target
    nT = R_tgt.group.order
    tables = value_tables(R_tgt, M, r, coch)
    pieces = []
    for i in range(R_src.ranks[r]):
        row = cm.mats[r].row(R_src.gen_index(r, i)).to_dense()[0].reshape(R_tgt.ranks[r], nT)
        val = FpMatrix.zeros(1, M.dim, p=M.p)
        for j in range(R_tgt.ranks[r]):
            if row[j].any():
                val = val + FpMatrix.from_dense(row[j].reshape(1, -1), p=M.p) @ tables[j]
        pieces.append(val)
    return FpMatrix.hstack(pieces)


class ConnectingMap:
    """Bockstein-style connecting homomorphism of a coefficient SES
    0 -> A -> B -> C -> 0: H^r(G; C) -> H^{r+1}(G; A) by the zig-zag
    lift / coboundary / pull back."""

    def __init__(self, R: FreeResolution, incl: ModuleMap, proj: ModuleMap):
        self.R = R
        self.A = incl.source
        self.B = incl.target
        self.C = proj.target
        if proj.source is not self.B:
            raise ValueError("SES maps do not compose")
        self._lift = RowSolver(proj.matrix)
        self._pull = RowSolver(incl.matrix)

    def apply_cochain(self, r: int, coch: FpMatrix) -> FpMatrix:
        vals = cochain_values(self.R, self.C, r, coch)
        lifted = []
        for v in vals:
            w = self._lift.solve(v)
            if w is None:
                raise RuntimeError("SES projection not surjective (bug)")
            lifted.append(w)
        w_coch = FpMatrix.hstack(lifted)
        dw = apply_coboundary(self.R, self.B, r, w_coch)
        pieces = []
        for v in cochain_values(self.R, self.B, r + 1, dw):
            u = self._pull.solve(v)
            if u is None:
                raise RuntimeError("connecting zig-zag left the image (not a cocycle?)")
            pieces.append(u)
        return FpMatrix.hstack(pieces)


# -- ring presentation checking ----------------------------------------


def _monomials(degrees, total):
    """All exponent tuples of weighted degree exactly `total`."""
    if not degrees:
        return [()] if total == 0 else []
    head = degrees[0]
    out = []
    e = 0
    while e * head <= total:
        for rest in _monomials(degrees[1:], total - e * head):
            out.append((e,) + rest)
        e += 1
    return out


def presented_ring_dims(degrees, relations, bound):
    """Graded dims of F_2[gens]/(relations) through `bound`.

    relations are homogeneous polynomials given as iterables of exponent
    tuples (F_2 coefficients).
    """
    dims = []
    for d in range(bound + 1):
        mons = _monomials(degrees, d)
        pos = {m: k for k, m in enumerate(mons)}
        rows = []
        for rel in relations:
            rel = list(rel)
            rdeg = sum(e * w for e, w in zip(rel[0], degrees))
            if rdeg > d:
                continue
            for mult in _monomials(degrees, d - rdeg):
                row = np.zeros(len(mons), dtype=np.uint8)
                for term in rel:
                    prod = tuple(a + b for a, b in zip(term, mult))
                    row[pos[prod]] ^= 1
                rows.append(row)
        if rows:
            rank = FpMatrix.from_dense(np.array(rows), p=2).rank()
        else:
            rank = 0
        dims.append(len(mons) - rank)
    return dims
