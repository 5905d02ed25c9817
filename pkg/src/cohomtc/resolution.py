"""Free resolutions of the trivial module over F_p[G].

A free module of rank r over F_p[G] is the F_p-space of dimension
r * |G| with basis indexed gen-major: index(i, e) = i * |G| + e, where e
runs over group elements and index (i, 0) is the i-th generator.  The
group acts by permuting e on the left; differentials are equivariant for
this action.

Row convention: chains are row vectors and d sends degree n to n-1 via
v @ diff[n], so diff[n] has shape (r_n |G|) x (r_{n-1} |G|).
"""

from __future__ import annotations

import numpy as np

from .gf2 import FpMatrix, RowSolver, Subspace
from .groups import FiniteGroup, GroupHomomorphism

MAX_ORDER = 4096
MAX_DEGREE = 8


class DegreeTooLarge(ValueError):
    pass


class NoSolution(RuntimeError):
    """A chain-map lift failed; indicates a non-exact target (a bug)."""


def _perm_all(G):
    """perm[h, t] = h^-1 t: row h is the inverse permutation of left
    translation by h, so block[perm[h]] is the row h . block."""
    return np.take(G.mul, G.inverse, axis=0)


class FreeResolution:
    def __init__(self, group, p, ranks, diffs, augmentation):
        self.group = group
        self.p = p
        self.ranks = list(ranks)
        self.diff = list(diffs)  # diff[0] is None; diff[n]: F_n -> F_{n-1}
        self.augmentation = augmentation  # (r_0 |G|) x 1
        self.max_degree = len(ranks) - 1
        self._perm = _perm_all(group)

    def free_dim(self, n):
        return self.ranks[n] * self.group.order

    def gen_index(self, n, i):
        return i * self.group.order

    def translate(self, dense_rows: np.ndarray, h: int) -> np.ndarray:
        """h . v for dense row(s) over a free module, any degree."""
        n = self.group.order
        r = dense_rows.shape[-1] // n
        shaped = dense_rows.reshape(*dense_rows.shape[:-1], r, n)
        return shaped[..., self._perm[h]].reshape(dense_rows.shape)

    def orbit_rows(self, dense_row: np.ndarray) -> np.ndarray:
        """(|G|, dim) array whose row h is h . v; row 0 is v itself."""
        n = self.group.order
        r = dense_row.shape[0] // n
        blocks = dense_row.reshape(r, n)
        out = blocks[:, self._perm].transpose(1, 0, 2).reshape(n, r * n)
        return np.ascontiguousarray(out)

    def extend_from_generators(self, n, gen_rows: np.ndarray) -> FpMatrix:
        """Equivariant matrix on F_n from the images of its generators.

        gen_rows is (ranks[n], target_dim) dense; row (i, h) of the result
        is h . gen_rows[i].
        """
        pieces = [self.orbit_rows(gen_rows[i]) for i in range(self.ranks[n])]
        return FpMatrix.from_dense(np.concatenate(pieces, axis=0), p=self.p)

    def verify(self):
        """d o d = 0, equivariance by construction, exactness by ranks."""
        n0 = self.group.order
        if (self.diff[1] @ self.augmentation).is_zero() is False:
            raise ValueError("d_1 then augmentation is nonzero")
        r_prev = self.augmentation.rank()
        if r_prev != 1:
            raise ValueError("augmentation not surjective")
        for n in range(1, self.max_degree + 1):
            d = self.diff[n]
            if n >= 2 and not (self.diff[n] @ self.diff[n - 1]).is_zero():
                raise ValueError(f"d o d nonzero at degree {n}")
            # exactness at degree n-1: rank d_n = dim F_{n-1} - rank d_{n-1}
            if d.rank() != self.free_dim(n - 1) - r_prev:
                raise ValueError(f"not exact at degree {n - 1}")
            r_prev = d.rank()
        return True


class ChainMap:
    """Chain map R_src -> R_tgt over a group homomorphism alpha, i.e.
    mats[n](h . v) = alpha(h) . mats[n](v)."""

    def __init__(self, alpha, source, target, mats):
        self.alpha = alpha
        self.source = source
        self.target = target
        self.mats = list(mats)

    def verify(self):
        top = min(len(self.mats) - 1, self.source.max_degree, self.target.max_degree)
        for n in range(1, top + 1):
            lhs = self.source.diff[n] @ self.mats[n - 1]
            rhs = self.mats[n] @ self.target.diff[n]
            if lhs != rhs:
                raise ValueError(f"chain map does not commute at degree {n}")
        return True


def resolution_of_trivial(G: FiniteGroup, max_degree: int, p: int = 2) -> FreeResolution:
    """Generic builder: iterated kernels with a greedy minimal generating
    set over F_p[G].  Minimal ranks whenever F_p[G] is local (p-groups)."""
    if G.order > MAX_ORDER:
        raise DegreeTooLarge(f"group order {G.order} exceeds {MAX_ORDER}")
    if max_degree > MAX_DEGREE:
        raise DegreeTooLarge(f"max_degree {max_degree} exceeds {MAX_DEGREE}")
    n = G.order
    aug = FpMatrix.from_dense(np.ones((n, 1), np.uint8), p=p)
    res = FreeResolution(G, p, [1], [None], aug)
    prev = aug
    for deg in range(1, max_degree + 1):
        ker = prev.kernel()
        gen_rows = []
        orbit_blocks = []
        span = Subspace(ker.ambient, FpMatrix.zeros(0, ker.ambient, p=p), [])
        for k in range(ker.dim):
            v = ker.basis.row(k)
            if span.contains(v):
                continue
            dense = v.to_dense()[0]
            gen_rows.append(dense)
            orbit_blocks.append(res.orbit_rows(dense))
            stacked = np.concatenate([span.basis.to_dense()] + [orbit_blocks[-1]])
            span = Subspace.from_rows(ker.ambient, FpMatrix.from_dense(stacked, p=p))
            if span.dim == ker.dim:
                break
        if span.dim != ker.dim:
            raise NoSolution("greedy generators failed to span the kernel")
        res.ranks.append(len(gen_rows))
        d = FpMatrix.from_dense(np.concatenate(orbit_blocks, axis=0), p=p)
        res.diff.append(d)
        res.max_degree = deg
        prev = d
    return res


def tensor_resolution(RG: FreeResolution, RH: FreeResolution, P: FiniteGroup,
                      max_degree: int | None = None) -> FreeResolution:
    """Tensor product of resolutions, a free resolution over P = G x H.

    Generators at total degree n are (a, i, j) with a + b = n, ordered by
    a ascending, then i, then j.  d(u (x) v) = du (x) v + (-1)^a u (x) dv.
    """
    if RG.p != RH.p:
        raise ValueError("prime mismatch")
    if P.factors is None or P.factors[0].order != RG.group.order \
            or P.factors[1].order != RH.group.order:
        raise ValueError("P must be the direct product of the factor groups")
    G, H = RG.group, RH.group
    nG, nH = G.order, H.order
    p = RG.p
    if max_degree is None:
        max_degree = min(RG.max_degree, RH.max_degree)

    def gen_list(ntot):
        out = []
        for a in range(ntot + 1):
            b = ntot - a
            if a > RG.max_degree or b > RH.max_degree:
                continue
            for i in range(RG.ranks[a]):
                for j in range(RH.ranks[b]):
                    out.append((a, i, j))
        return out

    gens = [gen_list(ntot) for ntot in range(max_degree + 1)]
    ranks = [len(g) for g in gens]

    def free_index(ntot, gpos, eG, eH):
        return gpos * nG * nH + eG * nH + eH

    # dense generator-image rows, then equivariant extension
    aug = FpMatrix.from_dense(np.ones((nG * nH, 1), np.uint8), p=p)
    res = FreeResolution(P, p, ranks, [None], aug)
    for ntot in range(1, max_degree + 1):
        tgt_pos = {g: k for k, g in enumerate(gens[ntot - 1])}
        dim_tgt = ranks[ntot - 1] * nG * nH
        rows = np.zeros((ranks[ntot], dim_tgt), dtype=np.uint8)
        for k, (a, i, j) in enumerate(gens[ntot]):
            b = ntot - a
            if a >= 1:
                dG = RG.diff[a].row(RG.gen_index(a, i)).to_dense()[0]
                for flat in np.nonzero(dG)[0]:
                    ii, eG = divmod(int(flat), nG)
                    gp = tgt_pos[(a - 1, ii, j)]
                    rows[k, free_index(ntot - 1, gp, eG, 0)] ^= 1
            if b >= 1:
                sign = 1 if (p == 2 or a % 2 == 0) else p - 1
                dH = RH.diff[b].row(RH.gen_index(b, j)).to_dense()[0]
                for flat in np.nonzero(dH)[0]:
                    jj, eH = divmod(int(flat), nH)
                    gp = tgt_pos[(a, i, jj)]
                    rows[k, free_index(ntot - 1, gp, 0, eH)] = \
                        (rows[k, free_index(ntot - 1, gp, 0, eH)] + sign) % p
        res.diff.append(res.extend_from_generators(ntot, rows))
        res.max_degree = ntot
    res.gens = gens
    return res


def bar_resolution(G: FiniteGroup, max_degree: int = 2, p: int = 2) -> FreeResolution:
    """Unnormalized bar resolution in degrees 0..2 (rank |G|^n growth).

    Generators in degree 1 are [g] for g in G, in degree 2 [g|h] ordered
    g-major.  d[g] = g.[] - [], d[g|h] = g.[h] - [gh] + [g].
    """
    if max_degree > 2:
        raise DegreeTooLarge("bar resolution only built to degree 2")
    n = G.order
    aug = FpMatrix.from_dense(np.ones((n, 1), np.uint8), p=p)
    ranks = [1, n, n * n][: max_degree + 1]
    res = FreeResolution(G, p, ranks, [None], aug)
    if max_degree >= 1:
        rows = np.zeros((n, n), dtype=np.uint8)
        for g in range(n):
            rows[g, g] = (rows[g, g] + 1) % p
            rows[g, 0] = (rows[g, 0] + p - 1) % p
        res.diff.append(res.extend_from_generators(1, rows))
    if max_degree >= 2:
        rows = np.zeros((n * n, n * n), dtype=np.uint8)
        for g in range(n):
            for h in range(n):
                k = g * n + h
                rows[k, h * n + g] = (rows[k, h * n + g] + 1) % p  # g.[h]
                gh = G.op(g, h)
                rows[k, gh * n] = (rows[k, gh * n] + p - 1) % p  # -[gh]
                rows[k, g * n] = (rows[k, g * n] + 1) % p  # +[g]
        res.diff.append(res.extend_from_generators(2, rows))
    return res


def lift_chain_map(alpha: GroupHomomorphism, R_src: FreeResolution,
                   R_tgt: FreeResolution, f0_gen: np.ndarray | None = None,
                   max_degree: int | None = None) -> ChainMap:
    """Comparison-theorem lift over alpha: source(alpha) acts on R_src,
    target(alpha) on R_tgt.

    Defined on generators by solving d(f_n gen) = f_{n-1}(d gen) with the
    canonical deterministic solve, then extended twisted-equivariantly:
    row (i, h) of mats[n] is alpha(h) . f_n(gen_i).
    """
    if R_src.group.key != alpha.source.key or R_tgt.group.key != alpha.target.key:
        raise ValueError("resolutions do not match the homomorphism")
    if max_degree is None:
        max_degree = min(R_src.max_degree, R_tgt.max_degree)
    nS, nT = R_src.group.order, R_tgt.group.order
    p = R_src.p

    def extend(n, gen_rows):
        pieces = []
        for i in range(R_src.ranks[n]):
            orb = np.zeros((nS, gen_rows.shape[1]), dtype=np.uint8)
            for h in range(nS):
                orb[h] = R_tgt.translate(gen_rows[i], alpha(h))
            pieces.append(orb)
        return FpMatrix.from_dense(np.concatenate(pieces, axis=0), p=p)

    if f0_gen is None:
        f0_gen = np.zeros((R_src.ranks[0], R_tgt.free_dim(0)), dtype=np.uint8)
        f0_gen[0, 0] = 1  # generator to generator, compatible with augmentations
    mats = [extend(0, f0_gen)]
    prev_gen = f0_gen
    for n in range(1, max_degree + 1):
        solver = RowSolver(R_tgt.diff[n])
        gen_rows = np.zeros((R_src.ranks[n], R_tgt.free_dim(n)), dtype=np.uint8)
        for i in range(R_src.ranks[n]):
            rhs = R_src.diff[n].row(R_src.gen_index(n, i)) @ mats[n - 1]
            sol = solver.solve(rhs)
            if sol is None:
                raise NoSolution(f"lift failed at degree {n}")
            gen_rows[i] = sol.to_dense()[0]
        mats.append(extend(n, gen_rows))
    cm = ChainMap(alpha, R_src, R_tgt, mats)
    cm.verify()
    return cm


def contracting_homotopy(R: FreeResolution, max_degree: int | None = None):
    """F_p-linear homotopy of the augmented complex: s[-1]: F_p -> F_0 and
    s[n]: F_n -> F_{n+1} with d s + s d = id.  Returned as a list
    [s_{-1}, s_0, ..., s_{max-1}] of FpMatrix (row convention).

    Deterministic (canonical solves); s_{-1} picks the identity basis
    element of the degree-0 generator.
    """
    if max_degree is None:
        max_degree = R.max_degree
    p = R.p
    e0 = np.zeros(R.free_dim(0), dtype=np.uint8)
    e0[0] = 1
    s_m1 = FpMatrix.from_dense(e0.reshape(1, -1), p=p)
    out = [s_m1]
    prev = s_m1  # s_{n-1}
    prev_d = R.augmentation  # d_n : F_n -> F_{n-1} (augmentation at n=0)
    for n in range(0, max_degree):
        solver = RowSolver(R.diff[n + 1])
        # rhs = id - s_{n-1} d_n, solved row by row
        rhs = FpMatrix.identity(R.free_dim(n), p=p) - (prev_d @ prev)
        sol = solver.solve(rhs)
        if sol is None:
            raise NoSolution(f"homotopy solve failed at degree {n}")
        out.append(sol)
        prev = sol
        prev_d = R.diff[n + 1]
    return out
