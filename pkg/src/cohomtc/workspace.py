"""Memoized orchestration: one resolution per group, one diagonal
approximation per base group, cohomology groups cached by
(group, module, degree).

Product groups (direct products) get tensor resolutions of their factor
resolutions; their cup products route through the factor diagonals, so
no linear algebra ever runs over the product of a product.
"""

from __future__ import annotations

from .cohomology import (
    CoefficientPairing,
    CohomologyClass,
    CohomologyGroup,
    cup_base,
    cup_product_group,
    diag_block_table,
    restrict_cochain,
)
from .gmodule import (
    GModule,
    augmentation_ideal,
    group_square,
    hom_dual,
    ses_tower,
    tensor_power,
    trivial_module,
)
from .groups import FiniteGroup, GroupHomomorphism, diagonal_embedding
from .resolution import (
    lift_chain_map,
    resolution_of_trivial,
    tensor_resolution,
)

BASE_DEGREE = 8
PRODUCT_DEGREE = 7
LARGE_PRODUCT_DEGREE = 4
LARGE_PRODUCT_ORDER = 1024
# groups above this order recompute faster than their payloads deserialize
CACHE_MAX_ORDER = 64


class Workspace:
    def __init__(self, p=2, cache_dir=None):
        self.p = p
        self.cache_dir = cache_dir
        self._res = {}
        self._cohom = {}
        self._diag = {}
        self._diag_blocks = {}
        self._modules = {}
        self._towers = {}
        self._lifts = {}
        if cache_dir:
            from .cache import ResolutionCache

            self._res_cache = ResolutionCache(cache_dir)
        else:
            self._res_cache = None

    # -- resolutions ----------------------------------------------------

    def degree_for(self, G: FiniteGroup) -> int:
        if G.factors is None:
            return BASE_DEGREE
        if G.order >= LARGE_PRODUCT_ORDER:
            return LARGE_PRODUCT_DEGREE
        return PRODUCT_DEGREE

    def res(self, G: FiniteGroup):
        R = self._res.get(G.key)
        if R is None:
            cacheable = self._res_cache is not None and G.order <= CACHE_MAX_ORDER
            if cacheable:
                R = self._res_cache.load(G, self.p, self.degree_for(G))
            if R is None:
                if G.factors is None:
                    R = resolution_of_trivial(G, BASE_DEGREE, p=self.p)
                else:
                    A, B = G.factors
                    R = tensor_resolution(self.res(A), self.res(B), G,
                                          self.degree_for(G))
                if cacheable:
                    self._res_cache.store(R)
            self._res[G.key] = R
        return R

    def square(self, G: FiniteGroup) -> FiniteGroup:
        return group_square(G)

    # -- diagonal approximations (base groups only) ---------------------

    def diag(self, G: FiniteGroup):
        cm = self._diag.get(G.key)
        if cm is None:
            if G.factors is not None:
                raise ValueError("diagonal approximations are built on base groups")
            G2 = self.square(G)
            RT = self.res(G2)
            cm = lift_chain_map(diagonal_embedding(G, G2), self.res(G), RT)
            self._diag[G.key] = cm
        return cm

    def diag_blocks(self, G: FiniteGroup):
        t = self._diag_blocks.get(G.key)
        if t is None:
            t = diag_block_table(self.diag(G), self.res(self.square(G)))
            self._diag_blocks[G.key] = t
        return t

    # -- coefficient modules --------------------------------------------

    def trivial(self, G: FiniteGroup, dim=1) -> GModule:
        key = (G.key, f"triv{dim}")
        if key not in self._modules:
            self._modules[key] = trivial_module(G, dim, p=self.p)
        return self._modules[key]

    def aug_ideal(self, G: FiniteGroup) -> GModule:
        """I_G as a module over G x G."""
        key = (G.key, "I")
        if key not in self._modules:
            self._modules[key] = augmentation_ideal(G, p=self.p)
        return self._modules[key]

    def ipow(self, G: FiniteGroup, n: int) -> GModule:
        key = (G.key, f"Ipow{n}")
        if key not in self._modules:
            self._modules[key] = tensor_power(self.aug_ideal(G), n)
        return self._modules[key]

    def hd_ipow(self, G: FiniteGroup, n: int) -> GModule:
        key = (G.key, f"hdIpow{n}")
        if key not in self._modules:
            self._modules[key] = hom_dual(self.ipow(G, n))
        return self._modules[key]

    def tower(self, G: FiniteGroup, s: int):
        key = (G.key, s)
        if key not in self._towers:
            self._towers[key] = ses_tower(G, s, p=self.p)
        return self._towers[key]

    # -- cohomology -----------------------------------------------------

    def cohomology(self, G: FiniteGroup, M: GModule, r: int) -> CohomologyGroup:
        key = (G.key, M.key, r)
        H = self._cohom.get(key)
        if H is None:
            H = CohomologyGroup(self.res(G), M, r)
            self._cohom[key] = H
        return H

    def betti(self, G: FiniteGroup, max_r: int):
        triv = self.trivial(G)
        return [self.cohomology(G, triv, r).dim for r in range(max_r + 1)]

    # -- cup products ---------------------------------------------------

    def cup_cochain(self, G, r1, coch1, r2, coch2, pairing: CoefficientPairing):
        if G.factors is None:
            return cup_base(self.res(G), self.diag_blocks(G), r1, coch1, r2, coch2, pairing)
        A, B = G.factors
        return cup_product_group(
            self.res(G), self.diag_blocks(A), self.diag_blocks(B),
            A.order, B.order, r1, coch1, r2, coch2, pairing,
        )

    def cup(self, z1: CohomologyClass, z2: CohomologyClass,
            pairing: CoefficientPairing) -> CohomologyClass:
        G = z1.parent.group
        if z2.parent.group.key != G.key:
            raise ValueError("cup requires classes over one group")
        r1, r2 = z1.parent.degree, z2.parent.degree
        coch = self.cup_cochain(G, r1, z1.rep, r2, z2.rep, pairing)
        return self.cohomology(G, pairing.L, r1 + r2).class_of(coch)

    def cup_trivial(self, z1: CohomologyClass, z2: CohomologyClass) -> CohomologyClass:
        from .cohomology import trivial_pairing

        G = z1.parent.group
        return self.cup(z1, z2, trivial_pairing(self.trivial(G)))

    # -- restriction ----------------------------------------------------

    def lift(self, alpha: GroupHomomorphism, name: str):
        key = (alpha.source.key, alpha.target.key, name)
        cm = self._lifts.get(key)
        if cm is None:
            cm = lift_chain_map(alpha, self.res(alpha.source), self.res(alpha.target))
            self._lifts[key] = cm
        return cm

    def restrict_class(self, alpha: GroupHomomorphism, name: str,
                       z: CohomologyClass, src_module: GModule) -> CohomologyClass:
        """alpha^* z, with src_module the coefficient module over the
        source that restrict(alpha, M) is identified with (same dim)."""
        if src_module.dim != z.parent.module.dim:
            raise ValueError("coefficient dimensions differ")
        cm = self.lift(alpha, name)
        r = z.parent.degree
        coch = restrict_cochain(cm, z.parent.module, r, z.rep)
        return self.cohomology(alpha.source, src_module, r).class_of(coch)
