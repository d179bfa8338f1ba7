"""Subdirect products of two permutation groups.

Subgroups of G1 x G2 projecting onto both factors are parametrized by
Goursat triples (N1, N2, phi): Ni normal in Gi, phi an isomorphism
G1/N1 -> G2/N2; the subgroup is {(g1, g2) : phi(g1 N1) = g2 N2}.

Quotients are modeled by their regular action on cosets.  That action
can live on up to QUOTIENT_CAP points, beyond the supported permutation
degree, so it is kept as a plain index table: element <-> the point its
coset occupies, product of x and y = table[y, x].
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import row_orders
from .derangements import TwoOrbitAction
from .group import GroupError, PermutationGroup, ResourceCapExceeded
from .perm import Perm, rows_then
from .structure import normal_subgroups

QUOTIENT_CAP = 2000
ISO_CAP = 10**5


def _lexmin_key(rows: np.ndarray) -> bytes:
    return rows[np.lexsort(rows.T[::-1])][0].tobytes()


@dataclass(eq=False)
class QuotientModel:
    """Regular coset model of parent/kernel.

    table[p] is the permutation of coset points induced by right
    multiplication with the element at point p, so the table doubles as
    the multiplication table: point of x*y equals table[point(y),
    point(x)].  reps[p] is a parent-group representative of the coset at
    point p, reps[0] the identity.
    """

    parent: PermutationGroup
    kernel: PermutationGroup
    table: np.ndarray = field(repr=False)
    reps: list[Perm] = field(repr=False)
    kernel_rows: np.ndarray = field(repr=False)
    _enc: dict = field(repr=False, default_factory=dict)
    _orders: np.ndarray | None = field(repr=False, default=None)
    _gens: list[int] | None = field(repr=False, default=None)
    _derangements: np.ndarray | None = field(repr=False, default=None)

    @property
    def order(self) -> int:
        return len(self.reps)

    def coset_of(self, g: Perm) -> int:
        """Point of the coset containing g, via the lex-least coset row."""
        if g.degree != self.parent.degree:
            raise GroupError("degree mismatch in coset lookup")
        key = _lexmin_key(rows_then(self.kernel_rows, g))
        try:
            return self._enc[key]
        except KeyError:
            raise GroupError("element is not in the parent group") from None

    def inverse_points(self) -> np.ndarray:
        return np.argmax(self.table == 0, axis=1)

    def element_orders(self) -> np.ndarray:
        if self._orders is None:
            self._orders = row_orders(self.table)
        return self._orders

    def generating_points(self) -> list[int]:
        """Small deterministic generating sequence: greedy by descending
        element order, ties broken by coset-representative lex order."""
        if self._gens is not None:
            return self._gens
        m = self.order
        gens: list[int] = []
        if m > 1:
            orders = self.element_orders()
            pref = sorted(range(m), key=lambda p: (-int(orders[p]), self.reps[p].key))
            size = 1
            for p in pref:
                if size == m:
                    break
                trial = gens + [p]
                got = _closure_points(self.table, trial).size
                if got > size:
                    gens, size = trial, got
            assert size == m
        self._gens = gens
        return gens

    def derangement_bitmap(self) -> np.ndarray:
        """bitmap[p] = coset p contains an element fixing no parent point."""
        if self._derangements is None:
            n = self.parent.degree
            idx = np.arange(n, dtype=np.uint8)
            out = np.zeros(self.order, dtype=bool)
            for p, r in enumerate(self.reps):
                rows = rows_then(self.kernel_rows, r)
                out[p] = bool((~(rows == idx[None, :]).any(axis=1)).any())
            self._derangements = out
        return self._derangements

    def coset_derangement(self, p: int) -> Perm | None:
        """Lex-least derangement of the parent domain in coset p."""
        n = self.parent.degree
        idx = np.arange(n, dtype=np.uint8)
        rows = rows_then(self.kernel_rows, self.reps[p])
        hit = ~(rows == idx[None, :]).any(axis=1)
        if not hit.any():
            return None
        cand = rows[hit]
        return Perm(cand[np.lexsort(cand.T[::-1])][0], validate=False)


def quotient(G: PermutationGroup, N: PermutationGroup, cap: int = QUOTIENT_CAP) -> QuotientModel:
    """Regular action of G on the cosets of a normal subgroup N."""
    if N.degree != G.degree:
        raise GroupError("kernel degree differs from parent degree")
    if not N.is_subgroup_of(G):
        raise GroupError("kernel is not a subgroup of the parent")
    for n in N.generators:
        for g in G.generators:
            if n.conjugate(g) not in N:
                raise GroupError("kernel is not normal in the parent")
    m = G.order // N.order
    if m > cap:
        raise ResourceCapExceeded(f"quotient order {m} over cap {cap}")

    kernel_rows = N.element_rows()
    reps = [Perm.identity(G.degree)]
    enc = {_lexmin_key(kernel_rows): 0}
    disc: list[tuple[int, int]] = [(0, -1)]
    gen_rows = [np.empty(m, dtype=np.int64) for _ in G.generators]
    p = 0
    while p < len(reps):
        for si, s in enumerate(G.generators):
            c = reps[p] * s
            key = _lexmin_key(rows_then(kernel_rows, c))
            q = enc.get(key)
            if q is None:
                q = len(reps)
                if q >= m:
                    raise GroupError("coset enumeration exceeded the expected count")
                enc[key] = q
                reps.append(c)
                disc.append((p, si))
            gen_rows[si][p] = q
        p += 1
    if len(reps) != m:
        raise GroupError(f"coset enumeration found {len(reps)} cosets, expected {m}")

    # right multiplication by reps[q] = (right mult by reps[p]) then by s
    # where q was discovered as the coset of reps[p]*s
    rows = np.empty((m, m), dtype=np.int64)
    rows[0] = np.arange(m)
    for q in range(1, m):
        p, si = disc[q]
        rows[q] = gen_rows[si][rows[p]]
    table = rows.astype(np.int16 if m <= 32767 else np.int32)
    model = QuotientModel(G, N, table, reps, kernel_rows, enc)
    assert model.order * N.order == G.order
    return model


def _closure_points(table: np.ndarray, gens: list[int]) -> np.ndarray:
    """Points of the subgroup generated by the given quotient points."""
    seen = np.zeros(len(table), dtype=bool)
    seen[0] = True
    frontier = [0]
    while frontier:
        cur = np.asarray(frontier)
        frontier = []
        for g in gens:
            prod = np.unique(table[g, cur])
            fresh = prod[~seen[prod]]
            if fresh.size:
                seen[fresh] = True
                frontier.extend(fresh.tolist())
    return np.nonzero(seen)[0]


def _order_multiset(model: QuotientModel) -> bytes:
    return np.sort(model.element_orders()).tobytes()


def _center_size(model: QuotientModel) -> int:
    m = model.order
    ok = np.ones(m, dtype=bool)
    pts = np.arange(m)
    for g in model.generating_points():
        ok &= model.table[g, pts] == model.table[pts, np.full(m, g)]
    return int(ok.sum())


class _IsoSearch:
    """Generator-image backtracking between two regular quotient models.

    Partial maps are grown to the subgroup generated by their domain,
    checking the multiplication law and injectivity along the way, so a
    completed map is an isomorphism with no further verification.
    """

    def __init__(self, q1: QuotientModel, q2: QuotientModel, cap: int = ISO_CAP):
        self.t1, self.t2, self.cap = q1.table, q2.table, cap
        self.m = q1.order
        self.gens = q1.generating_points()
        ord1, ord2 = q1.element_orders(), q2.element_orders()
        # candidate images per slot: matching element order, lex order of
        # coset representatives for deterministic output
        self.cands = []
        for g in self.gens:
            k = int(ord1[g])
            pool = [p for p in range(self.m) if int(ord2[p]) == k]
            pool.sort(key=lambda p: q2.reps[p].key)
            self.cands.append(pool)
        self.found: list[np.ndarray] = []

    def run(self) -> list[np.ndarray]:
        fwd = np.full(self.m, -1, dtype=np.int64)
        bwd = np.full(self.m, -1, dtype=np.int64)
        fwd[0] = 0
        bwd[0] = 0
        self._extend(0, fwd, bwd)
        return self.found

    def _extend(self, depth: int, fwd: np.ndarray, bwd: np.ndarray):
        if depth == len(self.gens):
            if len(self.found) >= self.cap:
                raise ResourceCapExceeded(f"isomorphism count over cap {self.cap}")
            self.found.append(fwd.copy())
            return
        g = self.gens[depth]
        for c in self.cands[depth]:
            if bwd[c] >= 0:
                continue
            f2, b2 = fwd.copy(), bwd.copy()
            f2[g], b2[c] = c, g
            if self._close(f2, b2, [g]):
                self._extend(depth + 1, f2, b2)

    def _close(self, fwd: np.ndarray, bwd: np.ndarray, new_points: list[int]) -> bool:
        frontier = new_points
        while frontier:
            cur = np.asarray(sorted(set(frontier)), dtype=np.int64)
            known = np.nonzero(fwd >= 0)[0]
            a = np.concatenate([
                self.t1[cur[None, :], known[:, None]].ravel(),
                self.t1[known[None, :], cur[:, None]].ravel(),
            ]).astype(np.int64)
            b = np.concatenate([
                self.t2[fwd[cur][None, :], fwd[known][:, None]].ravel(),
                self.t2[fwd[known][None, :], fwd[cur][:, None]].ravel(),
            ]).astype(np.int64)
            have = fwd[a]
            if ((have >= 0) & (have != b)).any():
                return False
            mask = have < 0
            if not mask.any():
                break
            na, nb = a[mask], b[mask]
            order = np.argsort(na, kind="stable")
            na, nb = na[order], nb[order]
            keep = np.concatenate([[True], na[1:] != na[:-1]])
            ka, kb = na[keep], nb[keep]
            if np.unique(kb).size != kb.size or (bwd[kb] >= 0).any():
                return False
            fwd[ka] = kb
            bwd[kb] = ka
            if (fwd[na] != nb).any():
                return False
            frontier = ka.tolist()
        return True


def quotient_isomorphisms(
    q1: QuotientModel,
    q2: QuotientModel,
    dedup: bool = True,
    cap: int = ISO_CAP,
) -> list[np.ndarray]:
    """All isomorphisms q1 -> q2 as point maps (arrays of length |q1|).

    With dedup, one representative per class modulo inner automorphisms
    of q2; those classes match the conjugacy classes of the resulting
    subdirect products inside parent1 x parent2.
    """
    if q1.order != q2.order:
        return []
    if q1.order == 1:
        return [np.zeros(1, dtype=np.int64)]
    if _order_multiset(q1) != _order_multiset(q2):
        return []
    if _center_size(q1) != _center_size(q2):
        return []
    isos = _IsoSearch(q1, q2, cap).run()
    if not dedup or len(isos) < 2:
        return isos
    gens = q1.generating_points()
    inv2 = q2.inverse_points()
    t2 = q2.table
    ys = np.arange(q2.order)
    keep, seen = [], set()
    for iso in isos:
        imgs = iso[gens]
        # y^-1 * x * y for every y (rows), every generator image x (cols)
        conj = t2[ys[:, None], t2[imgs[None, :], inv2[ys][:, None]]]
        key = conj[np.lexsort(conj.T[::-1])][0].tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(iso)
    return keep


@dataclass(frozen=True, eq=False)
class SubdirectDescriptor:
    """One subdirect product of q1.parent x q2.parent: the pairs whose
    cosets match under point_map (an isomorphism of the quotients)."""

    q1: QuotientModel
    q2: QuotientModel
    point_map: np.ndarray

    @property
    def quotient_order(self) -> int:
        return self.q1.order

    @property
    def subgroup_order(self) -> int:
        return self.q1.parent.order * self.q2.kernel.order


def goursat_enumerate(
    G1: PermutationGroup,
    G2: PermutationGroup,
    dedup: bool = True,
    quotient_cap: int = QUOTIENT_CAP,
    iso_cap: int = ISO_CAP,
    normals1: list[PermutationGroup] | None = None,
    normals2: list[PermutationGroup] | None = None,
) -> list[SubdirectDescriptor]:
    """Every subdirect product of G1 x G2, one descriptor each (up to
    conjugacy in G1 x G2 when dedup is set).

    Precomputed normal subgroup lists can be passed to share lattice
    work across many calls on the same groups.
    """
    n1s = normals1 if normals1 is not None else normal_subgroups(G1)
    n2s = normals2 if normals2 is not None else normal_subgroups(G2)
    quotients1: dict[int, QuotientModel] = {}
    quotients2: dict[int, QuotientModel] = {}
    out = []
    for i, N1 in enumerate(n1s):
        idx1 = G1.order // N1.order
        for j, N2 in enumerate(n2s):
            if idx1 != G2.order // N2.order:
                continue
            if idx1 > quotient_cap:
                raise ResourceCapExceeded(
                    f"common quotient order {idx1} over cap {quotient_cap}"
                )
            if i not in quotients1:
                quotients1[i] = quotient(G1, N1, quotient_cap)
            if j not in quotients2:
                quotients2[j] = quotient(G2, N2, quotient_cap)
            for iso in quotient_isomorphisms(quotients1[i], quotients2[j], dedup, iso_cap):
                out.append(SubdirectDescriptor(quotients1[i], quotients2[j], iso))
    return out


def _combine(g1: Perm, g2: Perm) -> Perm:
    return Perm(np.concatenate([g1.images, g2.images + g1.degree]), validate=False)


def materialize_group(desc: SubdirectDescriptor) -> PermutationGroup:
    """The subdirect product as a permutation group on the disjoint
    union of the two parent domains (second domain shifted)."""
    q1, q2 = desc.q1, desc.q2
    id1 = Perm.identity(q1.parent.degree)
    id2 = Perm.identity(q2.parent.degree)
    gens = [_combine(id1, id2)]
    for p in q1.generating_points():
        gens.append(_combine(q1.reps[p], q2.reps[desc.point_map[p]]))
    gens.extend(_combine(n, id2) for n in q1.kernel.generators)
    gens.extend(_combine(id1, n) for n in q2.kernel.generators)
    G = PermutationGroup(q1.parent.degree + q2.parent.degree, gens)
    assert G.order == desc.subgroup_order
    return G


def materialize(desc: SubdirectDescriptor) -> TwoOrbitAction:
    """The subdirect product as a two-equal-orbit action."""
    return TwoOrbitAction.of(materialize_group(desc))


def subdirect_derangement(desc: SubdirectDescriptor) -> Perm | None:
    """A derangement of the subdirect product on the union of the two
    domains, or None when exhaustive coset analysis rules one out.

    An element (g1, g2) deranges the union iff g1 deranges domain 1 and
    g2 deranges domain 2, so existence reduces to finding a coset of N1
    holding a derangement whose partner coset of N2 holds one too.
    """
    bm1 = desc.q1.derangement_bitmap()
    bm2 = desc.q2.derangement_bitmap()
    hits = np.nonzero(bm1 & bm2[desc.point_map])[0]
    if hits.size == 0:
        return None
    p = int(hits[0])
    g1 = desc.q1.coset_derangement(p)
    g2 = desc.q2.coset_derangement(int(desc.point_map[p]))
    assert g1 is not None and g2 is not None
    return _combine(g1, g2)
