"""Conjugacy classes, normal subgroups and Sylow subgroups.

Class tables drive most counting here: fixed-point behaviour on an
invariant point set is constant on classes, so class reps plus sizes
replace full enumeration wherever the group is too big to list.
"""

from dataclasses import dataclass

import numpy as np

from .group import BSGS, GroupError, PermutationGroup, ResourceCapExceeded
from .perm import Perm, conjugate_rows


def p_part(n: int, p: int) -> int:
    """Largest power of p dividing n."""
    out = 1
    while n % p == 0:
        n //= p
        out *= p
    return out


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def class_orbit_rows(group: PermutationGroup, rep: Perm, cap: int | None = None) -> np.ndarray:
    """The full conjugacy class of rep as lex-sorted uint8 rows.

    Breadth-first orbit under conjugation by the generators; on a finite
    set that closes the orbit under the whole group.
    """
    seen = {rep.key}
    frontier = rep.images[None, :]
    blocks = [frontier]
    pairs = [(g, g.inverse()) for g in group.generators]
    while frontier.size:
        new = []
        for g, g_inv in pairs:
            for row in conjugate_rows(frontier, g, g_inv):
                k = row.tobytes()
                if k not in seen:
                    seen.add(k)
                    new.append(row)
        if cap is not None and len(seen) > cap:
            raise ResourceCapExceeded(f"conjugacy class exceeds cap {cap}")
        if not new:
            break
        frontier = np.array(new, dtype=np.uint8)
        blocks.append(frontier)
    out = np.concatenate(blocks, axis=0)
    return out[np.lexsort(out.T[::-1])]


@dataclass(frozen=True)
class ConjugacyClass:
    rep: Perm  # lexicographically least element of the class
    size: int


class ConjugacyClassTable:
    """All conjugacy classes of one group, sorted by (size, rep)."""

    def __init__(self, group: PermutationGroup, classes: list[ConjugacyClass]):
        self.group = group
        self.classes = sorted(classes, key=lambda c: (c.size, c.rep.key))
        if sum(c.size for c in self.classes) != group.order:
            raise GroupError("class sizes do not sum to the group order")

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    @property
    def sizes(self) -> list[int]:
        return [c.size for c in self.classes]

    @property
    def reps(self) -> list[Perm]:
        return [c.rep for c in self.classes]

    def centralizer_order(self, i: int) -> int:
        # orbit-stabilizer for the conjugation action
        return self.group.order // self.classes[i].size

    def class_rows(self, i: int) -> np.ndarray:
        return class_orbit_rows(self.group, self.classes[i].rep)


def conjugacy_classes(
    group: PermutationGroup,
    strategy: str = "auto",
    cap: int = 10**6,
    seed: int = 0,
) -> ConjugacyClassTable:
    """Conjugacy class table.

    "enumeration" partitions the listed elements by conjugation orbits
    and needs order <= cap.  "random" samples uniform elements, closes
    each discovered class exactly by orbit search, and stops when the
    class equation accounts for the whole order; it never lists the
    group but must still hold every class element at once.
    """
    if strategy == "auto":
        strategy = "enumeration" if group.order <= cap else "random"
    if strategy == "enumeration":
        return _classes_by_enumeration(group, cap)
    if strategy == "random":
        return _classes_by_random_search(group, cap, seed)
    raise GroupError(f"unknown strategy {strategy!r}")


def _classes_by_enumeration(group: PermutationGroup, cap: int) -> ConjugacyClassTable:
    rows = group.element_rows(cap=cap)
    index = {row.tobytes(): i for i, row in enumerate(rows)}
    order_keys = sorted(index)  # lex order makes reps canonical
    assigned = np.zeros(len(rows), dtype=bool)
    pairs = [(g, g.inverse()) for g in group.generators]
    classes = []
    for key in order_keys:
        start = index[key]
        if assigned[start]:
            continue
        members = [start]
        assigned[start] = True
        frontier = np.array([start])
        while frontier.size:
            new = []
            for g, g_inv in pairs:
                conj = conjugate_rows(rows[frontier], g, g_inv)
                for row in conj:
                    j = index[row.tobytes()]
                    if not assigned[j]:
                        assigned[j] = True
                        new.append(j)
            frontier = np.array(new, dtype=np.intp)
            members.extend(new)
        classes.append(ConjugacyClass(Perm(rows[start], validate=False), len(members)))
    return ConjugacyClassTable(group, classes)


def _classes_by_random_search(group: PermutationGroup, cap: int, seed: int) -> ConjugacyClassTable:
    rng = np.random.default_rng(seed)
    found: list[tuple[bytes, int]] = []
    keys_seen: set[bytes] = set()
    covered = 0
    stored = 0
    order = group.order

    def absorb(el: Perm):
        nonlocal covered, stored
        if el.key in keys_seen:
            return
        rows = class_orbit_rows(group, el)
        stored += len(rows)
        if stored > cap:
            raise ResourceCapExceeded(f"stored class elements exceed cap {cap}")
        for r in rows:
            keys_seen.add(r.tobytes())
        found.append((rows[0].tobytes(), len(rows)))
        covered += len(rows)

    absorb(Perm.identity(group.degree))
    for g in group.generators:
        absorb(g)
    while covered < order:
        absorb(group.random_element(rng))
    classes = [
        ConjugacyClass(Perm(np.frombuffer(k, dtype=np.uint8).copy(), validate=False), n)
        for k, n in found
    ]
    return ConjugacyClassTable(group, classes)


# ---------------------------------------------------------------------------
# normal subgroups

def normal_closure(group: PermutationGroup, seeds) -> PermutationGroup:
    """Smallest normal subgroup of group containing the seed elements."""
    b = BSGS(group.degree)
    queue = list(seeds)
    while queue:
        h = queue.pop()
        if b.extend(h):
            queue.extend(h.conjugate(g) for g in group.generators)
    return _wrap(group.degree, b)


def normal_subgroups(group: PermutationGroup, class_cap: int = 10**6) -> list[PermutationGroup]:
    """Every normal subgroup, smallest order first.

    A normal subgroup is a union of classes, hence the join of the
    normal closures of the classes it contains; closing the single-class
    closures under joins therefore finds all of them.
    """
    table = conjugacy_classes(group, cap=class_cap)
    atoms = []
    for cls in table:
        if cls.rep.is_identity():
            continue
        atoms.append(normal_closure(group, [cls.rep]))
    lattice: dict[int, list[PermutationGroup]] = {}

    def add(h: PermutationGroup) -> bool:
        bucket = lattice.setdefault(h.order, [])
        for other in bucket:
            if h.same_group(other):
                return False
        bucket.append(h)
        return True

    trivial = PermutationGroup(group.degree, [], name="1")
    add(trivial)
    for a in atoms:
        add(a)
    grew = True
    while grew:
        grew = False
        flat = [h for bucket in lattice.values() for h in bucket]
        for i in range(len(flat)):
            for j in range(i + 1, len(flat)):
                join = normal_closure(group, flat[i].generators + flat[j].generators)
                if add(join):
                    grew = True
    out = [h for bucket in lattice.values() for h in bucket]
    if not any(h.order == group.order for h in out):
        out.append(PermutationGroup(group.degree, group.generators, name=group.name))
    out.sort(key=lambda h: (h.order, [g.key for g in h.generators]))
    return out


# ---------------------------------------------------------------------------
# Sylow subgroups

def _p_power_rows_mask(rows: np.ndarray, p: int) -> np.ndarray:
    """Mask of rows whose order is a power of p (identity included)."""
    n = rows.shape[1]
    e = 1
    while p**e <= n:
        e += 1
    # g is a p-element iff g^(p^e) is the identity
    acc = rows
    for _ in range(e):
        out = acc
        for _ in range(p - 1):
            out = np.take_along_axis(acc, out.astype(np.intp), axis=1)
        acc = out
    return (acc == np.arange(n, dtype=rows.dtype)[None, :]).all(axis=1)


def p_element_rows(group: PermutationGroup, p: int, cap: int = 10**7) -> np.ndarray:
    """All nonidentity elements of p-power order, in enumeration order."""
    if group.order > cap:
        raise ResourceCapExceeded(f"order {group.order} over enumeration cap {cap}")
    keep = []
    ident = np.arange(group.degree, dtype=np.uint8)
    for block in group.element_blocks():
        mask = _p_power_rows_mask(block, p)
        mask &= (block != ident[None, :]).any(axis=1)
        if mask.any():
            keep.append(block[mask])
    if not keep:
        return np.empty((0, group.degree), dtype=np.uint8)
    return np.concatenate(keep, axis=0)


def sylow_subgroup(group: PermutationGroup, p: int, cap: int = 10**7) -> PermutationGroup:
    """One Sylow p-subgroup, grown by greedy normalizer extensions.

    While |P| is short of the full p-part there is a p-element outside P
    that normalizes it with p-th power inside, so each round extends the
    order by exactly a factor p and the loop cannot stall.
    """
    if not is_prime(p):
        raise GroupError(f"{p} is not prime")
    target = p_part(group.order, p)
    b = BSGS(group.degree)
    if target == 1:
        return _wrap(group.degree, b, name=f"Sylow_{p}")
    pool = p_element_rows(group, p, cap=cap)
    # big orders first so the chain grows in few steps; stable within ties
    ords = np.array([Perm(r, validate=False).order for r in pool])
    pool = pool[np.argsort(-ords, kind="stable")]
    while b.order < target:
        inside = {row.tobytes() for block in _wrap(group.degree, b).element_blocks() for row in block}
        progressed = False
        for row in pool:
            if row.tobytes() in inside:
                continue
            g = Perm(row, validate=False)
            if (g ** p).key not in inside:
                continue
            if any(s.conjugate(g) not in b for s in b.strong_gens):
                continue
            before = b.order
            b.extend(g)
            if b.order != before * p:
                raise GroupError("extension step did not multiply the order by p")
            progressed = True
            break
        if not progressed:
            raise GroupError("no valid Sylow extension found; input was inconsistent")
    return _wrap(group.degree, b, name=f"Sylow_{p}")


def _wrap(degree: int, b: BSGS, name: str | None = None) -> PermutationGroup:
    g = PermutationGroup(degree, list(b.strong_gens), name=name)
    g._bsgs = b
    return g
