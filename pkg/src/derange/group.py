"""Permutation groups with a deterministic stabilizer-chain backbone.

Orders and memberships come from an explicitly built base and strong
generating set (Schreier-Sims with full Schreier-generator checking, no
randomization).  Base points are chosen in increasing point order, so
every derived quantity (element enumeration order, transversal layout)
is reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .perm import Perm, invert_rows, perms_of, rows_of


class GroupError(ValueError):
    pass


class ResourceCapExceeded(RuntimeError):
    """A computation would exceed a configured cap; result withheld."""


class BSGS:
    """Base, strong generators and explicit transversals for one group.

    Level i acts with every strong generator fixing base[:i]; after an
    insertion the affected levels are re-verified until every Schreier
    generator sifts to the identity, which certifies the order formula.
    """

    def __init__(self, degree: int, generators=()):
        self.degree = degree
        self.base: list[int] = []
        self.strong_gens: list[Perm] = []
        self.transversals: list[dict[int, Perm]] = []
        for g in generators:
            self.extend(g)

    # g reduced through levels[start:]; returns (residue, stuck level)
    def sift(self, g: Perm, start: int = 0) -> tuple[Perm, int]:
        for i in range(start, len(self.base)):
            p = g(self.base[i])
            u = self.transversals[i].get(p)
            if u is None:
                return g, i
            g = g * u.inverse()
        return g, len(self.base)

    def __contains__(self, g: Perm) -> bool:
        residue, i = self.sift(g)
        return i == len(self.base) and residue.is_identity()

    def extend(self, g: Perm) -> bool:
        """Adjoin one element; returns True if the group grew."""
        residue, j = self.sift(g)
        if j == len(self.base) and residue.is_identity():
            return False
        self._insert(residue, j)
        self._complete(j)
        return True

    def _insert(self, residue: Perm, j: int) -> None:
        if j == len(self.base):
            self.base.append(int(residue.moved_points()[0]))
            self.transversals.append({})
        self.strong_gens.append(residue)
        for i in range(j + 1):
            self._rebuild(i)

    def _level_gens(self, i: int) -> list[Perm]:
        prefix = self.base[:i]
        return [g for g in self.strong_gens if all(g(b) == b for b in prefix)]

    def _rebuild(self, i: int) -> None:
        gens = self._level_gens(i)
        base = self.base[i]
        tr = {base: Perm.identity(self.degree)}
        frontier = [base]
        while frontier:
            nxt = []
            for p in frontier:
                u = tr[p]
                for s in gens:
                    q = s(p)
                    if q not in tr:
                        tr[q] = u * s
                        nxt.append(q)
            frontier = nxt
        self.transversals[i] = tr

    def _verify_level(self, i: int):
        tr = self.transversals[i]
        gens = self._level_gens(i)
        for p in sorted(tr):
            u = tr[p]
            for s in gens:
                w = u * s * tr[s(p)].inverse()
                if w.is_identity():
                    continue
                residue, j = self.sift(w, i + 1)
                if not (j == len(self.base) and residue.is_identity()):
                    return residue, j
        return None

    def _complete(self, start: int) -> None:
        i = min(start, len(self.base) - 1)
        while i >= 0:
            bad = self._verify_level(i)
            if bad is None:
                i -= 1
                continue
            residue, j = bad
            self._insert(residue, j)
            i = j

    @property
    def order(self) -> int:
        n = 1
        for tr in self.transversals:
            n *= len(tr)
        return n

    def transversal_rows(self) -> list[np.ndarray]:
        """Per level, coset representative rows sorted by orbit point."""
        return [
            rows_of([tr[p] for p in sorted(tr)])
            for tr in self.transversals
        ]


class PermutationGroup:
    """A finitely generated subgroup of Sym(degree)."""

    def __init__(self, degree: int, generators, name: str | None = None):
        self.degree = int(degree)
        gens = []
        seen = set()
        for g in generators:
            if not isinstance(g, Perm):
                g = Perm(g)
            if g.degree != self.degree:
                raise GroupError(
                    f"generator degree {g.degree} does not match group degree {self.degree}"
                )
            if g.is_identity() or g.key in seen:
                continue
            seen.add(g.key)
            gens.append(g)
        self.generators: list[Perm] = gens
        self.name = name
        self._bsgs: BSGS | None = None
        self._orbits: list[np.ndarray] | None = None

    @staticmethod
    def from_cycles(degree: int, cycle_gens, name: str | None = None) -> "PermutationGroup":
        return PermutationGroup(
            degree, [Perm.from_cycles(degree, *cycs) for cycs in cycle_gens], name=name
        )

    @staticmethod
    def symmetric(degree: int, name: str | None = None) -> "PermutationGroup":
        if degree == 1:
            return PermutationGroup(1, [], name=name)
        gens = [Perm.from_cycles(degree, tuple(range(degree)))]
        if degree > 2:
            gens.append(Perm.from_cycles(degree, (0, 1)))
        return PermutationGroup(degree, gens, name=name)

    def __repr__(self):
        label = self.name or f"degree {self.degree} with {len(self.generators)} generators"
        return f"PermutationGroup<{label}>"

    # --- stabilizer chain ------------------------------------------------

    @property
    def bsgs(self) -> BSGS:
        if self._bsgs is None:
            self._bsgs = BSGS(self.degree, self.generators)
        return self._bsgs

    @property
    def order(self) -> int:
        return self.bsgs.order

    def __contains__(self, g: Perm) -> bool:
        if g.degree != self.degree:
            return False
        return g in self.bsgs

    def is_subgroup_of(self, other: "PermutationGroup") -> bool:
        return all(g in other for g in self.generators)

    def same_group(self, other: "PermutationGroup") -> bool:
        return self.order == other.order and self.is_subgroup_of(other)

    # --- orbits and actions ----------------------------------------------

    def orbits(self) -> list[np.ndarray]:
        """Orbits on 0..degree-1, sorted by least point, each sorted."""
        if self._orbits is None:
            parent = np.arange(self.degree)

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for g in self.generators:
                for x in range(self.degree):
                    a, b = find(x), find(g(x))
                    if a != b:
                        parent[max(a, b)] = min(a, b)
            roots = {}
            for x in range(self.degree):
                roots.setdefault(find(x), []).append(x)
            self._orbits = [np.array(roots[r]) for r in sorted(roots)]
        return self._orbits

    def orbit(self, point: int) -> np.ndarray:
        for orb in self.orbits():
            if point in orb:
                return orb
        raise GroupError(f"point {point} out of range")

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1 and self.degree >= 1

    def point_stabilizer(self, point: int) -> "PermutationGroup":
        """Stabilizer of a point, generated by Schreier generators."""
        transversal = {point: Perm.identity(self.degree)}
        frontier = [point]
        while frontier:
            nxt = []
            for p in frontier:
                u = transversal[p]
                for s in self.generators:
                    q = s(p)
                    if q not in transversal:
                        transversal[q] = u * s
                        nxt.append(q)
            frontier = nxt
        gens = []
        seen = set()
        for p in sorted(transversal):
            u = transversal[p]
            for s in self.generators:
                sg = u * s * transversal[s(p)].inverse()
                if not sg.is_identity() and sg.key not in seen:
                    seen.add(sg.key)
                    gens.append(sg)
        return PermutationGroup(self.degree, gens)

    def induced_action(self, points) -> tuple["PermutationGroup", dict[int, int]]:
        """Faithful image of the action on an invariant point set.

        Returns the image group on len(points) relabeled points and the
        point map old -> new.  Raises if the set is not invariant.
        """
        pts = sorted(int(p) for p in points)
        relabel = {p: i for i, p in enumerate(pts)}
        gens = []
        for g in self.generators:
            images = [g(p) for p in pts]
            if any(q not in relabel for q in images):
                raise GroupError("point set is not invariant under the group")
            gens.append(Perm([relabel[q] for q in images]))
        image = PermutationGroup(len(pts), gens)
        return image, relabel

    def project(self, g: Perm, relabel: dict[int, int]) -> Perm:
        """Image of one element under an induced_action relabeling."""
        pts = sorted(relabel, key=relabel.get)
        return Perm([relabel[g(p)] for p in pts], validate=False)

    # --- element streaming -------------------------------------------------

    def element_blocks(self, block_rows: int = 1 << 15):
        """Yield all elements as uint8 row blocks, in a fixed order.

        The order is the odometer over stabilizer-chain transversals with
        the top level varying slowest.  Concatenated blocks enumerate the
        group exactly once.
        """
        tr = self.bsgs.transversal_rows()
        if not tr:
            yield np.arange(self.degree, dtype=np.uint8)[None, :]
            return

        # an element is u_{k-1} * ... * u_1 * u_0 (deepest level applied
        # first); enumeration runs the level-0 index slowest
        sizes = [t.shape[0] for t in tr]
        split = len(tr)
        tail = 1
        while split > 0 and tail * sizes[split - 1] <= block_rows:
            tail *= sizes[split - 1]
            split -= 1

        suffix = tr[-1]
        for j in range(len(tr) - 2, split - 1, -1):
            t = tr[j]
            # prod[b, a] = suffix[a] * t[b]; flattening keeps shallower
            # levels slower
            prod = t[:, suffix]
            suffix = prod.reshape(-1, self.degree)

        def rec(level: int, acc: np.ndarray | None):
            if level == split:
                yield suffix if acc is None else acc[suffix]
                return
            for row in tr[level]:
                nxt = row if acc is None else acc[row]
                yield from rec(level + 1, nxt)

        yield from rec(0, None)

    def elements(self):
        """Iterate every element as a Perm, deterministic order."""
        for block in self.element_blocks():
            for row in block:
                yield Perm(row, validate=False)

    def element_rows(self, cap: int | None = None) -> np.ndarray:
        """All elements as one row array; raises ResourceCapExceeded over cap."""
        if cap is not None and self.order > cap:
            raise ResourceCapExceeded(
                f"group order {self.order} exceeds enumeration cap {cap}"
            )
        return np.concatenate(list(self.element_blocks()), axis=0)

    def random_element(self, rng: np.random.Generator) -> Perm:
        """Uniformly random element via transversal products."""
        tr = self.bsgs.transversal_rows()
        if not tr:
            return Perm.identity(self.degree)
        row = None
        # deepest transversal applies first; each pick is uniform per level
        for t in reversed(tr):
            pick = t[int(rng.integers(t.shape[0]))]
            row = pick if row is None else pick[row]
        return Perm(row, validate=False)

    # --- block systems -----------------------------------------------------

    def minimal_block_systems(self, orbit=None) -> list["BlockSystem"]:
        """All minimal nontrivial block systems on one orbit.

        Defaults to the first orbit; empty list iff that action is
        primitive (or the orbit is too short to split).
        """
        orb = np.asarray(sorted(orbit)) if orbit is not None else self.orbit(0)
        image, relabel = self.induced_action(orb)
        m = len(orb)
        if m < 2:
            return []
        gens = [g.images for g in image.generators]
        systems = {}
        for beta in range(1, m):
            block_of = _pair_congruence(m, gens, 0, beta)
            nblocks = int(block_of.max()) + 1
            if nblocks <= 1:
                continue
            systems.setdefault(block_of.tobytes(), block_of)
        keep = []
        items = sorted(systems.values(), key=lambda b: b.tobytes())
        for cand in items:
            minimal = True
            for other in items:
                if other is cand:
                    continue
                if _refines(other, cand) and not np.array_equal(other, cand):
                    minimal = False
                    break
            if minimal:
                keep.append(cand)
        out = []
        for block_of in keep:
            full = np.full(self.degree, -1, dtype=np.int16)
            full[orb] = block_of
            nblocks = int(block_of.max()) + 1
            out.append(BlockSystem(self.degree, full, nblocks, m // nblocks))
        return out

    def all_block_systems(self, orbit=None) -> list["BlockSystem"]:
        """Every nontrivial block system on the orbit, minimal ones first.

        Obtained by lifting systems of the quotient action on blocks.
        """
        orb = np.asarray(sorted(orbit)) if orbit is not None else self.orbit(0)
        found = {}
        for system in self.minimal_block_systems(orb):
            found[system.block_of.tobytes()] = system
            quotient_group, lift = self._block_quotient(system, orb)
            for sub in quotient_group.all_block_systems():
                lifted = np.full(self.degree, -1, dtype=np.int16)
                for p in orb:
                    lifted[p] = sub.block_of[system.block_of[p]]
                nb = sub.num_blocks
                bs = BlockSystem(self.degree, lifted, nb, len(orb) // nb)
                found.setdefault(lifted.tobytes(), bs)
        return sorted(found.values(), key=lambda s: (s.block_size, s.block_of.tobytes()))

    def _block_quotient(self, system: "BlockSystem", orb) -> tuple["PermutationGroup", None]:
        reps = {}
        for p in orb:
            reps.setdefault(int(system.block_of[p]), int(p))
        gens = []
        for g in self.generators:
            gens.append(Perm([system.block_of[g(reps[b])] for b in range(system.num_blocks)]))
        return PermutationGroup(system.num_blocks, gens), None


@dataclass
class BlockSystem:
    """A G-invariant partition of one orbit into equal-size blocks.

    block_of maps a point to its block id, -1 off the orbit.
    """

    degree: int
    block_of: np.ndarray
    num_blocks: int
    block_size: int

    def __post_init__(self):
        on = self.block_of >= 0
        if self.num_blocks * self.block_size != int(on.sum()):
            raise GroupError("block count times block size must cover the orbit")
        counts = np.bincount(self.block_of[on], minlength=self.num_blocks)
        if not (counts == self.block_size).all():
            raise GroupError("blocks are not of equal size")

    def blocks(self) -> list[tuple[int, ...]]:
        out = [[] for _ in range(self.num_blocks)]
        for p in range(self.degree):
            b = int(self.block_of[p])
            if b >= 0:
                out[b].append(p)
        return [tuple(b) for b in out]

    def check_invariant(self, group: PermutationGroup) -> bool:
        for g in group.generators:
            for block in self.blocks():
                ids = {int(self.block_of[g(p)]) for p in block}
                if len(ids) != 1 or -1 in ids:
                    return False
        return True


def _pair_congruence(m: int, gen_rows, alpha: int, beta: int) -> np.ndarray:
    """Finest G-congruence on 0..m-1 identifying alpha with beta.

    Union-find with a merge queue; gen_rows act on the relabeled orbit.
    """
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = [(alpha, beta)]
    while queue:
        a, b = queue.pop()
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if ra > rb:
            ra, rb = rb, ra
        parent[rb] = ra
        for g in gen_rows:
            queue.append((int(g[ra]), int(g[rb])))
    labels = {}
    block_of = np.empty(m, dtype=np.int16)
    for x in range(m):
        r = find(x)
        if r not in labels:
            labels[r] = len(labels)
        block_of[x] = labels[r]
    return block_of


def _refines(finer: np.ndarray, coarser: np.ndarray) -> bool:
    """True if every block of `finer` lies inside a block of `coarser`."""
    seen = {}
    for f, c in zip(finer.tolist(), coarser.tolist()):
        if f in seen:
            if seen[f] != c:
                return False
        else:
            seen[f] = c
    return True


def closure_rows(degree: int, gen_rows: np.ndarray, cap: int | None = None) -> np.ndarray:
    """All elements of <gens> as rows, by breadth-first word closure.

    Independent of the stabilizer chain; used as a cross-check oracle and
    for small hull computations.  Rows come out sorted lexicographically.
    """
    ident = np.arange(degree, dtype=np.uint8)
    if len(gen_rows) == 0:
        return ident[None, :]
    gens = np.asarray(gen_rows, dtype=np.uint8)
    seen = {ident.tobytes()}
    rows = [ident]
    frontier = ident[None, :]
    while frontier.size:
        new = []
        for g in gens:
            prod = g[frontier]  # frontier rows, then g
            for row in prod:
                k = row.tobytes()
                if k not in seen:
                    seen.add(k)
                    new.append(row)
        if cap is not None and len(rows) + len(new) > cap:
            raise ResourceCapExceeded(f"closure exceeds cap {cap}")
        if not new:
            break
        frontier = np.array(new, dtype=np.uint8)
        rows.extend(new)
    out = np.array(rows, dtype=np.uint8)
    return out[np.lexsort(out.T[::-1])]
