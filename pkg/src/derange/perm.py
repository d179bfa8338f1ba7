"""Permutations of {0, ..., m-1} stored as image arrays.

The convention throughout is the right action x^g = images[x], and
composition reads left to right: (f * g) maps x to g(f(x)).  Degrees up
to 64 are the supported envelope; images are uint8 so byte-level
comparisons double as lexicographic order on image tuples.
"""

from __future__ import annotations

from math import lcm

import numpy as np

MAX_DEGREE = 250


class PermError(ValueError):
    pass


class Perm:
    """An immutable permutation; ``images[i]`` is the image of point i."""

    __slots__ = ("images", "key")

    def __init__(self, images, validate: bool = True):
        arr = np.asarray(images, dtype=np.uint8)
        if validate:
            if arr.ndim != 1 or arr.size == 0 or arr.size > MAX_DEGREE:
                raise PermError(f"bad image array of shape {arr.shape}")
            seen = np.zeros(arr.size, dtype=bool)
            ok = True
            src = np.asarray(images)
            if src.ndim != 1 or np.any(src < 0) or np.any(src >= arr.size):
                ok = False
            else:
                seen[arr] = True
                ok = bool(seen.all())
            if not ok:
                raise PermError(f"images are not a bijection on 0..{arr.size - 1}")
        arr.setflags(write=False)
        object.__setattr__(self, "images", arr)
        object.__setattr__(self, "key", arr.tobytes())

    # construction helpers

    @staticmethod
    def identity(degree: int) -> "Perm":
        return Perm(np.arange(degree, dtype=np.uint8), validate=False)

    @staticmethod
    def from_cycles(degree: int, *cycles) -> "Perm":
        """Build a permutation from disjoint cycles, e.g. (0,1,2)."""
        images = np.arange(degree, dtype=np.uint8)
        seen = set()
        for cyc in cycles:
            for pt in cyc:
                if pt in seen:
                    raise PermError(f"point {pt} repeated across cycles")
                seen.add(pt)
            for a, b in zip(cyc, cyc[1:] + type(cyc)((cyc[0],))):
                if not 0 <= a < degree:
                    raise PermError(f"point {a} out of range for degree {degree}")
                images[a] = b
        return Perm(images)

    # arithmetic

    @property
    def degree(self) -> int:
        return self.images.size

    def __mul__(self, other: "Perm") -> "Perm":
        # apply self first, then other
        if other.images.size != self.images.size:
            raise PermError("degree mismatch in composition")
        return Perm(other.images[self.images], validate=False)

    def inverse(self) -> "Perm":
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(self.images.size, dtype=np.uint8)
        return Perm(inv, validate=False)

    def __pow__(self, k: int) -> "Perm":
        if k < 0:
            return self.inverse() ** (-k)
        result = Perm.identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self, g: "Perm") -> "Perm":
        """Return g^-1 * self * g."""
        return g.inverse() * self * g

    def __call__(self, point: int) -> int:
        return int(self.images[point])

    # structure

    def is_identity(self) -> bool:
        return bool((self.images == np.arange(self.images.size)).all())

    def fixed_points(self, points=None) -> np.ndarray:
        dom = np.arange(self.degree) if points is None else np.asarray(sorted(points))
        return dom[self.images[dom] == dom]

    def moved_points(self) -> np.ndarray:
        dom = np.arange(self.degree)
        return dom[self.images != dom]

    def cycles(self, singletons: bool = False) -> list[tuple[int, ...]]:
        """Disjoint cycles, each rotated to start at its least point."""
        out = []
        seen = np.zeros(self.degree, dtype=bool)
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            nxt = int(self.images[start])
            while nxt != start:
                cyc.append(nxt)
                seen[nxt] = True
                nxt = int(self.images[nxt])
            if len(cyc) > 1 or singletons:
                out.append(tuple(cyc))
        return out

    @property
    def cycle_type(self) -> tuple[int, ...]:
        """Sorted cycle lengths, fixed points included."""
        return tuple(sorted(len(c) for c in self.cycles(singletons=True)))

    @property
    def order(self) -> int:
        return lcm(*(len(c) for c in self.cycles(singletons=True)))

    # hashing and ordering (lexicographic on image tuples)

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, Perm) and self.key == other.key

    def __lt__(self, other: "Perm"):
        return self.key < other.key

    def __repr__(self):
        cycs = self.cycles()
        if not cycs:
            return f"Perm.identity({self.degree})"
        body = "".join("(" + " ".join(map(str, c)) + ")" for c in cycs)
        return f"Perm[{body}]"

    def to_list(self) -> list[int]:
        return [int(x) for x in self.images]


def compose(f: Perm, g: Perm) -> Perm:
    """The permutation mapping x to g(f(x))."""
    return f * g


# ---------------------------------------------------------------------------
# batched helpers on (m, degree) uint8 row arrays

def rows_of(perms) -> np.ndarray:
    return np.array([p.images for p in perms], dtype=np.uint8)


def perms_of(rows) -> list[Perm]:
    return [Perm(r, validate=False) for r in rows]


def _img(g) -> np.ndarray:
    return g.images if isinstance(g, Perm) else np.asarray(g, dtype=np.uint8)


def rows_then(rows: np.ndarray, g) -> np.ndarray:
    """Row-wise products row * g (apply the row first, then g)."""
    return _img(g)[rows]


def then_rows(g, rows: np.ndarray) -> np.ndarray:
    """Row-wise products g * row (apply g first, then the row)."""
    return rows[:, _img(g)]


def invert_rows(rows: np.ndarray) -> np.ndarray:
    m, n = rows.shape
    inv = np.empty_like(rows)
    ar = np.arange(n, dtype=np.uint8)
    np.put_along_axis(inv, rows.astype(np.intp), ar[None, :], axis=1)
    return inv


def conjugate_rows(rows: np.ndarray, g, g_inv=None) -> np.ndarray:
    """Row-wise conjugates g^-1 * row * g."""
    g = _img(g)
    if g_inv is None:
        g_inv = np.empty_like(g)
        g_inv[g] = np.arange(g.size, dtype=np.uint8)
    else:
        g_inv = _img(g_inv)
    return g[rows[:, g_inv]]


def rows_fix_any(rows: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Boolean mask of rows having at least one fixed point among points."""
    pts = np.asarray(points)
    return (rows[:, pts] == pts[None, :]).any(axis=1)
