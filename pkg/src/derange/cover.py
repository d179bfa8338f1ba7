"""Hyperplane covers of GF(q)^d.

Counts the fully-nonzero vectors on a hyperplane (exact closed form
plus a dumb exhaustive oracle), checks the two cover conditions (union
is everything, intersection is zero), searches for minimum covers and
builds the coordinate-plus-pencil cover of size d+q-1 that meets the
lower bound.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import cover_all_scan, good_count_scan
from .gf import FieldError, FieldSpec, factor_prime_power
from .group import ResourceCapExceeded

EXHAUSTION_CAP = 10**7
SEARCH_BUDGET = 10**6


def good_count_formula(q: int, d: int, k: int) -> int:
    """Fully-nonzero solutions of a.v = 0 when a has k nonzero coords."""
    factor_prime_power(q)  # raises unless q is a prime power
    if not (1 <= k <= d):
        raise FieldError(f"need 1 <= k <= d, got k={k}, d={d}")
    num = (q - 1) ** (d - k + 1) * ((q - 1) ** (k - 1) - (-1) ** (k - 1))
    if num % q:
        raise ArithmeticError("count formula produced a non-integer; bug")
    return num // q


def d_sequences(q: int, j: int) -> tuple[int, int]:
    """(D0(j), D1(j)): good solutions of sum a_i x_i = m for m=0 / m!=0."""
    if j < 1:
        raise FieldError(f"need j >= 1, got {j}")
    num1 = (q - 1) ** j - (-1) ** j
    if num1 % q:
        raise ArithmeticError("D1 closed form produced a non-integer; bug")
    d1 = num1 // q
    num0 = (q - 1) ** (j - 1) - (-1) ** (j - 1)
    d0 = (q - 1) * (num0 // q)
    if num0 % q:
        raise ArithmeticError("D0 closed form produced a non-integer; bug")
    return d0, d1


@dataclass(frozen=True)
class Hyperplane:
    """U = {v : normal . v = 0}; k counts the nonzero coords of normal."""

    normal: tuple[int, ...]
    k: int

    @staticmethod
    def make(normal) -> "Hyperplane":
        tup = tuple(int(x) for x in normal)
        k = sum(1 for x in tup if x)
        if k == 0:
            raise FieldError("hyperplane normal must be nonzero")
        return Hyperplane(tup, k)


def canonical_normal(field: FieldSpec, normal) -> tuple[int, ...]:
    """Scale so the first nonzero coordinate is 1."""
    vec = [int(x) for x in normal]
    for x in vec:
        if x:
            s = int(field.inv[x])
            return tuple(int(field.mul[s, y]) for y in vec)
    raise FieldError("zero vector has no canonical normal")


def all_canonical_normals(field: FieldSpec, d: int) -> list[tuple[int, ...]]:
    """One normal per hyperplane, first nonzero coord 1, lex sorted."""
    out = []
    for vec in field.vector_space(d):
        for x in vec:
            if x:
                if x == 1:
                    out.append(tuple(int(v) for v in vec))
                break
    return out


@dataclass
class CoverInstance:
    field: FieldSpec
    d: int
    hyperplanes: list[Hyperplane]
    covers_all: bool | None = None
    trivial_intersection: bool | None = None

    def normal_rows(self) -> np.ndarray:
        return np.array([h.normal for h in self.hyperplanes], dtype=np.int64)


def make_cover(q: int, d: int, normals) -> CoverInstance:
    field = FieldSpec(q)
    seen = {}
    for n in normals:
        cn = canonical_normal(field, n)
        if len(cn) != d:
            raise FieldError(f"normal length {len(cn)} does not match d={d}")
        seen.setdefault(cn, Hyperplane.make(cn))
    planes = [seen[k] for k in sorted(seen)]
    return CoverInstance(field, d, planes)


def rank_over_field(field: FieldSpec, rows: np.ndarray) -> int:
    """Row rank by Gaussian elimination with table arithmetic."""
    m = [list(map(int, r)) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for col in range(cols):
        pivot = None
        for r in range(rank, len(m)):
            if m[r][col]:
                pivot = r
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = int(field.inv[m[rank][col]])
        m[rank] = [int(field.mul[inv, x]) for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [
                    int(field.add[x, field.neg[field.mul[f, y]]])
                    for x, y in zip(m[r], m[rank])
                ]
        rank += 1
        if rank == len(m):
            break
    return rank


def check_cover(
    cover: CoverInstance, cap: int = EXHAUSTION_CAP, backend: str | None = None
) -> tuple[bool, bool, bool]:
    """(covers_all, trivial_intersection, bound_ok); sets the instance flags.

    bound_ok is vacuously true unless both conditions hold, in which case
    the size bound 2 <= d <= |planes| - q + 1 must follow.
    """
    q, d = cover.field.q, cover.d
    if q**d > cap:
        raise ResourceCapExceeded(f"q^d = {q**d} exceeds exhaustion cap {cap}")
    rows = cover.normal_rows()
    covers_all = cover_all_scan(cover.field, d, rows, backend=backend)
    trivial = rank_over_field(cover.field, rows) == d if len(rows) else d == 0
    cover.covers_all = covers_all
    cover.trivial_intersection = trivial
    bound_ok = True
    if covers_all and trivial:
        bound_ok = 2 <= d <= len(cover.hyperplanes) - q + 1
    return covers_all, trivial, bound_ok


def good_count_bruteforce(
    a: Hyperplane, field: FieldSpec, d: int | None = None,
    cap: int = EXHAUSTION_CAP, backend: str | None = None,
) -> int:
    """Exact count by scanning all q^d vectors; oracle for the formula."""
    if d is None:
        d = len(a.normal)
    if len(a.normal) != d:
        raise FieldError("normal length does not match dimension")
    if field.q**d > cap:
        raise ResourceCapExceeded(f"q^d = {field.q**d} exceeds exhaustion cap {cap}")
    return good_count_scan(field, d, np.array(a.normal, dtype=np.int64), backend=backend)


def min_cover_search(
    q: int, d: int, budget: int = SEARCH_BUDGET, cap: int = EXHAUSTION_CAP
) -> tuple[int, CoverInstance]:
    """Smallest set meeting both cover conditions, first witness in
    (size, lex) order.  Subsets below rank d are pruned before scanning.
    """
    from itertools import combinations

    field = FieldSpec(q)
    normals = all_canonical_normals(field, d)
    examined = 0
    for size in range(1, len(normals) + 1):
        for combo in combinations(normals, size):
            examined += 1
            if examined > budget:
                raise ResourceCapExceeded(f"cover search exceeded budget {budget}")
            rows = np.array(combo, dtype=np.int64)
            if rank_over_field(field, rows) != d:
                continue
            cover = CoverInstance(field, d, [Hyperplane.make(n) for n in combo])
            covers_all, trivial, bound_ok = check_cover(cover, cap=cap)
            if covers_all and trivial:
                if not bound_ok:
                    raise ArithmeticError("cover found below the size bound; bug")
                return size, cover
    raise ResourceCapExceeded("no cover found; dimension or field too small")


def tight_cover_construct(q: int, d: int) -> CoverInstance:
    """Coordinate hyperplanes plus the pencil through x1=x2=0.

    The pencil contributes the q+1 hyperplanes containing that
    codimension-2 space; two of them are coordinate hyperplanes already,
    so the whole set has size d+q-1.
    """
    if d < 2:
        raise FieldError(f"need d >= 2, got {d}")
    field = FieldSpec(q)
    normals = []
    for i in range(d):
        e = [0] * d
        e[i] = 1
        normals.append(e)
    for t in range(1, q):
        v = [0] * d
        v[0] = 1
        v[1] = t
        normals.append(v)
    cover = make_cover(q, d, normals)
    if len(cover.hyperplanes) != d + q - 1:
        raise ArithmeticError("tight construction has the wrong size; bug")
    return cover
