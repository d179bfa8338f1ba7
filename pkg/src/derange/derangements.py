"""Derangement counting and certificates for two-equal-orbit actions.

A derangement here always means: fixes no point of the designated point
set.  Everything that feeds a verdict is exact integer or rational
arithmetic; random search only ever produces witnesses, never absence
claims.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._kernels import fix_any_count
from .group import GroupError, PermutationGroup, ResourceCapExceeded
from .perm import Perm
from .structure import (
    ConjugacyClassTable,
    conjugacy_classes,
    is_prime,
    p_part,
    sylow_subgroup,
)


class Inconclusive(RuntimeError):
    """Bounded search ended without an answer; NOT a nonexistence claim."""


class CertificateError(RuntimeError):
    """A certified conclusion failed to hold; the input or code is wrong."""


def is_derangement(g: Perm, omega) -> bool:
    pts = np.asarray(sorted(omega))
    return not bool((g.images[pts] == pts).any())


def _omega_array(group: PermutationGroup, omega) -> np.ndarray:
    pts = np.asarray(sorted(int(x) for x in omega))
    if len(pts) == 0:
        raise GroupError("point set must be nonempty")
    if pts[0] < 0 or pts[-1] >= group.degree:
        raise GroupError("point set out of range")
    return pts


def count_nonderangements(
    group: PermutationGroup,
    omega,
    strategy: str = "auto",
    table: ConjugacyClassTable | None = None,
    class_cap: int = 10**6,
    enum_cap: int = 10**7,
) -> int:
    """|{g : g fixes a point of omega}| exactly.

    The class strategy sums class sizes over classes whose representative
    fixes a point: omega is required to be G-invariant, which makes
    "fixes a point of omega" a class function.
    """
    pts = _omega_array(group, omega)
    if strategy == "auto":
        if _is_invariant(group, pts):
            try:
                return count_nonderangements(group, pts, "classes", table, class_cap, enum_cap)
            except ResourceCapExceeded:
                pass
        return count_nonderangements(group, pts, "enumeration", table, class_cap, enum_cap)
    if strategy == "classes":
        _require_invariant(group, pts)
        if table is None:
            table = conjugacy_classes(group, cap=class_cap)
        return sum(
            c.size for c in table if bool((c.rep.images[pts] == pts).any())
        )
    if strategy == "enumeration":
        if group.order > enum_cap:
            raise ResourceCapExceeded(f"order {group.order} over enumeration cap {enum_cap}")
        total = 0
        for block in group.element_blocks():
            total += fix_any_count(block, pts)
        return total
    raise GroupError(f"unknown strategy {strategy!r}")


def _is_invariant(group: PermutationGroup, pts: np.ndarray) -> bool:
    ok = set(pts.tolist())
    return all(g(p) in ok for g in group.generators for p in pts.tolist())


def _require_invariant(group: PermutationGroup, pts: np.ndarray) -> None:
    if not _is_invariant(group, pts):
        raise GroupError("point set is not group-invariant")


@dataclass(frozen=True)
class PndrValue:
    """Exact proportion of non-derangements: numerator = |union of point
    stabilizers|, denominator = |G|, kept unreduced."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if not (0 <= self.numerator <= self.denominator):
            raise GroupError("proportion outside [0, 1]")

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)


def pndr(
    group: PermutationGroup,
    omega,
    strategy: str = "auto",
    table: ConjugacyClassTable | None = None,
    class_cap: int = 10**6,
    enum_cap: int = 10**7,
) -> PndrValue:
    count = count_nonderangements(group, omega, strategy, table, class_cap, enum_cap)
    return PndrValue(count, group.order)


def pndr_pair_bound(a1: PndrValue, a2: PndrValue) -> Fraction:
    """Exact upper bound for the non-derangement proportion of any group
    inducing these two actions on its two orbits."""
    return a1.fraction + a2.fraction


def find_derangement_detailed(
    group: PermutationGroup,
    omega,
    seed: int = 0,
    budget: int = 10**4,
    class_cap: int = 10**6,
    enum_cap: int = 10**7,
) -> tuple[Perm | None, str]:
    """(witness or None, method); None is an exhaustively verified absence.

    Seeded random sampling first; on failure falls back to scanning class
    representatives (each rep is itself a witness candidate because fixed
    points are constant on classes), then to full enumeration.  Raises
    Inconclusive when every exhaustive route is over its cap.
    """
    pts = _omega_array(group, omega)
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        g = group.random_element(rng)
        if not bool((g.images[pts] == pts).any()):
            return g, "random"
    try:
        _require_invariant(group, pts)
        table = conjugacy_classes(group, cap=class_cap)
    except (ResourceCapExceeded, GroupError):
        table = None
    if table is not None:
        for c in table:
            if not bool((c.rep.images[pts] == pts).any()):
                return c.rep, "classes"
        return None, "classes"
    if group.order > enum_cap:
        raise Inconclusive(
            f"budget {budget} exhausted and order {group.order} over every cap"
        )
    for block in group.element_blocks():
        hits = ~(block[:, pts] == pts[None, :]).any(axis=1)
        if hits.any():
            return Perm(block[np.nonzero(hits)[0][0]], validate=False), "enumeration"
    return None, "enumeration"


def find_derangement(
    group: PermutationGroup, omega, seed: int = 0, budget: int = 10**4, **caps
) -> Perm | None:
    witness, _ = find_derangement_detailed(group, omega, seed, budget, **caps)
    return witness


# ---------------------------------------------------------------------------
# two-orbit actions and Sylow certificates

@dataclass(frozen=True)
class TwoOrbitAction:
    group: PermutationGroup
    omega1: tuple[int, ...]
    omega2: tuple[int, ...]
    n: int

    @staticmethod
    def of(group: PermutationGroup) -> "TwoOrbitAction":
        orbits = group.orbits()
        if len(orbits) != 2:
            raise GroupError(f"need exactly two orbits, found {len(orbits)}")
        o1, o2 = (tuple(int(x) for x in o) for o in orbits)
        if len(o1) != len(o2):
            raise GroupError(f"orbit lengths differ: {len(o1)} vs {len(o2)}")
        if len(o1) + len(o2) != group.degree:
            raise GroupError("orbits do not partition the point set")
        return TwoOrbitAction(group, o1, o2, len(o1))

    @property
    def omega(self) -> tuple[int, ...]:
        return self.omega1 + self.omega2


@dataclass(frozen=True)
class SylowCertificate:
    prime: int
    b: int
    k: int
    d: int
    orbit_lengths: tuple[int, ...]
    elementary_abelian: bool | None
    stabilizer_count: int | None
    derangement_witness: Perm | None
    verdict: str


def _is_elementary_abelian(group: PermutationGroup, p: int) -> bool:
    gens = group.generators
    if any(g.order != p for g in gens):
        return False
    return all(
        (a * b) == (b * a) for i, a in enumerate(gens) for b in gens[i + 1:]
    )


def sylow_certificate(
    action: TwoOrbitAction, p: int, sylow: PermutationGroup | None = None
) -> SylowCertificate:
    """Certify the Sylow-orbit facts for a two-equal-orbit action.

    With n = b*p^k (p not dividing b) and b < p: the Sylow p-subgroup P
    must have exactly 2b orbits, all of length p^k.  When k = 1, P must
    additionally be elementary abelian with at most 2b distinct point
    stabilizers, and if it has no derangement then p^d = |P| obeys
    2 <= d <= #stabilizers - p + 1; with b < (p+1)/2 a derangement in P
    is mandatory.  Violations raise CertificateError.
    """
    if not is_prime(p):
        raise GroupError(f"{p} is not prime")
    n = action.n
    if n % p:
        raise GroupError(f"{p} does not divide the orbit length {n}")
    pk = p_part(n, p)
    b = n // pk
    k = 0
    while p**k < pk:
        k += 1
    P = sylow if sylow is not None else sylow_subgroup(action.group, p)
    if P.degree != action.group.degree or not P.is_subgroup_of(action.group):
        raise GroupError("provided Sylow subgroup does not sit inside the group")
    d = 0
    while p**d < P.order:
        d += 1
    if p**d != P.order:
        raise GroupError("provided subgroup order is not a power of p")
    lengths = tuple(sorted(len(o) for o in P.orbits()))

    if b >= p:
        return SylowCertificate(p, b, k, d, lengths, None, None, None,
                                "hypothesis-not-applicable")

    if sorted(lengths) != [pk] * (2 * b):
        raise CertificateError(
            f"expected {2*b} orbits of length {pk}, found {lengths}"
        )
    if k > 1:
        return SylowCertificate(p, b, k, d, lengths, None, None, None,
                                "equal-orbits")

    elementary = _is_elementary_abelian(P, p)
    if not elementary:
        raise CertificateError("Sylow subgroup is not elementary abelian")
    stab_count = _distinct_stabilizer_count(P, p)
    if stab_count > 2 * b:
        raise CertificateError(
            f"{stab_count} distinct point stabilizers exceeds 2b = {2*b}"
        )
    witness = _sylow_derangement(P, action)
    if witness is not None:
        return SylowCertificate(p, b, k, d, lengths, True, stab_count, witness,
                                "elementary-abelian-derangement")
    if b < (p + 1) / 2:
        raise CertificateError(
            "no derangement in the Sylow subgroup although b < (p+1)/2"
        )
    if not (2 <= d <= stab_count - p + 1 <= 2 * b - p + 1):
        raise CertificateError(
            f"bounds 2 <= d <= s-p+1 <= 2b-p+1 fail: d={d}, s={stab_count}, b={b}"
        )
    return SylowCertificate(p, b, k, d, lengths, True, stab_count, None,
                            "elementary-abelian")


def _distinct_stabilizer_count(P: PermutationGroup, p: int) -> int:
    """Distinct point stabilizers of an elementary abelian P whose orbits
    all have length p.

    P being abelian, points of one orbit share their stabilizer, and the
    stabilizer is the kernel of the shift homomorphism P -> C_p on that
    orbit; kernels coincide exactly when the generator-shift vectors are
    proportional, so projective normalization counts them.
    """
    gens = P.generators
    kernels = set()
    for orbit in P.orbits():
        pts = [int(x) for x in orbit]
        if len(pts) == 1:
            continue  # full fix: stabilizer is P itself, shift vector zero
        x0 = pts[0]
        mover = next(g for g in gens if g(x0) != x0)
        label = {x0: 0}
        x = x0
        for i in range(1, len(pts)):
            x = mover(x)
            label[x] = i
        vec = tuple(label[g(x0)] for g in gens)
        first = next(v for v in vec if v)
        scale = pow(first, p - 2, p)
        kernels.add(tuple((scale * v) % p for v in vec))
    full_fix = sum(1 for orbit in P.orbits() if len(orbit) == 1)
    return len(kernels) + (1 if full_fix else 0)


def _sylow_derangement(P: PermutationGroup, action: TwoOrbitAction) -> Perm | None:
    """Lexicographically least derangement of the whole domain inside P."""
    pts = np.asarray(action.omega1 + action.omega2)
    best = None
    for block in P.element_blocks():
        hits = ~(block[:, pts] == pts[None, :]).any(axis=1)
        if hits.any():
            rows = block[hits]
            cand = min(rows, key=lambda r: r.tobytes())
            if best is None or cand.tobytes() < best.tobytes():
                best = cand.copy()
    return Perm(best, validate=False) if best is not None else None


# ---------------------------------------------------------------------------
# case routing for n = product of at most two primes

def _factorize(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def classify_case(n: int) -> str:
    """Which argument covers orbit length n.

    prime-power: previously known; equal-primes: n = p^2, elementary
    abelian Sylow argument; q-not-dividing-p-minus-1: the two-stabilizer
    Sylow argument; direct-verification: n = 6, settled by the desk
    computation; q-at-most-half-p-minus-1: elementary abelian Sylow
    argument again; not-covered: everything else.
    """
    if n < 2:
        raise GroupError(f"need n >= 2, got {n}")
    factors = _factorize(n)
    if len(factors) == 1:
        p, e = factors[0]
        return "equal-primes" if e == 2 else "prime-power"
    if len(factors) == 2 and all(e == 1 for _, e in factors):
        q, p = sorted(f[0] for f in factors)
        if (p - 1) % q:
            return "q-not-dividing-p-minus-1"
        if q == p - 1:
            return "direct-verification"
        return "q-at-most-half-p-minus-1"
    return "not-covered"
