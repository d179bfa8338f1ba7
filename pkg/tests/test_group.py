import numpy as np
import pytest

from derange import (
    BlockSystem,
    GroupError,
    Perm,
    PermutationGroup,
    ResourceCapExceeded,
)
from derange.group import BSGS, closure_rows


def cyc(degree, *cycles):
    return Perm.from_cycles(degree, *cycles)


def brute_elements(group):
    """Word closure over the generators, no stabilizer chain involved."""
    rows = closure_rows(group.degree, [np.array(g.images) for g in group.generators])
    return {r.tobytes() for r in rows}


STOCK = {
    "C4": (4, [[(0, 1, 2, 3)]], 4),
    "V4": (4, [[(0, 1), (2, 3)], [(0, 2), (1, 3)]], 4),
    "D4": (4, [[(0, 1, 2, 3)], [(0, 2)]], 8),
    "A4": (4, [[(0, 1, 2)], [(1, 2, 3)]], 12),
    "S4": (4, [[(0, 1, 2, 3)], [(0, 1)]], 24),
    "C5": (5, [[(0, 1, 2, 3, 4)]], 5),
    "F20": (5, [[(0, 1, 2, 3, 4)], [(1, 2, 4, 3)]], 20),
    "A5": (5, [[(0, 1, 2)], [(0, 1, 2, 3, 4)]], 60),
    "S5": (5, [[(0, 1, 2, 3, 4)], [(0, 1)]], 120),
    "S3xS3": (6, [[(0, 1, 2)], [(0, 1)], [(3, 4, 5)], [(3, 4)]], 36),
    "PSL(2,7)": (8, [[(0, 1, 2, 3, 4, 5, 6)], [(0, 7), (1, 6), (2, 3), (4, 5)]], 168),
}


def stock(name):
    degree, cycgens, _ = STOCK[name]
    return PermutationGroup.from_cycles(degree, cycgens, name=name)


@pytest.mark.parametrize("name", sorted(STOCK))
def test_order_matches_word_closure(name):
    g = stock(name)
    want = STOCK[name][2]
    assert g.order == want
    assert len(brute_elements(g)) == want


def test_order_big_groups():
    assert PermutationGroup.symmetric(10).order == 3628800
    a10 = PermutationGroup.from_cycles(10, [[(0, 1, 2)], [tuple(range(1, 10))]])
    assert a10.order == 1814400
    # wreath-shaped product on 10 points
    w = PermutationGroup.from_cycles(
        10,
        [[(0, 1, 2, 3, 4)], [(0, 1)], [(5, 6, 7, 8, 9)], [(5, 6)],
         [(0, 5), (1, 6), (2, 7), (3, 8), (4, 9)]],
    )
    assert w.order == 28800


def test_membership_agrees_with_closure():
    rng = np.random.default_rng(5)
    for name in ("V4", "D4", "A4", "F20", "A5"):
        g = stock(name)
        have = brute_elements(g)
        hits = 0
        for _ in range(300):
            cand = Perm(rng.permutation(g.degree))
            inside = cand.key in have
            assert (cand in g) == inside
            hits += inside
        # every element of the group itself must pass
        for el in g.elements():
            assert el in g


def test_elements_enumerates_exactly_once():
    for name in ("C4", "D4", "A4", "S4", "F20", "A5", "PSL(2,7)"):
        g = stock(name)
        els = list(g.elements())
        assert len(els) == g.order
        assert len(set(els)) == g.order
        assert {e.key for e in els} == brute_elements(g)


def test_element_blocks_respects_block_size_and_order():
    g = stock("S5")
    sizes = []
    first = None
    total = 0
    for block in g.element_blocks(block_rows=7):
        assert block.shape[1] == 5
        if first is None:
            first = block.copy()
        sizes.append(block.shape[0])
        total += block.shape[0]
    assert total == 120
    # same fixed order regardless of block size
    again = next(iter(g.element_blocks(block_rows=10**6)))
    assert np.array_equal(again[: first.shape[0]], first)


def test_element_rows_cap():
    g = stock("S5")
    with pytest.raises(ResourceCapExceeded):
        g.element_rows(cap=100)
    rows = g.element_rows(cap=120)
    assert rows.shape == (120, 5)


def test_trivial_group():
    t = PermutationGroup(3, [])
    assert t.order == 1
    assert list(t.elements()) == [Perm.identity(3)]
    assert t.orbits() == [np.array([0])] or [list(o) for o in t.orbits()] == [[0], [1], [2]]


def test_orbits_and_transitivity():
    g = PermutationGroup.from_cycles(7, [[(0, 1, 2)], [(3, 4)], [(5, 6)]])
    assert [list(o) for o in g.orbits()] == [[0, 1, 2], [3, 4], [5, 6]]
    assert not g.is_transitive()
    assert list(g.orbit(4)) == [3, 4]
    for name in ("C4", "A5", "PSL(2,7)"):
        assert stock(name).is_transitive()


def test_point_stabilizer_orders():
    # transitive: |G| = |orbit| * |stab|
    for name in ("C4", "D4", "A4", "S4", "F20", "A5", "S5", "PSL(2,7)"):
        g = stock(name)
        st = g.point_stabilizer(0)
        assert all(s(0) == 0 for s in st.generators)
        assert st.order * len(g.orbit(0)) == g.order
        assert st.is_subgroup_of(g)


def test_point_stabilizer_elements_are_exactly_the_fixers():
    g = stock("A5")
    st = g.point_stabilizer(2)
    fixers = {e.key for e in g.elements() if e(2) == 2}
    assert {e.key for e in st.elements()} == fixers


def test_induced_action_faithful_on_invariant_set():
    g = PermutationGroup.from_cycles(7, [[(0, 1, 2)], [(3, 4)], [(5, 6)]])
    img, relabel = g.induced_action([3, 4, 5, 6])
    assert img.degree == 4
    assert img.order == 4
    assert relabel == {3: 0, 4: 1, 5: 2, 6: 3}
    with pytest.raises(GroupError):
        g.induced_action([0, 1])  # not invariant


def test_project_matches_induced_generators():
    g = stock("S3xS3")
    img, relabel = g.induced_action([3, 4, 5])
    for el in [g.generators[2], g.generators[3], g.generators[0]]:
        p = g.project(el, relabel)
        assert p.degree == 3
        assert all(p(relabel[x]) == relabel[el(x)] for x in (3, 4, 5))


def test_random_element_membership_and_determinism():
    g = stock("A5")
    rng = np.random.default_rng(11)
    xs = [g.random_element(rng) for _ in range(200)]
    assert all(x in g for x in xs)
    rng2 = np.random.default_rng(11)
    assert xs == [g.random_element(rng2) for _ in range(200)]


def test_random_element_is_roughly_uniform():
    # chi-square-ish sanity: every S4 element should appear in 24*200 draws
    g = stock("S4")
    rng = np.random.default_rng(13)
    counts = {}
    for _ in range(24 * 200):
        counts[g.random_element(rng).key] = counts.get(g.random_element(rng).key, 0) + 1
    assert len(counts) == 24
    lo, hi = min(counts.values()), max(counts.values())
    assert lo > 100 and hi < 340


def test_subgroup_and_same_group():
    s4, a4, d4 = stock("S4"), stock("A4"), stock("D4")
    assert a4.is_subgroup_of(s4)
    assert d4.is_subgroup_of(s4)
    assert not s4.is_subgroup_of(a4)
    other_s4 = PermutationGroup.from_cycles(4, [[(0, 1)], [(1, 2)], [(2, 3)]])
    assert s4.same_group(other_s4)
    assert not s4.same_group(a4)


def test_bsgs_incremental_extend():
    b = BSGS(4, [cyc(4, (0, 1, 2, 3))])
    assert b.order == 4
    assert b.extend(cyc(4, (0, 1)))
    assert b.order == 24
    assert not b.extend(cyc(4, (0, 2)))
    assert b.order == 24
    # sift residue of a member is the identity at the end of the chain
    residue, level = b.sift(cyc(4, (1, 2, 3)))
    assert residue.is_identity() and level == len(b.base)


def test_bsgs_on_random_generated_subgroups():
    rng = np.random.default_rng(17)
    for _ in range(30):
        n = int(rng.integers(2, 8))
        k = int(rng.integers(1, 3))
        gens = [Perm(rng.permutation(n)) for _ in range(k)]
        g = PermutationGroup(n, gens)
        assert g.order == len(brute_elements(g))


def test_minimal_block_systems():
    assert stock("S4").minimal_block_systems() == []
    assert stock("A5").minimal_block_systems() == []
    c4 = stock("C4").minimal_block_systems()
    assert len(c4) == 1 and [sorted(b) for b in c4[0].blocks()] == [[0, 2], [1, 3]]
    d4 = stock("D4").minimal_block_systems()
    assert len(d4) == 1 and d4[0].block_size == 2
    v4 = stock("V4").minimal_block_systems()
    assert len(v4) == 3
    for s in v4:
        assert s.check_invariant(stock("V4"))


def test_block_systems_are_invariant_partitions():
    w = PermutationGroup.from_cycles(
        8, [[(0, 1, 2, 3, 4, 5, 6, 7)], [(0, 7), (1, 6), (2, 5), (3, 4)]]
    )
    assert w.order == 16
    systems = w.all_block_systems()
    assert sorted(s.block_size for s in systems) == [2, 4]
    for s in systems:
        assert s.check_invariant(w)
        assert not s.check_invariant(PermutationGroup.symmetric(8))


def test_all_block_systems_by_brute_force():
    # oracle: test every partition of 0..n-1 into equal blocks directly
    from itertools import combinations

    def brute_systems(g):
        n = g.degree
        found = []
        for size in range(2, n):
            if n % size:
                continue
            # canonical: build partitions greedily, check invariance
            def partitions(rest):
                if not rest:
                    yield []
                    return
                head = rest[0]
                for picks in combinations(rest[1:], size - 1):
                    block = (head,) + picks
                    remaining = [x for x in rest if x not in block]
                    for tail in partitions(remaining):
                        yield [block] + tail

            for part in partitions(list(range(n))):
                ok = True
                blocks = [frozenset(b) for b in part]
                as_set = set(blocks)
                for gen in g.generators:
                    for b in blocks:
                        if frozenset(gen(x) for x in b) not in as_set:
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    found.append(frozenset(blocks))
        return set(found)

    for name in ("C4", "V4", "D4", "A4", "S4", "F20", "C5"):
        g = stock(name)
        got = {
            frozenset(frozenset(b) for b in s.blocks())
            for s in g.all_block_systems()
        }
        assert got == brute_systems(g), name


def test_block_system_validation():
    with pytest.raises(GroupError):
        BlockSystem(4, np.array([0, 0, 0, 1]), 2, 2)
    with pytest.raises(GroupError):
        BlockSystem(4, np.array([0, 1, 0, 1]), 2, 3)


def test_closure_rows_cap():
    gens = [np.array(g.images) for g in stock("S5").generators]
    with pytest.raises(ResourceCapExceeded):
        closure_rows(5, gens, cap=50)


def test_generator_degree_mismatch():
    with pytest.raises(GroupError):
        PermutationGroup(4, [Perm([1, 0, 2, 3, 4])])
