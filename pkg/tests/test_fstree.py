import random
from itertools import combinations

import pytest

from fslab import fstree
from fslab.fstree import (
    LazyTree,
    Tree,
    TreeError,
    add,
    build_subtree_of_height,
    canonical_alpha_tree,
    downward_close,
    finite_set,
    fs,
    height,
    longest_chain,
    mono_subtree,
    pair,
    prec,
    set_less,
    shift,
    subtract,
    unpair,
)
from fslab.ordinal import OMEGA, from_int, omega_pow, ord_mul


def powerset_tree(ground):
    return Tree.close([tuple(sorted(ground))])


def brute_longest_chain_length(tree):
    """Independent oracle: longest chain under the extension order via
    plain DFS over chains (no rank bookkeeping)."""
    memo = {}

    def down(m):
        if m in memo:
            return memo[m]
        best = 1
        ms = set(m)
        for other in tree.members:
            if len(other) > len(m) and ms <= set(other) and other[-1] > sum(m):
                best = max(best, 1 + down(other))
        memo[m] = best
        return best

    return max((down(m) for m in tree.members), default=0)


def test_fs_examples():
    assert fs((3,)) == {3}
    assert fs((2, 3)) == {2, 3, 5}
    assert fs((1, 2, 4)) == frozenset(range(1, 8))


def test_fs_rejects_empty():
    with pytest.raises(TreeError):
        fs(())


def test_fs_tree_and_geq2():
    t = Tree([(1,), (2,), (1, 2)])
    assert t.fs_tree() == {1, 2, 3}
    assert t.fs_geq2() == {3}
    assert Tree([(5,)]).fs_geq2() == frozenset()


def test_set_less():
    assert set_less((1, 2), (4,))
    assert not set_less((1, 2), (3,))
    assert not set_less((1,), ())


def test_prec():
    assert prec((1, 2, 4), (1, 2))
    assert not prec((1, 2), (1, 2))
    assert not prec((1, 2), (1, 2, 4))


def test_subtract():
    t = Tree([(1,), (2,), (1, 2)])
    assert subtract(t, (1,)).members == ((2,),)


def test_add_generates_closure():
    t = Tree([(4,)])
    out = add(t, (1, 2))
    expected = downward_close([(1, 2, 4)])
    assert set(out.members) == set(expected)


def test_add_rejects_not_below():
    with pytest.raises(TreeError):
        add(Tree([(2,)]), (1, 2))


def test_shift():
    t = Tree([(1,), (3,), (1, 3)])
    assert shift(t, 2).members == ((3,),)


def test_height_examples():
    assert height(Tree([(5,)])) == 1
    assert height(powerset_tree((1, 2))) == 2
    assert height(powerset_tree((1, 2, 4))) == 3
    assert height(Tree.empty()) == 0


def test_height_matches_chain_oracle_small():
    grounds = [(1, 2), (1, 2, 4), (2, 3, 4), (1, 2, 3), (3, 5, 8)]
    for g in grounds:
        full = powerset_tree(g)
        # every down-closed subfamily of the power set
        for keep in range(1 << len(full.members)):
            members = [m for i, m in enumerate(full.members) if keep >> i & 1]
            closed = downward_close(members)
            if set(members) != set(closed):
                continue
            t = Tree(members, validate=False)
            assert height(t) == brute_longest_chain_length(t)


def test_longest_chain_is_valid():
    t = powerset_tree((1, 2, 4))
    chain = longest_chain(t)
    assert len(chain) == height(t)
    for upper, lower in zip(chain, chain[1:]):
        assert prec(lower, upper)


def test_height_law_add():
    # needs chains with slack at least sum(sigma); power-of-two grounds
    # without 1 always have it (see decisions ledger)
    rng = random.Random(5)
    for _ in range(60):
        g = tuple(sorted(rng.sample([2, 4, 8, 16, 32], rng.randint(1, 4))))
        full = powerset_tree(g)
        members = [m for m in full.members if rng.random() < 0.7]
        t = Tree(downward_close(members), validate=False)
        if not t.members:
            continue
        sigma = (1,)
        assert height(add(t, sigma)) >= height(t) + 1


def test_subtract_definitional_form():
    t = powerset_tree((1, 2, 4, 8))
    for sigma in [(1,), (1, 2), (2, 4)]:
        sub = subtract(t, sigma)
        for tau in sub.members:
            assert set_less(sigma, tau)
            assert t.contains(tuple(sorted(set(sigma) | set(tau))))


def test_height_law_subtract():
    # ht(T) >= a+b implies the members sigma with ht(T-sigma) >= a form
    # a tree of height >= b
    t = powerset_tree((1, 2, 4, 8))
    h = height(t)
    for a in range(0, h + 1):
        b = h - a
        good = [m for m in t.members if height(subtract(t, m)) >= a]
        assert height(Tree(good, validate=False)) >= b


def test_shift_law_on_canonical_trees():
    for g in [(1, 2, 4, 8), (1, 2, 4, 8, 16)]:
        t = powerset_tree(g)
        for n_drop in range(len(g)):
            cutoff = g[n_drop - 1] + 1 if n_drop else 1
            assert height(shift(t, cutoff)) >= height(t) - n_drop


def test_mono_subtree_parity():
    t = powerset_tree((1, 2, 4))
    c = {v: v % 2 for v in t.fs_tree()}
    mono_even = mono_subtree(t, c, 0)
    assert set(mono_even.members) == {(2,), (4,), (6,), (2, 4)}
    assert mono_subtree(t, c, 7).members == ()


def test_mono_subtree_constant():
    t = powerset_tree((1, 2, 4))
    c = {v: 1 for v in t.fs_tree()}
    mono = mono_subtree(t, c, 1)
    assert t.contains((1, 2, 4))
    for m in t.members:
        assert mono.contains(m)
    assert mono.closure_defect() is None


def test_build_subtree_of_height():
    out = build_subtree_of_height((1, 2, 4), 3)
    assert out is not None
    assert set(out.members) == set(downward_close([(1, 2, 4)]))
    assert build_subtree_of_height((1,), 2) is None
    out2 = build_subtree_of_height((1, 2), 2)
    assert out2 is not None and set(out2.members) == set(downward_close([(1, 2)]))


def test_pairing_roundtrip():
    for slot in range(1, 12):
        for code in range(1, 5):
            v = pair(slot, code)
            assert unpair(v) == (slot, code)
    assert unpair(1) is None
    assert unpair(16) is None


def test_canonical_tree_alpha1():
    lt = canonical_alpha_tree(1)
    raw = lt.enumerate_upto(10_000)
    assert raw == {(pair(1, 1),)}
    assert lt.contains((pair(1, 1),))
    assert not lt.contains((pair(2, 1),))


def test_canonical_tree_alpha3_height():
    lt = canonical_alpha_tree(3)
    frag = lt.fragment(100_000)
    assert height(frag) == 3


def test_canonical_tree_heights_exact():
    # code indices grow quickly, so the element bound must cover the
    # slot-1 element of the longest chain
    for n in range(1, 6):
        lt = canonical_alpha_tree(n)
        frag = lt.fragment(16 ** 12)
        assert height(frag) == n


def test_canonical_tree_decode_rejects():
    lt = canonical_alpha_tree(2)
    assert not lt.contains((1,))  # no valid decode
    assert not lt.contains((3, 9))


def test_canonical_tree_enumerator_agrees_with_predicate():
    lt = canonical_alpha_tree(3)
    raw = lt.enumerate_upto(100_000)
    for m in raw:
        assert lt.contains(m)
    # fragment closed downward by construction
    assert lt.fragment(100_000).closure_defect() is None


def test_canonical_tree_infinite_alpha():
    lt = canonical_alpha_tree(OMEGA)
    frag = lt.fragment(16 ** 4)
    assert height(frag) >= 3
    assert lt.declared_height == OMEGA
    w2 = ord_mul(OMEGA, from_int(2))
    lt2 = canonical_alpha_tree(w2)
    assert lt2.fragment(16 ** 4).members


def test_canonical_tree_rejects_large_alpha():
    with pytest.raises(TreeError):
        canonical_alpha_tree(omega_pow(OMEGA))


def test_tree_serialization_roundtrip():
    t = powerset_tree((1, 2, 4))
    assert Tree.from_text(t.to_text()) == t
    assert Tree.from_json(t.to_json()) == t
    # canonical ordering: by size then lexicographic
    assert t.to_text().splitlines()[0] == "1"
    assert list(t.members) == sorted(t.members, key=lambda m: (len(m), m))


def test_tree_validation():
    with pytest.raises(TreeError):
        Tree([(1, 2)])  # missing singletons
    with pytest.raises(TreeError):
        Tree([(0,)])
    assert finite_set([3, 1, 2]) == (1, 2, 3)
