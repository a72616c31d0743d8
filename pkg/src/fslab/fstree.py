"""Finite sets of positive integers with FS (finite-sums) semantics,
downward-closed trees, the extension order, exact heights, and the
canonical tree of a given countable height.

A finite set is a strictly increasing tuple of positive integers.  A tree
is a downward-closed collection of such sets: whenever sigma is a member,
every nonempty subset of sigma is too.  Trees are immutable; heights and
FS values are memoized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterable, Optional

from . import ordinal as ordmod
from .ordinal import Ordinal, ord_cmp

FiniteSet = tuple  # tuple[int, ...], strictly increasing, all >= 1


class TreeError(ValueError):
    pass


def finite_set(values: Iterable[int]) -> FiniteSet:
    vs = sorted(set(int(v) for v in values))
    if not vs:
        raise TreeError("finite sets are nonempty")
    if vs[0] < 1:
        raise TreeError(f"elements must be positive, got {vs[0]}")
    return tuple(vs)


@lru_cache(maxsize=200_000)
def fs(sigma: FiniteSet) -> frozenset:
    """All sums over nonempty subsets of sigma."""
    if not sigma:
        raise TreeError("FS of the empty set is undefined")
    sums: set = set()
    for x in sigma:
        sums |= {s + x for s in sums}
        sums.add(x)
    return frozenset(sums)


def fs_values(sigma: FiniteSet) -> frozenset:
    return fs(sigma) if sigma else frozenset()


def set_less(sigma: FiniteSet, tau: FiniteSet) -> bool:
    """sigma < tau: every FS value of sigma lies below every one of tau.
    Equivalent to sum(sigma) < min(tau); an empty sigma is below anything,
    and nothing is below an empty tau."""
    if not tau:
        return False
    return sum(sigma) < tau[0]


def below(sigma: FiniteSet, tau: FiniteSet) -> bool:
    """set_less, but vacuously true when tau is empty."""
    return not tau or sum(sigma) < tau[0]


def prec(sigma: FiniteSet, tau: FiniteSet, tree: Optional["Tree"] = None) -> bool:
    """sigma extends tau in the tree order: tau is a subset of sigma and
    some subset of sigma lies entirely above FS(tau)."""
    if tree is not None and not tree.contains(sigma):
        return False
    if not (set(tau) <= set(sigma)):
        return False
    return sigma[-1] > sum(tau)


def _canon_key(sigma: FiniteSet):
    return (len(sigma), sigma)


def downward_close(members: Iterable[FiniteSet]) -> frozenset:
    out: set = set()
    stack = [tuple(m) for m in members]
    for m in stack:
        if m in out:
            continue
        for k in range(1, len(m) + 1):
            for sub in combinations(m, k):
                out.add(sub)
    return frozenset(out)


_HEIGHT_CACHE: dict = {}


class Tree:
    """Explicit finite downward-closed tree."""

    __slots__ = ("members", "_set", "_fs", "_height", "_ranks")

    def __init__(self, members: Iterable[FiniteSet] = (), validate: bool = True):
        mem = sorted({tuple(m) for m in members}, key=_canon_key)
        self.members: tuple = tuple(mem)
        self._set = frozenset(self.members)
        self._fs = None
        self._height = None
        self._ranks = None
        if validate:
            for m in self.members:
                if not m or any(v < 1 for v in m) or list(m) != sorted(set(m)):
                    raise TreeError(f"invalid member {m}")
            missing = self.closure_defect()
            if missing:
                raise TreeError(f"not downward closed, e.g. missing {missing}")

    @staticmethod
    def close(members: Iterable[FiniteSet]) -> "Tree":
        return Tree(downward_close(members), validate=False)

    @staticmethod
    def empty() -> "Tree":
        return Tree((), validate=False)

    def closure_defect(self) -> Optional[FiniteSet]:
        for m in self.members:
            if len(m) > 1:
                for k in range(1, len(m)):
                    for sub in combinations(m, k):
                        if sub not in self._set:
                            return sub
        return None

    def contains(self, sigma: FiniteSet) -> bool:
        return tuple(sigma) in self._set

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __eq__(self, other):
        return isinstance(other, Tree) and self._set == other._set

    def __hash__(self):
        return hash(self._set)

    def __repr__(self):
        return f"Tree({len(self.members)} members, ht={self.height()})"

    def fs_tree(self) -> frozenset:
        if self._fs is None:
            out: set = set()
            for m in self.members:
                out |= fs(m)
            self._fs = frozenset(out)
        return self._fs

    def fs_geq2(self) -> frozenset:
        return frozenset(sum(m) for m in self.members if len(m) >= 2)

    def extensions(self, tau: FiniteSet) -> list:
        """Members strictly extending tau (the elements below it in the
        tree order)."""
        out = []
        ts = set(tau)
        bound = sum(tau)
        for m in self.members:
            if len(m) > len(tau) and m[-1] > bound and ts <= set(m):
                out.append(m)
        return out

    def ranks(self) -> dict:
        if self._ranks is None:
            ranks = {m: 0 for m in self.members}
            # extensions are supersets: push each member's rank down to the
            # proper subsets it extends (longest members first)
            for ext in sorted(self.members, key=lambda s: -len(s)):
                r = ranks[ext] + 1
                top = ext[-1]
                for k in range(1, len(ext)):
                    for sub in combinations(ext, k):
                        if sub in self._set and top > sum(sub) and r > ranks[sub]:
                            ranks[sub] = r
            self._ranks = ranks
        return self._ranks

    def height(self) -> int:
        if self._height is None:
            key = self.members
            cached = _HEIGHT_CACHE.get(key)
            if cached is None:
                r = self.ranks()
                cached = 1 + max(r.values()) if r else 0
                if len(_HEIGHT_CACHE) < 500_000:
                    _HEIGHT_CACHE[key] = cached
            self._height = cached
        return self._height

    # -- serialization ---------------------------------------------------

    def to_text(self) -> str:
        return "\n".join(",".join(str(v) for v in m) for m in self.members)

    @staticmethod
    def from_text(text: str) -> "Tree":
        members = []
        for line in text.splitlines():
            line = line.strip()
            if line:
                members.append(finite_set(line.split(",")))
        return Tree(members)

    def to_json(self) -> list:
        return [list(m) for m in self.members]

    @staticmethod
    def from_json(data) -> "Tree":
        if isinstance(data, str):
            data = json.loads(data)
        return Tree([finite_set(m) for m in data])


def subtract(tree: Tree, sigma: FiniteSet) -> Tree:
    """T - sigma: the members tau above sigma with sigma|tau still in T.
    Subtracting the empty set returns the tree unchanged."""
    sigma = tuple(sigma)
    if not sigma:
        return tree
    if not tree.contains(sigma):
        raise TreeError(f"{sigma} is not a member")
    out = []
    s = sum(sigma)
    for tau in tree.members:
        if tau[0] > s and tree.contains(tuple(sorted(set(sigma) | set(tau)))):
            out.append(tau)
    return Tree(out, validate=False)


def add(tree: Tree, sigma: FiniteSet) -> Tree:
    """T + sigma for sigma < T: the tree generated by T, sigma, and all
    sigma|tau.  (Adjoining sigma itself keeps the result nonempty when T
    is empty, which the extraction pipelines rely on.)"""
    sigma = tuple(sigma)
    if not sigma:
        return tree
    for m in tree.members:
        if not set_less(sigma, m):
            raise TreeError(f"{sigma} is not below member {m}")
    gen = [sigma]
    for tau in tree.members:
        gen.append(tuple(sorted(set(sigma) | set(tau))))
    return Tree(frozenset(tree.members) | downward_close(gen), validate=False)


def shift(tree: Tree, n: int) -> Tree:
    """Intersect every member with [n, infinity), dropping empties."""
    out = set()
    for m in tree.members:
        t = tuple(v for v in m if v >= n)
        if t:
            out.add(t)
    return Tree(out, validate=False)


def height(tree: Tree) -> int:
    return tree.height()


def longest_chain(tree: Tree) -> list:
    """A maximal chain under the extension order, largest member first."""
    ranks = tree.ranks()
    if not ranks:
        return []
    cur = max(tree.members, key=lambda m: (ranks[m], _canon_key(m)))
    chain = [cur]
    while ranks[cur] > 0:
        nxt = None
        for ext in tree.extensions(cur):
            if ranks[ext] == ranks[cur] - 1:
                if nxt is None or _canon_key(ext) < _canon_key(nxt):
                    nxt = ext
        cur = nxt
        chain.append(cur)
    return chain


# -- value-set search spaces ------------------------------------------------


def _closed_value_sets(universe: Iterable[int], allowed: frozenset,
                       keep: Callable[[int], bool]) -> set:
    """All sets sigma over `universe` with FS(sigma) inside `allowed` and
    every FS value passing `keep`.  DFS with sum-closure pruning; the
    predicate family is subset-closed so pruning is sound."""
    uni = sorted(set(universe))
    out: set = set()

    def extend(prefix: tuple, sums: frozenset, start: int):
        for i in range(start, len(uni)):
            x = uni[i]
            if not keep(x) or x not in allowed:
                continue
            new = {s + x for s in sums}
            new.add(x)
            if not all(v in allowed and keep(v) for v in new):
                continue
            cand = prefix + (x,)
            out.add(cand)
            extend(cand, sums | frozenset(new), i + 1)

    extend((), frozenset(), 0)
    return out


def maximal_members(tree: Tree) -> list:
    # downward closure: m is non-maximal iff m plus one ground value is a member
    ground = sorted({v for m in tree.members for v in m})
    out = []
    for m in tree.members:
        ms = set(m)
        if not any(v not in ms and tuple(sorted(m + (v,))) in tree._set for v in ground):
            out.append(m)
    return out


def mono_subtree(tree: Tree, coloring, color) -> Tree:
    """Largest subtree of the given color: the sets sigma with the
    coloring constant on FS(sigma) and FS(sigma) inside FS(tau) for some
    single member tau."""
    members: set = set()
    seen_fs: set = set()
    for tau in maximal_members(tree):
        ftau = fs(tau)
        if ftau in seen_fs:
            continue
        seen_fs.add(ftau)
        ok = frozenset(v for v in ftau if coloring.get(v) == color)
        if ok:
            members |= _closed_value_sets(ok, ok, lambda v: True)
    return Tree(members, validate=False)


def build_subtree_of_height(tau: FiniteSet, n: int) -> Optional[Tree]:
    """Search for a tree of height >= n whose FS values stay inside
    FS(tau).  A superincreasing n-subset of FS(tau) with FS-closure inside
    FS(tau) realizes the height and the search over those is complete."""
    tau = finite_set(tau)
    if n <= 0:
        return Tree.empty()
    allowed = fs(tau)
    uni = sorted(allowed)

    def extend(prefix, sums, total, start):
        if len(prefix) == n:
            return prefix
        for i in range(start, len(uni)):
            x = uni[i]
            if x <= total:
                continue
            new = {s + x for s in sums}
            new.add(x)
            if not all(v in allowed for v in new):
                continue
            got = extend(prefix + (x,), sums | new, total + x, i + 1)
            if got is not None:
                return got
        return None

    sigma = extend((), set(), 0, 0)
    if sigma is None:
        return None
    return Tree.close([sigma])


# -- canonical tree of a declared height ------------------------------------

_SLICE = 16


def pair(slot: int, code: int) -> int:
    """Injective encoding of (slot, code) with code-major growth: values
    of code m live in [16^m + 1, 16^(m+1) - 1], which keeps every chain of
    distinct codes superincreasing for slots up to 16."""
    if slot < 1 or code < 1:
        raise TreeError("slot and code must be >= 1")
    cap = _SLICE ** code * (_SLICE - 1) - 1
    if slot > cap:
        raise TreeError(f"slot {slot} too large for code {code}")
    return _SLICE ** code + slot


def unpair(value: int) -> Optional[tuple]:
    if value <= _SLICE:
        return None
    code = 0
    p = 1
    while p * _SLICE <= value:
        p *= _SLICE
        code += 1
    slot = value - p
    if slot < 1 or slot > p * (_SLICE - 1) - 1:
        return None
    return (slot, code)


class SmallOrdinalCodes:
    """Bijection between ordinals below omega^omega and positive codes.

    Ordinals are enumerated in stages by weight (degree plus coefficient
    sum), ordered by ordinal value inside a stage, so codes are stable and
    reproducible."""

    def __init__(self):
        self._by_code: list = [None]  # 1-based
        self._code_of: dict = {}
        self._weight = -1

    @staticmethod
    def _tuples_of_weight(w: int):
        # coefficient tuples (c_0..c_d), c_d != 0 for d > 0, d + sum(c) == w
        if w == 0:
            yield ()
            return
        for d in range(0, w):
            rest = w - d
            # distribute `rest` over d+1 slots with the last slot >= 1 when d > 0
            def gen(i, remaining):
                if i == d:
                    lo = 1 if d > 0 else 0
                    if remaining >= lo:
                        yield (remaining,)
                    return
                for c in range(0, remaining + 1):
                    for tail in gen(i + 1, remaining - c):
                        yield (c,) + tail

            yield from gen(0, rest)

    @staticmethod
    def _to_ordinal(coeffs: tuple) -> Ordinal:
        o = ordmod.ZERO
        for i in range(len(coeffs) - 1, 0, -1):
            if coeffs[i]:
                o = ordmod.ord_add(
                    o, ordmod.ord_mul(ordmod.omega_pow(ordmod.from_int(i)),
                                      ordmod.from_int(coeffs[i])))
        if coeffs and coeffs[0]:
            o = ordmod.ord_add(o, ordmod.from_int(coeffs[0]))
        return o

    def _grow(self):
        self._weight += 1
        batch = [self._to_ordinal(t) for t in self._tuples_of_weight(self._weight)]
        batch.sort(key=ordmod._SortKey)
        for o in batch:
            self._by_code.append(o)
            self._code_of[o] = len(self._by_code) - 1

    def code(self, gamma: Ordinal) -> int:
        while gamma not in self._code_of:
            self._grow()
        return self._code_of[gamma]

    def decode(self, code: int) -> Ordinal:
        while len(self._by_code) <= code:
            self._grow()
        return self._by_code[code]


_CODES = SmallOrdinalCodes()


@dataclass(frozen=True)
class LazyTree:
    """Tree given by a membership predicate plus a bounded enumerator.
    The declared height is unchecked metadata; validators compare it with
    the enumerated fragment and warn rather than trust it."""

    contains: Callable[[FiniteSet], bool]
    enumerate_upto: Callable[[int], frozenset]
    declared_height: Optional[Ordinal] = None

    def fragment(self, bound: int) -> Tree:
        return Tree.close(self.enumerate_upto(bound))


def _below_omega_omega(alpha: Ordinal) -> bool:
    return all(t.level.is_zero() and t.arg.is_finite() for t in alpha.terms)


def canonical_alpha_tree(alpha, bound_hint: int = 0) -> LazyTree:
    """The canonical tree of declared height alpha (< omega^omega): a set
    is a member when its elements decode to slots 1..k carrying a strictly
    descending chain of ordinals below alpha."""
    if isinstance(alpha, int):
        alpha = ordmod.from_int(alpha)
    if not _below_omega_omega(alpha):
        raise TreeError(f"alpha must be below w^w, got {alpha}")

    def contains(sigma: FiniteSet) -> bool:
        decoded = []
        for v in sigma:
            d = unpair(v)
            if d is None:
                return False
            decoded.append(d)
        slots = sorted(s for s, _ in decoded)
        if slots != list(range(1, len(decoded) + 1)):
            return False
        by_slot = sorted(decoded)
        gammas = [_CODES.decode(c) for _, c in by_slot]
        prev = alpha
        for g in gammas:
            if ord_cmp(g, prev) >= 0:
                return False
            prev = g
        return True

    def enumerate_upto(bound: int) -> frozenset:
        # codes usable under the bound
        codes = []
        c = 1
        while _SLICE ** c < bound:
            codes.append(c)
            c += 1
        usable = [(_CODES.decode(c), c) for c in codes]
        usable = [(g, c) for g, c in usable if ord_cmp(g, alpha) < 0]
        out: set = set()

        def extend(prefix: tuple, slot: int, prev: Ordinal):
            for g, c in usable:
                if ord_cmp(g, prev) >= 0:
                    continue
                try:
                    v = pair(slot, c)
                except TreeError:
                    continue
                if v > bound:
                    continue
                member = prefix + (v,)
                out.add(tuple(sorted(member)))
                extend(member, slot + 1, g)

        extend((), 1, alpha)
        return frozenset(out)

    return LazyTree(contains=contains, enumerate_upto=enumerate_upto,
                    declared_height=alpha)
