"""IP_n checking, monochromatic finite-sums witnesses, Folkman-type
numbers, and block-system extraction from subset-lattice colorings.

Two genuinely different IP_n notions are exposed side by side: the
inductive one (recursing through A and its shifts, elements may recur)
and the finite-sums witness one (a size-n set with all subset sums inside
A).  They diverge already at ({1,2}, 2): inductively IP_2 via a = 1, but
no 2-element witness since 1 + 2 = 3 is missing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, product
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from .fstree import FiniteSet, fs


class ColoringError(ValueError):
    pass


class Coloring:
    """Total map from a finite integer domain to colors.

    Colors are ints in [1, r] for base colorings; induced colorings use
    tuples, in which case r is None.
    """

    __slots__ = ("_map", "r", "_domain", "_key")

    def __init__(self, mapping: Dict[int, object], r: Optional[int] = None):
        self._map = dict(mapping)
        self.r = r
        self._domain = tuple(sorted(self._map))
        self._key = None
        if r is not None:
            bad = [v for v, c in self._map.items() if not (isinstance(c, int) and 1 <= c <= r)]
            if bad:
                raise ColoringError(f"colors outside [1,{r}] at {sorted(bad)[:5]}")

    @property
    def domain(self) -> tuple:
        return self._domain

    def of(self, n: int):
        try:
            return self._map[n]
        except KeyError:
            raise ColoringError(f"{n} outside the coloring domain") from None

    def get(self, n: int, default=None):
        return self._map.get(n, default)

    def __contains__(self, n: int) -> bool:
        return n in self._map

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted(self._map.items(), key=lambda kv: kv[0]))
        return self._key

    def __eq__(self, other):
        return isinstance(other, Coloring) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def classes(self) -> Dict[object, tuple]:
        out: Dict[object, list] = {}
        for v in self._domain:
            out.setdefault(self._map[v], []).append(v)
        return {c: tuple(vs) for c, vs in out.items()}

    def restrict(self, values: Iterable[int]) -> "Coloring":
        return Coloring({v: self._map[v] for v in values}, self.r)

    def to_json(self) -> dict:
        return {"r": self.r, "values": {str(v): self._map[v] for v in self._domain}}

    @staticmethod
    def from_json(data) -> "Coloring":
        if isinstance(data, str):
            data = json.loads(data)
        return Coloring({int(k): v for k, v in data["values"].items()}, data.get("r"))

    @staticmethod
    def constant(domain: Iterable[int], color: int = 1, r: int = 1) -> "Coloring":
        return Coloring({v: color for v in domain}, r)

    @staticmethod
    def parity(domain: Iterable[int]) -> "Coloring":
        # odd -> 1, even -> 2
        return Coloring({v: 1 if v % 2 else 2 for v in domain}, 2)

    @staticmethod
    def random(rng, domain: Iterable[int], r: int) -> "Coloring":
        return Coloring({v: rng.randint(1, r) for v in domain}, r)


class SetColoring:
    """Total map from the nonempty subsets of [1, m] to colors in [1, r]."""

    __slots__ = ("_map", "m", "r")

    def __init__(self, mapping: Dict[FrozenSet[int], int], m: int, r: int):
        self._map = {frozenset(k): v for k, v in mapping.items()}
        self.m = m
        self.r = r
        for size in range(1, m + 1):
            for sub in combinations(range(1, m + 1), size):
                if frozenset(sub) not in self._map:
                    raise ColoringError(f"missing subset {sub}")

    def of(self, subset) -> int:
        return self._map[frozenset(subset)]

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "r": self.r,
            "values": {
                ",".join(str(v) for v in sorted(k)): c for k, c in self._map.items()
            },
        }

    @staticmethod
    def from_json(data) -> "SetColoring":
        if isinstance(data, str):
            data = json.loads(data)
        mapping = {
            frozenset(int(x) for x in k.split(",")): v
            for k, v in data["values"].items()
        }
        return SetColoring(mapping, data["m"], data["r"])

    @staticmethod
    def from_function(m: int, r: int, fn) -> "SetColoring":
        mapping = {}
        for size in range(1, m + 1):
            for sub in combinations(range(1, m + 1), size):
                mapping[frozenset(sub)] = fn(frozenset(sub))
        return SetColoring(mapping, m, r)


# -- IP_n ---------------------------------------------------------------

_IP_MEMO: dict = {}


def ip_n_inductive(values: Iterable[int], n: int) -> bool:
    """Literal inductive IP_n: IP_1 is nonemptiness, and A is IP_{n+1}
    when some a in A leaves A meet (A - a) an IP_n set."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _ip_rec(frozenset(values), n)


def _ip_rec(a: frozenset, n: int) -> bool:
    if n == 1:
        return bool(a)
    key = (a, n)
    hit = _IP_MEMO.get(key)
    if hit is not None:
        return hit
    out = False
    for x in sorted(a):
        b = frozenset(v for v in a if v + x in a)
        if _ip_rec(b, n - 1):
            out = True
            break
    _IP_MEMO[key] = out
    return out


def ip_n_fs_witness(values: Iterable[int], n: int) -> Optional[FiniteSet]:
    """Least size-n set (lexicographically) whose subset sums all lie in
    the given set; None when exhaustive backtracking finds nothing."""
    if n < 1:
        raise ValueError("n must be >= 1")
    universe = sorted(set(values))
    pool = frozenset(universe)

    def extend(prefix: tuple, sums: frozenset, start: int) -> Optional[tuple]:
        if len(prefix) == n:
            return prefix
        for i in range(start, len(universe)):
            x = universe[i]
            new = {s + x for s in sums}
            new.add(x)
            if all(v in pool for v in new):
                got = extend(prefix + (x,), sums | new, i + 1)
                if got is not None:
                    return got
        return None

    return extend((), frozenset(), 0)


def mono_fs_witness(coloring: Coloring, values: Iterable[int], n: int) -> Optional[FiniteSet]:
    """Least size-n set with all subset sums in `values` and colored one
    single color (colors may be arbitrary hashables)."""
    universe = sorted(set(values))
    pool = frozenset(universe)

    def extend(prefix, sums, color, start):
        if len(prefix) == n:
            return prefix
        for i in range(start, len(universe)):
            x = universe[i]
            new = {s + x for s in sums}
            new.add(x)
            if not all(v in pool for v in new):
                continue
            cols = {coloring.of(v) for v in new}
            if color is None:
                if len(cols) > 1:
                    continue
                got = extend(prefix + (x,), sums | new, next(iter(cols)), i + 1)
            else:
                if cols - {color}:
                    continue
                got = extend(prefix + (x,), sums | new, color, i + 1)
            if got is not None:
                return got
        return None

    return extend((), frozenset(), None, 0)


def find_mono_ipn(coloring: Coloring, n: int) -> Optional[Tuple[int, FiniteSet]]:
    """Exhaustive search for a monochromatic FS-witness of size n inside
    the coloring's domain; least color, then least witness."""
    for color, values in sorted(coloring.classes().items(), key=lambda kv: kv[0]):
        wit = ip_n_fs_witness(values, n)
        if wit is not None:
            return (color, wit)
    return None


# -- Folkman-type numbers ------------------------------------------------


def _class_has_witness(values: frozenset, n: int) -> bool:
    if n == 1:
        return bool(values)
    if n == 2:
        for a in values:
            for b in values:
                if b > a and a + b in values:
                    return True
        return False
    return ip_n_fs_witness(values, n) is not None


def survivor(k: int, r: int, n: int) -> Optional[Tuple[int, ...]]:
    """Lexicographically least r-coloring of [1,k] (canonical color order,
    color(1)=1) without a monochromatic size-n FS-witness; None if every
    coloring has one."""
    if k == 0:
        return ()
    colors = [0] * (k + 1)
    classes = [set() for _ in range(r + 1)]

    def new_witness(cls: set, v: int, n_: int) -> bool:
        # incremental: only witnesses whose largest sum is v can be new
        if n_ == 1:
            return True
        if n_ == 2:
            for a in cls:
                if v - a in cls and v - a != a:
                    return True
            return False
        return _class_has_witness(frozenset(cls | {v}), n_)

    def dfs(v: int, used: int) -> Optional[Tuple[int, ...]]:
        if v > k:
            return tuple(colors[1:])
        for c in range(1, min(r, used + 1) + 1):
            if new_witness(classes[c], v, n):
                continue
            colors[v] = c
            classes[c].add(v)
            got = dfs(v + 1, max(used, c))
            if got is not None:
                return got
            classes[c].remove(v)
            colors[v] = 0
        return None

    return dfs(1, 0)


def folkman_number(r: int, n: int, limit: int) -> Optional[int]:
    """Least k <= limit such that every r-coloring of [1,k] contains a
    monochromatic size-n FS-witness; None if no k <= limit works."""
    for k in range(1, limit + 1):
        if survivor(k, r, n) is None:
            return k
    return None


def folkman_certificate(r: int, n: int, limit: int) -> dict:
    k = folkman_number(r, n, limit)
    out = {"r": r, "n": n, "limit": limit, "value": k}
    if k is not None:
        out["extremal"] = list(survivor(k - 1, r, n)) if k > 1 else []
    return out


def naive_folkman_oracle(r: int, n: int, limit: int) -> Optional[int]:
    """Full enumeration over all r**k colorings, no pruning or symmetry.
    Kept separate from the pruned search so they can cross-check."""
    for k in range(1, limit + 1):
        all_forced = True
        for assignment in product(range(1, r + 1), repeat=k):
            classes: Dict[int, set] = {}
            for v, c in enumerate(assignment, start=1):
                classes.setdefault(c, set()).add(v)
            if not any(_class_has_witness(frozenset(vs), n) for vs in classes.values()):
                all_forced = False
                break
        if all_forced:
            return k
    return None


# -- Lemma-style block systems -------------------------------------------


@dataclass(frozen=True)
class BlockSystem:
    """Separated blocks over [1, m] all of whose nonempty unions share one
    color under the source subset-lattice coloring."""

    blocks: Tuple[FiniteSet, ...]
    color: int


def validate_block_system(coloring: SetColoring, bs: BlockSystem) -> list:
    problems = []
    for a, b in zip(bs.blocks, bs.blocks[1:]):
        if not a or not b or max(a) >= min(b):
            problems.append(f"blocks {a} and {b} not separated")
    for size in range(1, len(bs.blocks) + 1):
        for chosen in combinations(bs.blocks, size):
            union = frozenset().union(*[frozenset(b) for b in chosen])
            got = coloring.of(union)
            if got != bs.color:
                problems.append(f"union {sorted(union)} has color {got} != {bs.color}")
    return problems


def lattice_ramsey_search(coloring: SetColoring, l: int) -> Optional[tuple]:
    """First Y (lexicographic) of size l whose subsets are colored by
    cardinality alone; returns (Y, cardinality coloring)."""
    ground = range(1, coloring.m + 1)
    for y in combinations(ground, l):
        by_size: Dict[int, int] = {}
        ok = True
        for size in range(1, l + 1):
            seen = {coloring.of(sub) for sub in combinations(y, size)}
            if len(seen) != 1:
                ok = False
                break
            by_size[size] = next(iter(seen))
        if ok:
            return (tuple(y), by_size)
    return None


def _blocks_direct(coloring: SetColoring, n: int) -> Optional[BlockSystem]:
    m = coloring.m
    subsets = []
    for size in range(1, m + 1):
        subsets.extend(combinations(range(1, m + 1), size))
    subsets.sort(key=lambda s: (len(s), s))

    def extend(blocks: tuple, color: Optional[int]):
        if len(blocks) == n:
            bs = BlockSystem(blocks, color)
            if not validate_block_system(coloring, bs):
                return bs
            return None
        lo = max(blocks[-1]) if blocks else 0
        for cand in subsets:
            if min(cand) <= lo:
                continue
            c = coloring.of(cand)
            if color is not None and c != color:
                continue
            # all unions with previous chosen blocks must match too
            ok = True
            for size in range(1, len(blocks) + 1):
                for chosen in combinations(blocks, size):
                    union = frozenset(cand).union(*[frozenset(b) for b in chosen])
                    if coloring.of(union) != (color if color is not None else c):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            got = extend(blocks + (cand,), color if color is not None else c)
            if got is not None:
                return got
        return None

    return extend((), None)


def unmeshed_extract(coloring: SetColoring, n: int) -> Optional[BlockSystem]:
    """Block system with monochromatic unions: first try the constructive
    pipeline (cardinality-homogeneous Y, then a monochromatic FS-witness
    over sizes, then consecutive runs of Y), falling back to direct
    backtracking.  Every result is checked by the invariant validator."""
    m = coloring.m
    min_l = n * (n + 1) // 2
    for l in range(min_l, m + 1):
        found = lattice_ramsey_search(coloring, l)
        if found is None:
            continue
        y, by_size = found
        size_coloring = Coloring({s: by_size[s] for s in range(1, l + 1)}, coloring.r)
        wit = find_mono_ipn(size_coloring, n)
        if wit is None:
            continue
        color, sizes = wit
        if sum(sizes) > l:
            continue
        blocks = []
        pos = 0
        for s in sizes:
            blocks.append(tuple(y[pos : pos + s]))
            pos += s
        bs = BlockSystem(tuple(blocks), color)
        if not validate_block_system(coloring, bs):
            return bs
    return _blocks_direct(coloring, n)
