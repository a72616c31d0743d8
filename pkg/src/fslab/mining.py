"""Certificate-producing extraction algorithms on finite colored trees:
half/full matchings, induced colorings, the sequential and paired
dichotomies, half-match extraction, exact matching heights, cover
refinement, the star dichotomy, color dropping, and the end-to-end
monochromatic-subtree pipeline.

All algorithms work on explicit finite trees with natural-number
parameters; the transfinite bounds of the accompanying ordinal hierarchies
are never evaluated as runtime preconditions (they are infinite already at
the first interesting stage).  Every emitted witness is meant to be
re-checked by the independent validators in `validate`; nothing here
certifies itself.

Two conventions used throughout:

* accumulated witness sets are threaded member-level, and trees are thinned
  to members starting above the accumulated sum, so that set unions stay
  members of the original tree;
* wherever the write-up adjoins a sum value k as a fresh singleton, the
  resulting trees are value-set trees: their members are sets of FS values
  validated pointwise against FS of the ambient tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .folkman import Coloring
from .fstree import (
    FiniteSet,
    Tree,
    add,
    below,
    fs,
    fs_values,
    subtract,
)


class PreconditionError(ValueError):
    pass


class SearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class DichotomyOutcome:
    case: int  # 1 or 2
    tree: Tree
    tau: Optional[FiniteSet] = None
    color: Optional[object] = None
    claimed_height: int = 0


@dataclass(frozen=True)
class MatchHeightRecord:
    mode: str  # "half" | "full"
    base: int
    value: Optional[int]
    chain: tuple  # ((sigma, Tree), ...) realizing the value


# -- matching predicates --------------------------------------------------


def match_value(c: Coloring, sigma: FiniteSet, n: int, mode: str) -> Optional[int]:
    """Least m in FS(sigma) recurring at n: c(n) == c(n+m), and for full
    mode also == c(m).  None when no m works (missing colors never work)."""
    cn = c.get(n)
    if cn is None:
        return None
    for m in sorted(fs_values(sigma)):
        if c.get(n + m) != cn:
            continue
        if mode == "full" and c.get(m) != cn:
            continue
        return m
    return None


def half_matches(sigma: FiniteSet, tree: Tree, c: Coloring) -> bool:
    return all(match_value(c, sigma, n, "half") is not None for n in tree.fs_tree())


def full_matches(sigma: FiniteSet, tree: Tree, c: Coloring) -> bool:
    return all(match_value(c, sigma, n, "full") is not None for n in tree.fs_tree())


def induce(c: Coloring, sigma: FiniteSet, mode: str, domain) -> Coloring:
    """Induced coloring n -> (least matching m, c(n)); raises when the
    matching predicate fails somewhere on the domain."""
    out = {}
    for n in sorted(domain):
        m = match_value(c, sigma, n, mode)
        if m is None:
            raise PreconditionError(
                f"{sigma} does not {mode}-match at {n}; cannot induce")
        out[n] = (m, c.of(n))
    return Coloring(out, None)


def matched_family(tree: Tree, sigma: FiniteSet, c: Coloring, mode: str) -> Tree:
    """Largest subfamily of tree - sigma matched by sigma: the members all
    of whose FS values recur.  Any matched subfamily is contained in it."""
    base = subtract(tree, sigma)
    good = [m for m in base.members
            if all(match_value(c, sigma, n, mode) is not None for n in fs(m))]
    return Tree(good, validate=False)


# -- matching height -------------------------------------------------------


def matching_height(tree: Tree, c: Coloring, base: int, mode: str) -> MatchHeightRecord:
    """Exact maximal matching height with the realizing witness chain.

    The half mode grounds at subtrees of height >= base; the full mode
    grounds unconditionally.  Exhaustive over the member choices; for each
    sigma the continuation tree is the maximal matched subfamily, which
    dominates every other choice."""
    memo: dict = {}

    def rec(t: Tree, coloring: Coloring):
        key = (t.members, coloring.key())
        hit = memo.get(key)
        if hit is not None:
            return hit
        if mode == "half":
            best = 0 if t.height() >= base else None
        else:
            best = 0
        chain: tuple = ()
        for sigma in t.members:
            fam = matched_family(t, sigma, coloring, mode)
            if fam.members:
                ind = induce(coloring, sigma, mode, fam.fs_tree())
            else:
                ind = Coloring({}, None)
            sub, subchain = rec(fam, ind)
            if sub is not None and (best is None or sub + 1 > best):
                best = sub + 1
                chain = ((sigma, fam),) + subchain
        memo[key] = (best, chain)
        return best, chain

    value, chain = rec(tree, c)
    return MatchHeightRecord(mode=mode, base=base, value=value, chain=chain)


# -- dichotomies ------------------------------------------------------------


def _union(a: FiniteSet, b: FiniteSet) -> FiniteSet:
    return tuple(sorted(set(a) | set(b)))


def _with_tau(tree: Tree, tau: FiniteSet) -> Tree:
    return add(tree, tau) if tau else tree


def case1_property(t_prime: Tree, tau: FiniteSet, sigma: FiniteSet, c: Coloring) -> bool:
    """Every >=2-element sum of T'+tau recurs after adding some FS(sigma)
    value."""
    if not t_prime.members and not tau:
        return True
    pool = sorted(fs_values(sigma))
    for m in _with_tau(t_prime, tau).fs_geq2():
        if not any(c.get(m) is not None and c.get(m) == c.get(m + n) for n in pool):
            return False
    return True


def case2_property(t_prime: Tree, tau: FiniteSet, tau_p: FiniteSet,
                   sigma: FiniteSet, c: Coloring) -> bool:
    """Every FS value of T' has a shift from FS(tau | tau') that no
    FS(sigma) value can re-match."""
    pool = sorted(fs_values(_union(tau, tau_p)))
    svals = sorted(fs_values(sigma))
    for n in sorted(t_prime.fs_tree()):
        ok = False
        for m in pool:
            cm = c.get(n + m)
            if cm is None:
                continue
            if all(c.get(n + m + mp) is not None and c.get(n + m + mp) != cm
                   for mp in svals):
                ok = True
                break
        if not ok:
            return False
    return True


def _check_coloring_covers(tree: Tree, tau: FiniteSet, sigma: FiniteSet, c: Coloring):
    t = tree
    if tau:
        t = add(t, tau)
    if sigma:
        t = add(t, sigma)
    missing = [v for v in sorted(t.fs_tree()) if v not in c]
    if missing:
        raise PreconditionError(f"coloring undefined at {missing[:5]} (and maybe more)")


def dichotomy_seq(tree: Tree, sigma: FiniteSet, tau: FiniteSet,
                  alpha: int, beta: int, c: Coloring) -> DichotomyOutcome:
    """Sequential dichotomy: either a tree of height >= beta whose joint
    sums with tau all recur under FS(sigma) shifts (case 1), or a witness
    set tau' and a tree of height >= alpha whose values all shift past any
    FS(sigma) re-match (case 2).  Computed by the proof-shaped recursion
    on beta; the limit step of the underlying induction is vacuous here
    because beta is a natural number."""
    sigma, tau = tuple(sigma), tuple(tau)
    if not below(sigma, tau) and tau:
        raise PreconditionError(f"need sigma < tau, got {sigma}, {tau}")
    for m in tree.members:
        if not below(tau, m):
            raise PreconditionError(f"need tau < tree, but {tau} !< {m}")
    if tree.height() < alpha * beta:
        raise PreconditionError(
            f"height {tree.height()} below alpha*beta = {alpha * beta}")
    _check_coloring_covers(tree, tau, sigma, c)
    return _seq_rec(tree, sigma, tau, alpha, beta, c)


def _seq_rec(tree: Tree, sigma: FiniteSet, tau: FiniteSet,
             alpha: int, beta: int, c: Coloring) -> DichotomyOutcome:
    if beta == 0:
        return DichotomyOutcome(case=1, tree=Tree.empty(), claimed_height=0)
    if tree.height() >= beta and case1_property(tree, tau, sigma, c):
        return DichotomyOutcome(case=1, tree=tree, claimed_height=tree.height())
    thresh = alpha * (beta - 1)
    t_high = Tree([m for m in tree.members
                   if subtract(tree, m).height() >= thresh], validate=False)
    if case2_property(t_high, tau, (), sigma, c):
        return DichotomyOutcome(case=2, tree=t_high, tau=(),
                                claimed_height=t_high.height())
    svals = sorted(fs_values(sigma))
    tvals = sorted(fs_values(tau))
    for sigma0 in t_high.members:
        k = sum(sigma0)
        good = True
        for m in tvals:
            if not any(c.get(k + m) is not None and c.get(k + m) == c.get(k + m + mp)
                       for mp in svals):
                good = False
                break
        if not good:
            continue
        tau2 = _union(tau, sigma0)
        bound = sum(tau2)
        base = subtract(tree, sigma0)
        t_next = Tree([m for m in base.members if m[0] > bound], validate=False)
        if t_next.height() < thresh:
            continue
        try:
            rec = _seq_rec(t_next, sigma, tau2, alpha, beta - 1, c)
        except SearchError:
            continue
        if rec.case == 1:
            lifted = add(rec.tree, sigma0) if rec.tree.members or sigma0 else rec.tree
            return DichotomyOutcome(case=1, tree=lifted,
                                    claimed_height=rec.claimed_height + 1)
        return DichotomyOutcome(case=2, tree=rec.tree,
                                tau=_union(rec.tau, sigma0),
                                claimed_height=rec.claimed_height)
    raise SearchError("no branch of the sequential dichotomy applies")


def pairing_contraction(tree: Tree) -> Tree:
    """Contract even-size members to their consecutive pair sums."""
    out = set()
    for m in tree.members:
        if len(m) >= 2 and len(m) % 2 == 0:
            out.add(tuple(m[i] + m[i + 1] for i in range(0, len(m), 2)))
    return Tree(out, validate=False)


def dichotomy_pair(tree: Tree, sigma: FiniteSet, alpha: int, beta: int,
                   c: Coloring) -> DichotomyOutcome:
    """Paired dichotomy: case 1 now covers all of FS(T') via the pairing
    contraction of a sequential case-1 tree of height 2*beta."""
    if tree.height() < alpha * 2 * beta:
        raise PreconditionError(
            f"height {tree.height()} below alpha*2*beta = {alpha * 2 * beta}")
    out = dichotomy_seq(tree, sigma, (), alpha, 2 * beta, c)
    if out.case == 2:
        return out
    contracted = pairing_contraction(out.tree)
    if contracted.height() < beta:
        raise SearchError(
            f"contraction lost height: {contracted.height()} < {beta}")
    return DichotomyOutcome(case=1, tree=contracted, claimed_height=beta)


def half_match_extract(tree: Tree, c: Coloring, r: int, alpha: int
                       ) -> Optional[Tuple[FiniteSet, Tree]]:
    """A member sigma and a tree of height >= alpha inside tree - sigma
    that sigma half-matches.  Runs the r-round paired dichotomy; after r
    bad rounds the color-collision argument forces the half-match, which
    is checked directly before returning."""
    need = (2 * alpha) ** (r + 1) + 1
    if tree.height() < need:
        raise PreconditionError(f"height {tree.height()} below {need}")
    _check_coloring_covers(tree, (), (), c)
    if alpha == 0:
        return (tree.members[0], Tree.empty())
    target = (2 * alpha) ** (r + 1)
    d = None
    for m in tree.members:
        if len(m) == 1 and subtract(tree, m).height() >= target:
            d = m
            break
    if d is None:
        raise SearchError("no singleton start with enough residual height")
    s = d
    w = subtract(tree, s)
    for i in range(1, r + 1):
        a_i = alpha * (2 * alpha) ** (r - i)
        if w.height() < a_i * 2 * alpha:
            raise SearchError(f"round {i}: residual height {w.height()} too small")
        out = dichotomy_pair(w, s, a_i, alpha, c)
        if out.case == 1:
            if half_matches(s, out.tree, c):
                return (s, out.tree)
            raise SearchError("case-1 tree not half-matched")
        s = _union(s, out.tau)
        bound = sum(s)
        w = Tree([m for m in out.tree.members if m[0] > bound], validate=False)
    if half_matches(s, w, c):
        return (s, w)
    raise SearchError("collision argument did not close")


# -- cover refinement -------------------------------------------------------


def partition_refine(tree: Tree, covers: Sequence[Tree], alpha: int
                     ) -> Tuple[Tree, int]:
    """A subtree of height >= alpha inside one cover piece (1-based
    index).  Pieces must be downward closed and jointly cover the tree."""
    covers = [cv if isinstance(cv, Tree) else Tree(cv, validate=False) for cv in covers]
    union = set()
    for cv in covers:
        defect = cv.closure_defect()
        if defect is not None:
            raise PreconditionError(f"cover piece not downward closed at {defect}")
        union |= set(cv.members)
    if union != set(tree.members):
        raise PreconditionError("cover pieces do not exactly cover the tree")
    if tree.height() < alpha:
        raise PreconditionError(f"height {tree.height()} below alpha = {alpha}")
    return _refine_rec(tree, covers, alpha)


def _refine_rec(tree: Tree, covers, alpha: int) -> Tuple[Tree, int]:
    if alpha == 0:
        return (Tree.empty(), 1)
    whole = set(tree.members)
    for i, cv in enumerate(covers):
        if set(cv.members) == whole:
            return (tree, i + 1)
    if alpha == 1:
        for m in tree.members:
            if len(m) == 1:
                for i, cv in enumerate(covers):
                    if cv.contains(m):
                        return (Tree([m], validate=False), i + 1)
        raise SearchError("no singleton member")
    pick = None
    for m in tree.members:
        if len(m) == 1 and subtract(tree, m).height() >= alpha - 1:
            pick = m
            break
    if pick is None:
        raise SearchError("no singleton with residual height")
    t_n = subtract(tree, pick)
    lifted_covers = []
    for cv in covers:
        lifted_covers.append(Tree(
            [m for m in t_n.members if cv.contains(_union(m, pick))],
            validate=False))
    sub, i = _refine_rec(t_n, lifted_covers, alpha - 1)
    return (add(sub, pick) if sub.members else Tree([pick], validate=False), i)


# -- star dichotomy and color dropping ---------------------------------------


def star_witnesses(tree: Tree, sigma0: FiniteSet, c: Coloring, cprime: Coloring,
                   tau: FiniteSet) -> list:
    """FS values n past sum(tau) whose cprime color survives every FS(tau)
    shift while no FS(tau|sigma0) value fully c-matches at n."""
    out = []
    tvals = sorted(fs_values(tau))
    combo = sorted(fs_values(_union(tau, sigma0)))
    bound = sum(tau)
    for n in sorted(tree.fs_tree()):
        if n <= bound:
            continue
        cn = cprime.get(n)
        if cn is None:
            continue
        if not all(cprime.get(n + m) == cn for m in tvals):
            continue
        full = False
        for m in combo:
            if c.get(n) is not None and c.get(n) == c.get(n + m) == c.get(m):
                full = True
                break
        if not full:
            out.append(n)
    return out


def star_tree(tree: Tree, sigma0: FiniteSet, c: Coloring, cprime: Coloring) -> Tree:
    """Maximal value-set tree of members with a star witness; the defining
    property is subset-closed, so DFS pruning is exact."""
    allowed = frozenset(tree.fs_tree())
    universe = sorted(allowed)
    members: set = set()

    def extend(prefix: tuple, sums: frozenset, start: int):
        for i in range(start, len(universe)):
            x = universe[i]
            new = {s + x for s in sums}
            new.add(x)
            if not all(v in allowed for v in new):
                continue
            cand = prefix + (x,)
            if not star_witnesses(tree, sigma0, c, cprime, cand):
                continue
            members.add(cand)
            extend(cand, sums | frozenset(new), i + 1)

    extend((), frozenset(), 0)
    return Tree(members, validate=False)


def star_dichotomy(tree: Tree, sigma0: FiniteSet, c: Coloring, cprime: Coloring,
                   beta: int, alpha: int) -> DichotomyOutcome:
    """Either a full-match pair (sigma, T') of height >= beta with respect
    to cprime, or the star tree reaching height >= alpha."""
    sigma0 = tuple(sigma0)
    if alpha == 0:
        return DichotomyOutcome(case=2, tree=Tree.empty(), claimed_height=0)
    mh = matching_height(tree, cprime, beta, "half")
    if mh.value is None or mh.value < alpha:
        raise PreconditionError(
            f"half-matching height {mh.value} below alpha = {alpha}")
    for sigma in tree.members:
        fam = matched_family(tree, sigma, cprime, "full")
        if fam.height() >= beta:
            return DichotomyOutcome(case=1, tree=fam, tau=sigma,
                                    claimed_height=fam.height())
    t_star = star_tree(tree, sigma0, c, cprime)
    if t_star.height() >= alpha:
        return DichotomyOutcome(case=2, tree=t_star,
                                claimed_height=t_star.height())
    raise SearchError("neither star case reachable")


def color_drop(tree: Tree, c: Coloring, r: int, beta: int) -> DichotomyOutcome:
    """Either a full-match pair of height >= beta, or a subtree (with its
    achieved height) from whose FS values one color is entirely absent."""
    mh = matching_height(tree, c, beta, "half")
    alpha = mh.value if mh.value is not None else 0
    if alpha == 0:
        return DichotomyOutcome(case=2, tree=Tree.empty(), color=r,
                                claimed_height=0)
    out = star_dichotomy(tree, (), c, c, beta, alpha)
    if out.case == 1:
        return out
    t_star = out.tree
    if not t_star.members:
        return DichotomyOutcome(case=2, tree=t_star, color=r, claimed_height=0)
    covers = []
    for i in range(1, r + 1):
        covers.append(Tree(
            [m for m in t_star.members
             if any(c.of(n) == i for n in star_witnesses(tree, (), c, c, m))],
            validate=False))
    goal = min(alpha, t_star.height())
    sub, i = partition_refine(t_star, covers, goal)
    return DichotomyOutcome(case=2, tree=sub, color=i,
                            claimed_height=sub.height())


# -- the end-to-end pipeline --------------------------------------------------


def closed_value_family(tree: Tree, c: Coloring, color) -> Tree:
    """Maximal value-set tree with FS closure inside FS(tree) and every
    value of the given color."""
    allowed = frozenset(v for v in tree.fs_tree())
    good = frozenset(v for v in allowed if c.get(v) == color)
    universe = sorted(good)
    members: set = set()

    def extend(prefix, sums, start):
        for i in range(start, len(universe)):
            x = universe[i]
            new = {s + x for s in sums}
            new.add(x)
            if not all(v in good for v in new):
                continue
            cand = prefix + (x,)
            members.add(cand)
            extend(cand, sums | frozenset(new), i + 1)

    extend((), frozenset(), 0)
    return Tree(members, validate=False)


def effective_hindman(tree: Tree, c: Coloring, r: int) -> Tuple[Tree, Optional[int]]:
    """A monochromatic value-set tree inside FS(tree) with its color,
    built from the full-matching chain, the per-step component refinement,
    and a final color refinement; the result is then widened to the
    maximal monochromatic family of that color.  Height optimality is not
    guaranteed, soundness is (validate independently)."""
    if not tree.members:
        return (Tree.empty(), None)
    record = matching_height(tree, c, 0, "full")

    def assemble(t: Tree, coloring: Coloring, chain) -> Tree:
        if not chain:
            return Tree.empty()
        sigma, fam = chain[0]
        if fam.members:
            ind = induce(coloring, sigma, "full", fam.fs_tree())
            sub = assemble(fam, ind, chain[1:])
        else:
            sub = Tree.empty()
        if not sub.members:
            k = min(fs(sigma))
            return Tree([(k,)], validate=False)
        ks = sorted({ind.of(m[0])[0] for m in sub.members})
        covers = [Tree([m for m in sub.members if ind.of(m[0])[0] == k],
                       validate=False) for k in ks]
        refined, idx = partition_refine(sub, covers, sub.height())
        k = ks[idx - 1]
        return add(refined, (k,))

    t1 = assemble(tree, c, record.chain)
    colors = sorted({c.of(m[0]) for m in t1.members})
    covers = [Tree([m for m in t1.members if c.of(m[0]) == col], validate=False)
              for col in colors]
    _, idx = partition_refine(t1, covers, t1.height())
    color = colors[idx - 1]
    final = closed_value_family(tree, c, color)
    return (final, color)
