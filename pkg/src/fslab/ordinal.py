"""Exact ordinal arithmetic in two-argument Veblen normal form below Gamma_0.

An ordinal is a sum  phi_{level}(arg)*coeff + ... + n  with the terms in
strictly descending order; phi_0(b) is omega^b, phi_1(b) is epsilon_b.
Values are immutable and every operation is pure, so they can be shared
freely between threads.

The module also evaluates three growth hierarchies symbolically
(`beta_sub`, `beta_iter`, `eval_f`).  When no verified closed form applies
the evaluation returns an unresolved `HierarchyTerm` instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


class OrdinalError(ValueError):
    pass


class OrdinalParseError(OrdinalError):
    pass


@dataclass(frozen=True)
class Term:
    """One summand phi_{level}(arg) * coeff."""

    level: "Ordinal"
    arg: "Ordinal"
    coeff: int


@dataclass(frozen=True)
class Ordinal:
    terms: tuple = ()
    nat: int = 0

    def is_zero(self) -> bool:
        return not self.terms and self.nat == 0

    def is_finite(self) -> bool:
        return not self.terms

    def is_limit(self) -> bool:
        return bool(self.terms) and self.nat == 0

    def is_successor(self) -> bool:
        return self.nat > 0

    def limit_part(self) -> "Ordinal":
        return Ordinal(self.terms, 0)

    def __lt__(self, other) -> bool:
        return ord_cmp(self, _coerce(other)) < 0

    def __le__(self, other) -> bool:
        return ord_cmp(self, _coerce(other)) <= 0

    def __gt__(self, other) -> bool:
        return ord_cmp(self, _coerce(other)) > 0

    def __ge__(self, other) -> bool:
        return ord_cmp(self, _coerce(other)) >= 0

    def __add__(self, other) -> "Ordinal":
        return ord_add(self, _coerce(other))

    def __radd__(self, other) -> "Ordinal":
        return ord_add(_coerce(other), self)

    def __mul__(self, other) -> "Ordinal":
        return ord_mul(self, _coerce(other))

    def __rmul__(self, other) -> "Ordinal":
        return ord_mul(_coerce(other), self)

    def __pow__(self, other) -> "Ordinal":
        return ord_pow(self, _coerce(other))

    def __str__(self) -> str:
        return ord_str(self)

    def __repr__(self) -> str:
        return f"Ordinal[{ord_str(self)}]"


ZERO = Ordinal()
ONE = Ordinal((), 1)


def from_int(n: int) -> Ordinal:
    if n < 0:
        raise OrdinalError(f"ordinals are non-negative, got {n}")
    return Ordinal((), n)


def _coerce(x) -> Ordinal:
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int):
        return from_int(x)
    raise TypeError(f"cannot treat {x!r} as an ordinal")


def _single(t: Term) -> Ordinal:
    return Ordinal((Term(t.level, t.arg, 1),), 0)


def _is_fixed_point(x: Ordinal) -> bool:
    """True when x = phi_l(a) with l >= 1, i.e. omega**x == x."""
    return (
        len(x.terms) == 1
        and x.nat == 0
        and x.terms[0].coeff == 1
        and not x.terms[0].level.is_zero()
    )


def veblen(level: Ordinal, arg: Ordinal) -> Ordinal:
    """phi_{level}(arg), absorbing fixed points of higher level."""
    level = _coerce(level)
    arg = _coerce(arg)
    if (
        len(arg.terms) == 1
        and arg.nat == 0
        and arg.terms[0].coeff == 1
        and ord_cmp(arg.terms[0].level, level) > 0
    ):
        return arg
    return Ordinal((Term(level, arg, 1),), 0)


def omega_pow(e) -> Ordinal:
    """omega ** e in normal form."""
    e = _coerce(e)
    if e.is_zero():
        return ONE
    if _is_fixed_point(e):
        return e
    return Ordinal((Term(ZERO, e, 1),), 0)


OMEGA = omega_pow(ONE)
EPSILON_0 = veblen(ONE, ZERO)


def epsilon(idx) -> Ordinal:
    return veblen(ONE, _coerce(idx))


def _cmp_mag(a: Term, b: Term) -> int:
    c = ord_cmp(a.level, b.level)
    if c == 0:
        return ord_cmp(a.arg, b.arg)
    if c < 0:
        return ord_cmp(a.arg, _single(b))
    return -ord_cmp(b.arg, _single(a))


def ord_cmp(a: Ordinal, b: Ordinal) -> int:
    """Total order; returns -1, 0 or 1."""
    for ta, tb in zip(a.terms, b.terms):
        c = _cmp_mag(ta, tb)
        if c:
            return c
        if ta.coeff != tb.coeff:
            return -1 if ta.coeff < tb.coeff else 1
    if len(a.terms) != len(b.terms):
        return 1 if len(a.terms) > len(b.terms) else -1
    if a.nat != b.nat:
        return -1 if a.nat < b.nat else 1
    return 0


def ord_max(a: Ordinal, b: Ordinal) -> Ordinal:
    return a if ord_cmp(a, b) >= 0 else b


def ord_add(a: Ordinal, b: Ordinal) -> Ordinal:
    if b.is_zero():
        return a
    if a.is_zero():
        return b
    if not b.terms:
        return Ordinal(a.terms, a.nat + b.nat)
    head = b.terms[0]
    keep = []
    merged = False
    for t in a.terms:
        c = _cmp_mag(t, head)
        if c > 0:
            keep.append(t)
        elif c == 0:
            keep.append(Term(head.level, head.arg, t.coeff + head.coeff))
            merged = True
            break
        else:
            break
    if merged:
        return Ordinal(tuple(keep) + b.terms[1:], b.nat)
    return Ordinal(tuple(keep) + b.terms, b.nat)


def _log_term(t: Term) -> Ordinal:
    """Exponent x with omega**x equal to the term's magnitude."""
    if t.level.is_zero():
        return t.arg
    return _single(t)


def _log_head(a: Ordinal) -> Ordinal:
    if not a.terms:
        if a.nat == 0:
            raise OrdinalError("log of 0")
        return ZERO
    return _log_term(a.terms[0])


def ord_mul(a: Ordinal, b: Ordinal) -> Ordinal:
    if a.is_zero() or b.is_zero():
        return ZERO
    res = ZERO
    la = _log_head(a)
    for t in b.terms:
        e = ord_add(la, _log_term(t))
        piece = omega_pow(e)
        piece = Ordinal((Term(piece.terms[0].level, piece.terms[0].arg, t.coeff),), 0)
        res = ord_add(res, piece)
    if b.nat:
        if a.terms:
            lead = a.terms[0]
            res = ord_add(
                res,
                Ordinal((Term(lead.level, lead.arg, lead.coeff * b.nat),) + a.terms[1:], a.nat),
            )
        else:
            res = ord_add(res, from_int(a.nat * b.nat))
    return res


def _dec1(e: Ordinal) -> Ordinal:
    # x with 1 + x == e; only called for e >= 1
    if e.nat >= 1:
        return Ordinal(e.terms, e.nat - 1)
    if e.is_zero():
        raise OrdinalError("cannot solve 1 + x = 0")
    return e


def _omega_quotient(lam: Ordinal) -> Ordinal:
    """q with omega * q == lam, for limit lam."""
    if not lam.is_limit():
        raise OrdinalError(f"not a limit ordinal: {lam}")
    res = ZERO
    for t in lam.terms:
        e = _dec1(_log_term(t))
        piece = omega_pow(e)
        if piece.terms:
            piece = Ordinal((Term(piece.terms[0].level, piece.terms[0].arg, t.coeff),), 0)
        else:
            piece = from_int(t.coeff)
        res = ord_add(res, piece)
    return res


def ord_pow(a: Ordinal, b: Ordinal) -> Ordinal:
    """Full ordinal exponentiation; 0**0 == 1 by convention."""
    if b.is_zero():
        return ONE
    if a.is_zero():
        return ZERO
    if ord_cmp(a, ONE) == 0:
        return ONE
    if not b.terms:
        n = b.nat
        if not a.terms:
            return from_int(a.nat**n)
        acc = ONE
        for _ in range(n):
            acc = ord_mul(acc, a)
        return acc
    binf, n = b.limit_part(), b.nat
    if not a.terms:
        # finite base >= 2: a ** (omega*q + n) == omega**q * a**n
        q = _omega_quotient(binf)
        return ord_mul(omega_pow(q), from_int(a.nat**n))
    e = ord_mul(_log_head(a), binf)
    acc = omega_pow(e)
    for _ in range(n):
        acc = ord_mul(acc, a)
    return acc


def is_normal(x: Ordinal) -> bool:
    """Structural normal-form check (used by tests and validators)."""
    if x.nat < 0:
        return False
    prev = None
    for t in x.terms:
        if t.coeff < 1:
            return False
        if not (is_normal(t.level) and is_normal(t.arg)):
            return False
        # fixed-point normality: arg < phi_level(arg)
        if ord_cmp(t.arg, _single(t)) >= 0:
            return False
        if prev is not None and _cmp_mag(prev, t) <= 0:
            return False
        prev = t
    return True


# -- text syntax --------------------------------------------------------

def ord_str(x: Ordinal) -> str:
    if x.is_zero():
        return "0"
    parts = []
    for t in x.terms:
        if t.level.is_zero():
            if ord_cmp(t.arg, ONE) == 0:
                s = "w"
            else:
                s = "w^" + _exp_str(t.arg)
        elif ord_cmp(t.level, ONE) == 0:
            s = f"e({ord_str(t.arg)})"
        else:
            s = f"phi({ord_str(t.level)},{ord_str(t.arg)})"
        if t.coeff > 1:
            s += f"*{t.coeff}"
        parts.append(s)
    if x.nat:
        parts.append(str(x.nat))
    return "+".join(parts)


def _exp_str(e: Ordinal) -> str:
    s = ord_str(e)
    if not e.terms:
        return s
    if len(e.terms) == 1 and e.nat == 0 and e.terms[0].coeff == 1:
        t = e.terms[0]
        if not t.level.is_zero():
            return s  # e(...) / phi(...) are self-delimiting
        if ord_cmp(t.arg, ONE) == 0:
            return s  # just w
    return "(" + s + ")"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise OrdinalParseError(f"{msg} at position {self.pos} in {self.text!r}")

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse_expr(self) -> Ordinal:
        v = self.parse_term()
        while self.peek() == "+":
            self.pos += 1
            v = ord_add(v, self.parse_term())
        return v

    def parse_term(self) -> Ordinal:
        v = self.parse_factor()
        while self.peek() == "*":
            self.pos += 1
            v = ord_mul(v, self.parse_factor())
        return v

    def parse_factor(self) -> Ordinal:
        v = self.parse_atom()
        if self.peek() == "^":
            self.pos += 1
            return ord_pow(v, self.parse_factor())
        return v

    def parse_atom(self) -> Ordinal:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            v = self.parse_expr()
            self.expect(")")
            return v
        if ch.isdigit():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            return from_int(int(self.text[start : self.pos]))
        if ch == "w":
            self.pos += 1
            return OMEGA
        if self.text.startswith("e", self.pos) and not self.text.startswith("eps", self.pos):
            self.pos += 1
            self.expect("(")
            v = self.parse_expr()
            self.expect(")")
            return veblen(ONE, v)
        if self.text.startswith("phi", self.pos):
            self.pos += 3
            self.expect("(")
            a = self.parse_expr()
            self.expect(",")
            b = self.parse_expr()
            self.expect(")")
            return veblen(a, b)
        self.error("unexpected token")


def ord_parse(text: str) -> Ordinal:
    p = _Parser(text)
    v = p.parse_expr()
    p.skip()
    if p.pos != len(text):
        p.error("trailing input")
    return v


# -- growth hierarchies --------------------------------------------------

@dataclass(frozen=True)
class HierarchyTerm:
    """Unresolved hierarchy value; `prefix` yields finite lower bounds."""

    tag: str  # "beta_sub" | "beta_iter" | "f"
    operands: tuple
    resolved: Optional[Ordinal] = None

    def prefix(self, k: int) -> list:
        """Depth-j unfoldings for j = 0..k (each an Ordinal or HierarchyTerm)."""
        if self.tag == "f":
            alpha, beta, base = self.operands
            if base is None:
                # limit beta: f(alpha, j) for finite j below beta
                return [eval_f(alpha, from_int(j)) for j in range(k + 1)]
            return [beta_iter(base, alpha, j) for j in range(k + 1)]
        if self.tag == "beta_iter":
            beta, alpha, n = self.operands
            return [beta_iter(beta, alpha, j) for j in range(min(n, k) + 1)]
        # beta_sub at a limit with base >= epsilon_0: bound through finite stages
        beta, alpha = self.operands
        return [beta_sub(beta, from_int(j)) for j in range(k + 1)]

    def __str__(self):
        inner = ",".join(str(o) for o in self.operands if o is not None)
        return f"{self.tag}[{inner}]"


HierarchyValue = Union[Ordinal, HierarchyTerm]


def beta_sub(beta: Ordinal, alpha: Ordinal) -> HierarchyValue:
    """The subscript hierarchy: stage 0 is max(beta, 2), successor stages
    raise to the power omega, and a limit stage gamma resolves to
    epsilon_delta when gamma is the delta-th limit ordinal and beta is
    below epsilon_0 (omega counts as the 0th limit).  Anything else stays
    symbolic."""
    beta = _coerce(beta)
    alpha = _coerce(alpha)
    lam, n = alpha.limit_part(), alpha.nat
    if lam.is_zero():
        base = ord_max(beta, from_int(2))
    elif ord_cmp(beta, EPSILON_0) < 0:
        q = _omega_quotient(lam)
        if q.terms:
            delta = q  # 1 + q == q for infinite q
        else:
            delta = from_int(q.nat - 1)
        base = epsilon(delta)
    else:
        return HierarchyTerm("beta_sub", (beta, alpha))
    for _ in range(n):
        base = ord_pow(base, OMEGA)
    return base


def beta_iter(beta: Ordinal, alpha: Ordinal, n: int) -> HierarchyValue:
    """n-fold iteration: stage k+1 re-subscripts the fixed base by the
    stage-k value.  The alpha operand is carried for signature fidelity
    but the recursion never consumes it."""
    beta = _coerce(beta)
    alpha = _coerce(alpha)
    x: HierarchyValue = beta
    for _ in range(n):
        if isinstance(x, HierarchyTerm):
            return HierarchyTerm("beta_iter", (beta, alpha, n))
        x = beta_sub(beta, x)
    if isinstance(x, HierarchyTerm):
        return HierarchyTerm("beta_iter", (beta, alpha, n))
    return x


def eval_f(alpha: Ordinal, beta: Ordinal) -> HierarchyValue:
    """f(alpha, 0) = 0 exactly; successor stages are suprema of the
    iteration sequence and stay symbolic (no verified closed form);
    limit stages stay symbolic as well."""
    alpha = _coerce(alpha)
    beta = _coerce(beta)
    if beta.is_zero():
        return ZERO
    if beta.nat >= 1:
        base = eval_f(alpha, Ordinal(beta.terms, beta.nat - 1))
        if isinstance(base, HierarchyTerm):
            return HierarchyTerm("f", (alpha, beta, None))
        return HierarchyTerm("f", (alpha, beta, base))
    return HierarchyTerm("f", (alpha, beta, None))


def hierarchy_cmp(x: HierarchyValue, y: HierarchyValue, depth: int = 5) -> Optional[str]:
    """Partial comparison: 'less' | 'equal' | 'greater' | None (unknown)."""
    if isinstance(x, Ordinal) and isinstance(y, Ordinal):
        c = ord_cmp(x, y)
        return "less" if c < 0 else "greater" if c > 0 else "equal"
    if isinstance(x, HierarchyTerm) and isinstance(y, HierarchyTerm):
        if x == y:
            return "equal"
        if x.tag == "f" == y.tag:
            ax, bx = x.operands[0], x.operands[1]
            ay, by = y.operands[0], y.operands[1]
            if ord_cmp(ax, ay) == 0:
                c = ord_cmp(bx, by)
                # f is strictly increasing in its second argument
                return "less" if c < 0 else "greater" if c > 0 else "equal"
        return None
    if isinstance(x, Ordinal):
        flipped = hierarchy_cmp(y, x, depth)
        if flipped == "less":
            return "greater"
        if flipped == "greater":
            return "less"
        return flipped
    # x symbolic vs resolved y: symbolic dominates all its finite unfoldings
    best = None
    for p in x.prefix(depth):
        if isinstance(p, Ordinal):
            if ord_cmp(p, y) > 0:
                return "greater"
            best = p
    return None


def random_below_eps0(rng, depth: int = 3) -> Ordinal:
    """Seeded random normal form below epsilon_0 (pure omega-powers)."""
    if depth == 0 or rng.random() < 0.35:
        return from_int(rng.randint(0, 9))
    exps = []
    for _ in range(rng.randint(1, 3)):
        e = random_below_eps0(rng, depth - 1)
        if not e.is_zero() and all(ord_cmp(e, o) != 0 for o in exps):
            exps.append(e)
    exps.sort(key=_SortKey, reverse=True)
    terms = tuple(Term(ZERO, e, rng.randint(1, 3)) for e in exps)
    return Ordinal(terms, rng.randint(0, 5))


class _SortKey:
    __slots__ = ("o",)

    def __init__(self, o: Ordinal):
        self.o = o

    def __lt__(self, other: "_SortKey") -> bool:
        return ord_cmp(self.o, other.o) < 0
