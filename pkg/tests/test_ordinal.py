import random
import time

import pytest

from fslab.ordinal import (
    EPSILON_0,
    OMEGA,
    ONE,
    ZERO,
    HierarchyTerm,
    beta_iter,
    beta_sub,
    epsilon,
    eval_f,
    from_int,
    hierarchy_cmp,
    is_normal,
    omega_pow,
    ord_add,
    ord_cmp,
    ord_mul,
    ord_parse,
    ord_pow,
    ord_str,
    random_below_eps0,
    veblen,
)


W2 = omega_pow(from_int(2))  # omega^2
WW = omega_pow(OMEGA)  # omega^omega


def test_cmp_identity():
    assert ord_cmp(OMEGA, OMEGA) == 0


def test_cmp_omega2_less_omega_squared():
    w_times_2 = ord_mul(OMEGA, from_int(2))
    assert ord_cmp(w_times_2, W2) < 0


def test_cmp_eps0_above_finite_towers():
    tower = omega_pow(WW)  # omega^(omega^omega)
    assert ord_cmp(EPSILON_0, tower) > 0


def test_add_left_absorption():
    assert ord_add(ONE, OMEGA) == OMEGA


def test_mul_non_commutative():
    assert ord_mul(from_int(2), OMEGA) == OMEGA
    assert ord_mul(OMEGA, from_int(2)) == ord_parse("w*2")


def test_pow_exponent_laws():
    assert ord_pow(from_int(2), OMEGA) == OMEGA
    assert ord_pow(WW, OMEGA) == omega_pow(W2)


def test_pow_zero_conventions():
    assert ord_pow(ZERO, ZERO) == ONE
    assert ord_pow(ZERO, from_int(3)) == ZERO


def test_parse_print_basics():
    for text in ["0", "7", "w", "w^2", "w^w", "w^(w+1)", "e(0)", "e(e(0))",
                 "phi(2,0)", "w^w*2+w*3+5", "w^(e(0)+1)"]:
        assert ord_str(ord_parse(text)) == text


def test_parse_evaluates():
    assert ord_parse("2^w") == OMEGA
    assert ord_parse("1+w") == OMEGA
    assert ord_parse("(w^w)^w") == omega_pow(W2)
    assert ord_parse("e(0)") == EPSILON_0


def test_veblen_absorption():
    # omega^(epsilon_0) is epsilon_0 itself
    assert omega_pow(EPSILON_0) == EPSILON_0
    assert veblen(ZERO, EPSILON_0) == EPSILON_0


def test_beta_sub_base():
    assert beta_sub(ZERO, ZERO) == from_int(2)


def test_beta_sub_successor():
    assert beta_sub(from_int(2), ONE) == OMEGA


def test_beta_sub_limit_rule():
    for b in [ZERO, from_int(2), OMEGA, WW]:
        assert beta_sub(b, OMEGA) == EPSILON_0


def test_beta_sub_symbolic_above_eps0():
    out = beta_sub(EPSILON_0, OMEGA)
    assert isinstance(out, HierarchyTerm)
    assert out.tag == "beta_sub"


def test_beta_iter_chain():
    assert beta_iter(OMEGA, OMEGA, 0) == OMEGA
    assert beta_iter(OMEGA, OMEGA, 1) == EPSILON_0
    assert beta_iter(OMEGA, OMEGA, 2) == epsilon(EPSILON_0)


def test_eval_f_zero():
    assert eval_f(from_int(2), ZERO) == ZERO


def test_eval_f_fundamental_sequence_prefix():
    out = eval_f(from_int(2), ONE)
    assert isinstance(out, HierarchyTerm)
    assert out.prefix(2) == [ZERO, from_int(2), WW]


def test_eval_f_monotone_in_beta():
    f1 = eval_f(from_int(2), ONE)
    f2 = eval_f(from_int(2), from_int(2))
    assert hierarchy_cmp(f1, f2) == "less"


def test_beta_sub_monotone_in_alpha():
    betas = [ZERO, from_int(2), from_int(3), OMEGA]
    alphas = [ZERO, ONE, from_int(2), from_int(3), OMEGA, ord_add(OMEGA, ONE)]
    for b in betas:
        vals = [beta_sub(b, a) for a in alphas]
        for lo, hi in zip(vals, vals[1:]):
            assert ord_cmp(lo, hi) <= 0


def test_resolved_beta_sub_dominates_unfoldings():
    # the limit value must bound every depth-k unfolding, k <= 5
    for b in [ZERO, from_int(2), OMEGA]:
        resolved = beta_sub(b, OMEGA)
        for k in range(6):
            assert ord_cmp(beta_sub(b, from_int(k)), resolved) <= 0


def test_hierarchy_prefix_dominated_by_resolved_annotation():
    t = HierarchyTerm("beta_sub", (from_int(2), OMEGA), resolved=EPSILON_0)
    for p in t.prefix(5):
        assert ord_cmp(p, t.resolved) <= 0


def _samples(n=1000, seed=20260810):
    rng = random.Random(seed)
    return [random_below_eps0(rng) for _ in range(n)]


def test_random_samples_are_normal_forms():
    for x in _samples(200):
        assert is_normal(x)


def test_ordinal_laws_random():
    xs = _samples()
    start = time.monotonic()
    for i in range(0, len(xs) - 2, 3):
        a, b, c = xs[i], xs[i + 1], xs[i + 2]
        assert ord_add(ord_add(a, b), c) == ord_add(a, ord_add(b, c))
        assert ord_mul(ord_mul(a, b), c) == ord_mul(a, ord_mul(b, c))
        assert ord_mul(a, ord_add(b, c)) == ord_add(ord_mul(a, b), ord_mul(a, c))
        if ord_cmp(b, c) < 0:
            assert ord_cmp(ord_add(a, b), ord_add(a, c)) < 0
            if ord_cmp(a, ONE) >= 0:
                assert ord_cmp(ord_mul(a, b), ord_mul(a, c)) < 0
            if ord_cmp(a, from_int(2)) >= 0:
                assert ord_cmp(ord_pow(a, b), ord_pow(a, c)) < 0
    assert time.monotonic() - start < 5.0


def test_roundtrip_random():
    for x in _samples(300):
        assert ord_parse(ord_str(x)) == x


def test_parse_rejects_garbage():
    for bad in ["", "w^", "phi(1", "1 2", "q"]:
        with pytest.raises(Exception):
            ord_parse(bad)
