"""Operator product engine: exchange formula, derivative rules,
normal-ordering identities, and Virasoro ground truths."""

from fractions import Fraction
from math import factorial

import pytest

from wbrst.algebras import w3, w32, w3_ghosts
from wbrst.engine import OpeContext
from wbrst.fields import FieldExpr, Monomial, UNIT
from wbrst.parsing import parse_field_expr
from wbrst.scalars import RationalFunction


@pytest.fixture(scope="module")
def w3_ctx():
    return w3(c=100).context()


def _gen(ctx, name):
    return FieldExpr.generator(ctx.algebra, name)


def test_virasoro_self_product_numeric(w3_ctx):
    ctx = w3_ctx
    t = _gen(ctx, "T")
    poles = ctx.ope(t, t)
    assert set(poles) == {1, 2, 4}
    assert poles[4] == FieldExpr.unit(ctx.algebra).scaled(Fraction(100, 2))
    assert poles[2] == t.scaled(2)
    assert poles[1] == ctx.derivative(t)


def test_primary_product(w3_ctx):
    ctx = w3_ctx
    t, w = _gen(ctx, "T"), _gen(ctx, "W")
    poles = ctx.ope(t, w)
    assert set(poles) == {1, 2}
    assert poles[2] == w.scaled(3)
    assert poles[1] == ctx.derivative(w)


def test_flip_involution(w3_ctx):
    ctx = w3_ctx
    for names in (("T", "T"), ("T", "W"), ("W", "W")):
        a, b = (_gen(ctx, n) for n in names)
        poles = ctx.ope(a, b)
        p = a.parity() and b.parity()
        twice = ctx._flip(ctx._flip(poles, p, p), p, p)
        keys = set(poles) | set(twice)
        for n in keys:
            z = FieldExpr.zero(ctx.algebra)
            assert poles.get(n, z) == twice.get(n, z), (names, n)


def test_flip_matches_direct_evaluation(w3_ctx):
    # [W T]_n computed by the engine equals the exchange formula applied
    # to the stored [T W] poles
    ctx = w3_ctx
    t, w = _gen(ctx, "T"), _gen(ctx, "W")
    direct = ctx.ope(w, t)
    flipped = ctx._flip(ctx.ope(t, w), 0, 0)
    assert set(direct) == set(flipped)
    for n in direct:
        assert direct[n] == flipped[n], n


def test_ope_bilinear(w3_ctx):
    ctx = w3_ctx
    t, w = _gen(ctx, "T"), _gen(ctx, "W")
    x = t.scaled(3) + w.scaled(-2)
    lhs = ctx.ope(x, t)
    a, b = ctx.ope(t, t), ctx.ope(w, t)
    for n in set(lhs) | set(a) | set(b):
        z = FieldExpr.zero(ctx.algebra)
        want = a.get(n, z).scaled(3) + b.get(n, z).scaled(-2)
        assert lhs.get(n, z) == want, n


def test_left_derivative_rule(w3_ctx):
    # [A' B]_n = -(n-1) [A B]_{n-1}
    ctx = w3_ctx
    t, w = _gen(ctx, "T"), _gen(ctx, "W")
    base = ctx.ope(t, w)
    shifted = ctx.ope(ctx.derivative(t), w)
    z = FieldExpr.zero(ctx.algebra)
    for n in range(1, 8):
        assert shifted.get(n, z) == base.get(n - 1, z).scaled(-(n - 1)), n


def test_derivative_is_a_derivation(w3_ctx):
    ctx = w3_ctx
    t, w = _gen(ctx, "T"), _gen(ctx, "W")
    for a, b in ((t, t), (t, w), (w, w)):
        prod = ctx.normal_product(a, b)
        lhs = ctx.derivative(prod)
        rhs = (ctx.normal_product(ctx.derivative(a), b)
               + ctx.normal_product(a, ctx.derivative(b)))
        assert lhs == rhs


def test_reordering_identity(w3_ctx):
    # N(A,B) - (-1)^{|A||B|} N(B,A) = sum_l (-1)^{l-1}/l! d^l [A B]_l
    ctx = w3_ctx
    t, w = _gen(ctx, "T"), _gen(ctx, "W")
    tw = ctx.normal_product(t, w)
    wt = ctx.normal_product(w, t)
    corr = FieldExpr.zero(ctx.algebra)
    for l, e in ctx.ope(t, w).items():
        k = Fraction((-1) ** (l - 1), factorial(l))
        corr = corr + ctx.derivative(e, l).scaled(k)
    assert tw - wt == corr


def test_reordering_identity_fermionic():
    # same identity for an odd pair, where the exchange sign is -1
    alg = w3_ghosts(g1=0, g2=0)
    ctx = alg.context()
    b = FieldExpr.generator(alg, "bT")
    c = FieldExpr.generator(alg, "cT")
    bc = ctx.normal_product(b, c)
    cb = ctx.normal_product(c, b)
    corr = FieldExpr.zero(alg)
    for l, e in ctx.ope(b, c).items():
        k = Fraction((-1) ** (l - 1), factorial(l))
        corr = corr + ctx.derivative(e, l).scaled(k)
    assert bc + cb == corr


def test_identical_fermion_square_is_half_correction():
    alg = w3_ghosts(g1=0, g2=0)
    ctx = alg.context()
    b = FieldExpr.generator(alg, "bT")
    sq = ctx.normal_product(b, b)
    corr = FieldExpr.zero(alg)
    for l, e in ctx.ope(b, b).items():
        k = Fraction((-1) ** (l - 1), 2 * factorial(l))
        corr = corr + ctx.derivative(e, l).scaled(k)
    assert sq == corr


def test_quasi_associativity_consistency(w3_ctx):
    # both association orders of a triple product reduce to the same
    # canonical form once the correction terms are added
    ctx = w3_ctx
    t = _gen(ctx, "T")
    tt = ctx.normal_product(t, t)
    left = ctx.normal_product(tt, t)
    right = ctx.normal_product(t, tt)
    corr = FieldExpr.zero(ctx.algebra)
    # N(N(T,T),T) - N(T,N(T,T)) from the stored identities must agree
    # with re-deriving each side through the engine
    diff = left - right
    # the difference is a concrete field, check it against an independent
    # evaluation: reorder N(T,TT) using the reordering identity
    for l, e in ctx.ope(tt, t).items():
        k = Fraction((-1) ** (l - 1), factorial(l))
        corr = corr + ctx.derivative(e, l).scaled(k)
    reordered = ctx.normal_product(t, tt) + corr
    assert left == reordered
    assert diff == corr


def test_ope_weight_grading(w3_ctx):
    ctx = w3_ctx
    t, w = _gen(ctx, "T"), _gen(ctx, "W")
    for a, b in ((t, w), (w, w)):
        wa, wb = a.weight(), b.weight()
        for n, e in ctx.ope(a, b).items():
            assert e.weight() == wa + wb - n, n


def test_symbolic_central_charge():
    alg = w3(c=None)
    ctx = alg.context()
    t = FieldExpr.generator(alg, "T")
    top = ctx.ope(t, t)[4]
    assert set(top.terms) == {UNIT}
    assert top.terms[UNIT] == RationalFunction.var("c") / 2


def test_w32_self_product():
    alg = w32(c=None)
    ctx = alg.context()
    gp = FieldExpr.generator(alg, "Gp")
    gm = FieldExpr.generator(alg, "Gm")
    poles = ctx.ope(gp, gm)
    assert max(poles) == 3
    # the spin-3/2 currents are even generators here, so the opposite
    # order follows from the bosonic exchange formula
    back = ctx.ope(gm, gp)
    flipped = ctx._flip(poles, alg.decl("Gm").parity, alg.decl("Gp").parity)
    assert set(back) == set(flipped)
    for n in back:
        assert back[n] == flipped[n], n


def test_composite_ope_against_wick(w3_ctx):
    # [T (TT)]_4 contains the central term 2 * (c/2) T + ... ; rather than
    # hand-expanding, check the Wick route equals the flip route
    ctx = w3_ctx
    t = _gen(ctx, "T")
    tt = ctx.normal_product(t, t)
    fwd = ctx.ope(t, tt)
    back = ctx.ope(tt, t)
    flipped = ctx._flip(fwd, 0, 0)
    z = FieldExpr.zero(ctx.algebra)
    for n in set(back) | set(flipped):
        assert back.get(n, z) == flipped.get(n, z), n


def test_parse_and_engine_agree(w3_ctx):
    ctx = w3_ctx
    alg = ctx.algebra
    t = _gen(ctx, "T")
    assert parse_field_expr("N(T, T)", alg, ctx=ctx) == ctx.normal_product(t, t)
    assert parse_field_expr("D(T)", alg, ctx=ctx) == ctx.derivative(t)
    assert parse_field_expr("2 * T + N(T, T)", alg, ctx=ctx) == (
        t.scaled(2) + ctx.normal_product(t, t))
    assert parse_field_expr("D2(T)", alg, ctx=ctx) == ctx.derivative(t, 2)
