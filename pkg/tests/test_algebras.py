"""Bundled operator product tables: consistency, Jacobi identities,
automorphisms, and the ghost-sector correspondences."""

from fractions import Fraction

import pytest

from wbrst.algebras import (bundle, ghost_stress, ghost_stress_w3,
                            verify_ghost_transform_w3,
                            verify_ghost_transform_w32, w3, w32, w32_ghosts,
                            w3_ghosts)
from wbrst.analysis import (apply_automorphism, central_charge, jacobi_check,
                            primary_check, validate_table)
from wbrst.engine import OpeContext
from wbrst.fields import FieldExpr, GeneratorDecl, OpeAlgebra
from wbrst.scalars import RationalFunction as RF


def _gen(alg, name):
    return FieldExpr.generator(alg, name)


@pytest.mark.parametrize("make", [
    lambda: w3(),
    lambda: w3(c=100),
    lambda: w32(),
    lambda: w32(c=-2),
    lambda: w3_ghosts(),
    lambda: w3_ghosts(0, 0),
    lambda: w32_ghosts(modified=True),
    lambda: w32_ghosts(modified=False),
    lambda: bundle("w3_brst", w3(), w3_ghosts()),
])
def test_bundled_tables_validate(make):
    assert validate_table(make()) == []


def test_as_printed_variant_is_flagged():
    issues = validate_table(w3(a2_mode="as-printed"))
    assert issues
    assert all("W W pole 1" in s for s in issues)
    assert "not self-exchange consistent" in issues[0]


def test_as_printed_deviation_is_a_third_derivative():
    # the two a2 conventions differ in the first self-product pole by
    # (16 / (30c + 132)) * T'''
    good = w3()
    bad = w3(a2_mode="as-printed")
    pole_good = good.table_entry("W", "W")[0][1]
    pole_bad = bad.table_entry("W", "W")[0][1]
    ctx = good.context()
    d3t = ctx.derivative(_gen(good, "T"), 3)
    coeff = RF.const(16) / (RF.const(30) * RF.var("c") + RF.const(132))
    from wbrst.algebras import rebase_expr
    got = rebase_expr(pole_bad, good) - pole_good
    assert got == d3t.scaled(-coeff) or got == d3t.scaled(coeff)


@pytest.mark.parametrize("names", [("T", "T", "T"), ("T", "T", "W"),
                                   ("T", "W", "W")])
def test_jacobi_symbolic_w3(names):
    alg = w3()
    ctx = alg.context()
    a, b, c = (_gen(alg, n) for n in names)
    assert jacobi_check(ctx, a, b, c) == []


def test_jacobi_www_numeric():
    alg = w3(c=100)
    ctx = alg.context()
    w = _gen(alg, "W")
    assert jacobi_check(ctx, w, w, w) == []


@pytest.mark.parametrize("names", [("T", "T", "Gp"), ("U", "Gp", "Gm"),
                                   ("T", "Gp", "Gm")])
def test_jacobi_symbolic_w32(names):
    alg = w32()
    ctx = alg.context()
    a, b, c = (_gen(alg, n) for n in names)
    assert jacobi_check(ctx, a, b, c) == []


def test_jacobi_detects_mutated_coefficient():
    # a Virasoro table with the wrong second pole fails the identity
    alg = OpeAlgebra("bad_virasoro", [GeneratorDecl("T", Fraction(2))])
    t = _gen(alg, "T")
    sc = OpeContext(alg)
    alg.set_ope("T", "T", {4: FieldExpr.unit(alg).scaled(Fraction(1, 2)),
                           2: t.scaled(3), 1: sc.derivative(t)})
    alg.freeze()
    ctx = alg.context()
    assert jacobi_check(ctx, t, t, t) != []


def test_ghost_stress_central_charges():
    # weight-(2,3) pair: -26 + -74 = -100; fermionic quadruple for the
    # weight-(2,1,3/2,3/2) algebra: -26 - 2 - 2*11 = -50
    alg = w3_ghosts(0, 0)
    ctx = alg.context()
    t = ghost_stress_w3(ctx)
    assert central_charge(ctx, t) == RF.const(-100)
    alg2 = w32_ghosts(modified=False)
    ctx2 = alg2.context()
    t2 = ghost_stress(ctx2, (("bT", "cT"), ("bU", "cU"),
                             ("bp", "cp"), ("bm", "cm")))
    assert central_charge(ctx2, t2) == RF.const(-50)


def test_ghost_fields_are_primary():
    alg = w3_ghosts(0, 0)
    ctx = alg.context()
    t = ghost_stress_w3(ctx)
    for name, wt in (("bT", 2), ("cT", -1), ("bW", 3), ("cW", -2)):
        ok, issues = primary_check(ctx, t, _gen(alg, name), wt)
        assert ok, (name, issues)


def test_matter_central_charges():
    for make, expect in ((w3, "c"), (w32, None)):
        alg = make()
        ctx = alg.context()
        got = central_charge(ctx, _gen(alg, "T"))
        if expect == "c":
            assert got == RF.var("c")
        else:
            c = RF.var("c")
            assert got == c * (RF.const(7) - RF.const(9) * c) / (RF.const(1) + c)


def test_sign_automorphism_w3():
    alg = w3()
    ok, issues = apply_automorphism(alg, {"W": -1})
    assert ok, issues
    ok, issues = apply_automorphism(alg, {"T": -1})
    assert not ok


def test_sign_automorphism_w32():
    # Gp -> -Gp, Gm -> -Gm preserves the table
    alg = w32()
    ok, issues = apply_automorphism(alg, {"Gp": -1, "Gm": -1})
    assert ok, issues
    ok, _ = apply_automorphism(alg, {"Gp": -1})
    assert not ok


def test_ghost_transform_w3():
    ok, issues = verify_ghost_transform_w3()
    assert ok, issues


def test_ghost_transform_w32():
    ok, issues = verify_ghost_transform_w32()
    assert ok, issues


def test_bundle_cross_pairs_regular():
    alg = bundle("w3_brst", w3(), w3_ghosts(0, 0))
    ctx = alg.context()
    assert ctx.ope(_gen(alg, "T"), _gen(alg, "bW")) == {}
    assert ctx.ope(_gen(alg, "W"), _gen(alg, "cT")) == {}


def test_bundle_rejects_name_collisions():
    from wbrst.fields import FieldError
    with pytest.raises((FieldError, ValueError)):
        bundle("twice", w3(), w3(c=100))
