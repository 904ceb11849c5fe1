"""Ready-made operator product tables: the spin-3 extension of the
Virasoro algebra, its quasi-superconformal cousin with two weight-3/2
bosonic currents, their (possibly non-canonical) ghost sectors, and the
checks relating the two ghost systems.
"""

from __future__ import annotations

from fractions import Fraction

from .analysis import substitute_expr
from .engine import OpeContext
from .fields import FieldError, FieldExpr, GeneratorDecl, Monomial, OpeAlgebra
from .scalars import RationalFunction as RF

A2_MODES = ("exchange-consistent", "as-printed")


def _pval(value, name):
    """A parameter value: symbolic when None, else an exact rational."""
    if value is None:
        return RF.var(name), True
    return RF.const(Fraction(value)), False


def _gen(alg, name):
    return FieldExpr.generator(alg, name)


def rebase_expr(expr: FieldExpr, algebra: OpeAlgebra) -> FieldExpr:
    """The same linear combination of monomials read in another algebra."""
    out = {}
    for m, v in expr.terms.items():
        for name, _ in m.factors:
            algebra.decl(name)
        out[Monomial(m.factors)] = v
    return FieldExpr(algebra, out)


# -- matter algebras -------------------------------------------------------


def w3(c=None, a2_mode="exchange-consistent") -> OpeAlgebra:
    """Virasoro plus a weight-3 primary current, with the first-pole
    self-product coefficient a2 chosen by ``a2_mode``.

    The printed sources give a2 = (2/9) a1; that value is not consistent
    with the exchange property of the self-product and is kept only as
    the "as-printed" variant (validate_table flags it).  The consistent
    value is a2 = a1/2 - 1/12.
    """
    if a2_mode not in A2_MODES:
        raise ValueError(f"a2_mode must be one of {A2_MODES}")
    cc, symbolic = _pval(c, "c")
    alg = OpeAlgebra("w3", [
        GeneratorDecl("T", Fraction(2)),
        GeneratorDecl("W", Fraction(3)),
    ], params=("c",) if symbolic else ())
    t, w = _gen(alg, "T"), _gen(alg, "W")
    unit = FieldExpr.unit(alg)
    scratch = OpeContext(alg)
    alg.set_ope("T", "T", {4: unit.scaled(cc / RF.const(2)),
                           2: t.scaled(2), 1: scratch.derivative(t)})
    alg.set_ope("T", "W", {2: w.scaled(3), 1: scratch.derivative(w)})
    a = RF.const(32) / (RF.const(22) + RF.const(5) * cc)
    a1 = (RF.const(3) * cc - RF.const(6)) / (RF.const(44) + RF.const(10) * cc)
    if a2_mode == "as-printed":
        a2 = a1 * RF.const(Fraction(2, 9))
    else:
        a2 = a1 / RF.const(2) - RF.const(Fraction(1, 12))
    tt = scratch.normal_product(t, t)
    d3t = scratch.derivative(t, 3)
    alg.set_ope("W", "W", {
        6: unit.scaled(cc / RF.const(3)),
        4: t.scaled(2),
        3: scratch.derivative(t),
        2: scratch.derivative(t, 2).scaled(a1) + tt.scaled(a),
        1: d3t.scaled(a2) + scratch.derivative(tt).scaled(a / RF.const(2)),
    })
    return alg.freeze()


def w32(c=None) -> OpeAlgebra:
    """Four bosonic currents of weights 2, 1, 3/2, 3/2 with quadratic
    terms in the product of the two weight-3/2 currents."""
    cc, symbolic = _pval(c, "c")
    alg = OpeAlgebra("w32", [
        GeneratorDecl("T", Fraction(2)),
        GeneratorDecl("U", Fraction(1)),
        GeneratorDecl("Gp", Fraction(3, 2)),
        GeneratorDecl("Gm", Fraction(3, 2)),
    ], params=("c",) if symbolic else ())
    t, u = _gen(alg, "T"), _gen(alg, "U")
    gp, gm = _gen(alg, "Gp"), _gen(alg, "Gm")
    unit = FieldExpr.unit(alg)
    sc = OpeContext(alg)
    one = RF.const(1)
    alg.set_ope("T", "T", {
        4: unit.scaled(cc * (RF.const(7) - RF.const(9) * cc)
                       / (RF.const(2) * (one + cc))),
        2: t.scaled(2), 1: sc.derivative(t)})
    alg.set_ope("T", "U", {2: u, 1: sc.derivative(u)})
    alg.set_ope("T", "Gp", {2: gp.scaled(Fraction(3, 2)), 1: sc.derivative(gp)})
    alg.set_ope("T", "Gm", {2: gm.scaled(Fraction(3, 2)), 1: sc.derivative(gm)})
    alg.set_ope("U", "Gp", {1: gp})
    alg.set_ope("U", "Gm", {1: gm.scaled(-1)})
    alg.set_ope("U", "U", {2: unit.scaled(cc)})
    alg.set_ope("Gp", "Gm", {
        3: unit.scaled((RF.const(2) * cc - RF.const(6) * cc * cc) / (one + cc)),
        2: u.scaled((RF.const(2) - RF.const(6) * cc) / (one + cc)),
        1: t.scaled(2)
           - sc.normal_product(u, u).scaled(RF.const(4) / (one + cc))
           + sc.derivative(u).scaled((one - RF.const(3) * cc) / (one + cc)),
    })
    return alg.freeze()


# -- ghost sectors ---------------------------------------------------------


def w3_ghosts(g1=None, g2=None) -> OpeAlgebra:
    """The two-parameter quadratic ghost sector for the spin-(2,3) pair.
    Symbolic parameters by default; g1 = g2 = 0 is the canonical sector."""
    gv1, s1 = _pval(g1, "g1")
    gv2, s2 = _pval(g2, "g2")
    params = tuple(n for n, s in (("g1", s1), ("g2", s2)) if s)
    alg = OpeAlgebra("w3_ghosts", [
        GeneratorDecl("bT", Fraction(2), 1, -1),
        GeneratorDecl("cT", Fraction(-1), 1, 1),
        GeneratorDecl("bW", Fraction(3), 1, -1),
        GeneratorDecl("cW", Fraction(-2), 1, 1),
    ], params=params)
    unit = FieldExpr.unit(alg)
    bt, ct = _gen(alg, "bT"), _gen(alg, "cT")
    bw, cw = _gen(alg, "bW"), _gen(alg, "cW")
    sc = OpeContext(alg)
    btcw = sc.normal_product(bt, cw)
    alg.set_ope("bT", "cT", {1: unit})
    alg.set_ope("bW", "cW", {1: unit})
    alg.set_ope("cT", "bW", {
        2: btcw.scaled(gv1),
        1: sc.derivative(btcw).scaled(gv2)
           + sc.normal_product(bt, sc.derivative(cw)).scaled(gv1)})
    alg.set_ope("cT", "cT", {
        1: sc.normal_product(sc.derivative(cw), cw).scaled(gv1 + gv2)})
    alg.set_ope("bW", "bW", {
        1: sc.normal_product(sc.derivative(bt), bt).scaled(gv1 - gv2)})
    return alg.freeze()


def w32_ghosts(modified=True) -> OpeAlgebra:
    """The fermionic ghost sector for the weight-(2, 1, 3/2, 3/2)
    algebra: the fixed quadratic one, or the canonical one."""
    alg = OpeAlgebra("w32_ghosts" if modified else "w32_ghosts_canonical", [
        GeneratorDecl("bT", Fraction(2), 1, -1),
        GeneratorDecl("cT", Fraction(-1), 1, 1),
        GeneratorDecl("bU", Fraction(1), 1, -1),
        GeneratorDecl("cU", Fraction(0), 1, 1),
        GeneratorDecl("cp", Fraction(-1, 2), 1, 1),
        GeneratorDecl("bp", Fraction(3, 2), 1, -1),
        GeneratorDecl("cm", Fraction(-1, 2), 1, 1),
        GeneratorDecl("bm", Fraction(3, 2), 1, -1),
    ])
    unit = FieldExpr.unit(alg)
    for b, c in (("bT", "cT"), ("bU", "cU"), ("bp", "cp"), ("bm", "cm")):
        alg.set_ope(b, c, {1: unit})
    if modified:
        sc = OpeContext(alg)
        ct, bu = _gen(alg, "cT"), _gen(alg, "bU")
        cp, cm = _gen(alg, "cp"), _gen(alg, "cm")
        ctbu = sc.normal_product(ct, bu)
        alg.set_ope("bT", "cU", {
            2: ctbu.scaled(-2),
            1: sc.normal_product(ct, sc.derivative(bu)).scaled(-4)
               + sc.normal_product(sc.derivative(ct), bu).scaled(-2)})
        alg.set_ope("bT", "bT", {
            1: sc.normal_product(sc.derivative(bu), bu).scaled(-4)})
        alg.set_ope("cU", "cU", {1: sc.normal_product(cp, cm).scaled(-8)})
        alg.set_ope("cU", "bp", {1: sc.normal_product(bu, cm).scaled(4)})
        alg.set_ope("cU", "bm", {1: sc.normal_product(bu, cp).scaled(-4)})
    return alg.freeze()


# -- combined algebras -----------------------------------------------------


def bundle(name, *parts) -> OpeAlgebra:
    """Disjoint union of tables; unset cross pairs are regular."""
    gens = []
    params = []
    for part in parts:
        gens.extend(part.generators)
        for p in part.params:
            if p not in params:
                params.append(p)
    alg = OpeAlgebra(name, gens, params=tuple(params))
    for part in parts:
        for (a, b), poles in part.table_items():
            alg.set_ope(a, b, {n: rebase_expr(e, alg)
                               for n, e in poles.items()})
    return alg.freeze()


# -- ghost stress tensor and the two-sector correspondence ----------------


def ghost_stress(ctx: OpeContext, pairs, fields=None) -> FieldExpr:
    """sum over (b, c) pairs of (1 - w_b) (db c) - w_b (b dc), the stress
    tensor making c and b primary of weights 1 - w_b and w_b."""
    alg = ctx.algebra
    fields = fields or {}
    out = FieldExpr.zero(alg)
    for bname, cname in pairs:
        lam = alg.decl(bname).weight
        b = fields.get(bname, _gen(alg, bname))
        c = fields.get(cname, _gen(alg, cname))
        out = out + ctx.normal_product(ctx.derivative(b), c).scaled(
            RF.const(1 - lam))
        out = out - ctx.normal_product(b, ctx.derivative(c)).scaled(
            RF.const(lam))
    return out


def ghost_stress_w3(ctx: OpeContext, fields=None) -> FieldExpr:
    return ghost_stress(ctx, (("bT", "cT"), ("bW", "cW")), fields)


def _compare_to_table(ctx, fields, reference: OpeAlgebra, label):
    """Operator products of the composite ``fields`` against the table of
    ``reference`` evaluated on its own generators."""
    issues = []
    ref_ctx = reference.context()
    names = list(fields)
    z = FieldExpr.zero(ctx.algebra)
    for x in names:
        for y in names:
            got = ctx.ope(fields[x], fields[y])
            want = {n: rebase_expr(e, ctx.algebra) for n, e in ref_ctx.ope(
                _gen(reference, x), _gen(reference, y)).items()}
            for n in sorted(set(got) | set(want), reverse=True):
                if not (got.get(n, z) - want.get(n, z)).is_zero:
                    issues.append(f"{label}: ope {x} {y} pole {n} mismatch")
    return issues


def verify_ghost_transform_w3():
    """The inverse ghost map: composites in the two-parameter sector that
    obey the canonical contractions, plus invariance of the ghost stress
    tensor when g1 = 0.  Returns (ok, issues)."""
    tilde = w3_ghosts()
    ctx = tilde.context()
    g1, g2 = RF.var("g1"), RF.var("g2")
    bt, ct = _gen(tilde, "bT"), _gen(tilde, "cT")
    bw, cw = _gen(tilde, "bW"), _gen(tilde, "cW")
    half = RF.const(Fraction(1, 2))
    fields = {
        "bT": bt,
        "cT": ct - ctx.normal_product(
            bt, ctx.normal_product(ctx.derivative(cw), cw)).scaled(
                (g1 + g2) * half),
        "bW": bw - ctx.normal_product(
            ctx.derivative(bt), ctx.normal_product(bt, cw)).scaled(
                (g1 - g2) * half),
        "cW": cw,
    }
    issues = _compare_to_table(ctx, fields, w3_ghosts(0, 0),
                               "canonical composite")
    t_tilde = ghost_stress_w3(ctx)
    t_composite = ghost_stress_w3(ctx, fields)
    diff = substitute_expr(t_composite - t_tilde, {"g1": 0})
    if not diff.is_zero:
        issues.append("ghost stress tensor changes at g1 = 0")
    return not issues, issues


def verify_ghost_transform_w32():
    """Composites in the canonical fermionic sector reproducing the fixed
    quadratic ghost table.  Returns (ok, issues)."""
    canon = w32_ghosts(modified=False)
    ctx = canon.context()
    ct, bu = _gen(canon, "cT"), _gen(canon, "bU")
    cp, cm = _gen(canon, "cp"), _gen(canon, "cm")
    fields = {name: _gen(canon, name)
              for name in ("cT", "bU", "cp", "bp", "cm", "bm")}
    fields["bT"] = _gen(canon, "bT") - ctx.normal_product(
        ct, ctx.normal_product(ctx.derivative(bu), bu)).scaled(2)
    fields["cU"] = _gen(canon, "cU") - ctx.normal_product(
        bu, ctx.normal_product(cp, cm)).scaled(4)
    issues = _compare_to_table(ctx, fields, w32_ghosts(modified=True),
                               "quadratic composite")
    return not issues, issues
