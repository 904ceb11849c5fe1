"""Structural checks on operator product tables and expressions.

Graded bases, total-derivative tests, Jacobi identities, central charge
and primariness extraction, and sign automorphisms of a table.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .engine import OpeContext
from .fields import FieldExpr, Monomial, OpeAlgebra
from .linalg import solve
from .scalars import RF_ONE, RF_ZERO, RationalFunction


class AnalysisError(Exception):
    pass


def substitute_expr(expr: FieldExpr, bindings: dict) -> FieldExpr:
    return FieldExpr(expr.algebra,
                     {m: v.substitute(bindings) for m, v in expr.terms.items()})


# -- graded bases ----------------------------------------------------------


def weight_basis(algebra: OpeAlgebra, weight, parity=None, ghost=None):
    """All canonical monomials of the given total weight, optionally
    filtered by parity and ghost number.

    The set is finite exactly when every generator admitting a factor of
    non-positive weight is odd (each such factor can then appear at most
    once); otherwise an AnalysisError is raised.
    """
    weight = Fraction(weight)
    nonpos = []
    pos_weights = []
    for g in algebra.generators:
        if g.weight <= 0 and not g.parity:
            raise AnalysisError(
                f"even generator {g.name!r} of non-positive weight makes "
                "the fixed-weight basis infinite")
        d = 0
        while g.weight + d <= 0:
            nonpos.append((g.name, d))
            d += 1
    nonpos.sort(key=algebra.factor_key)

    results = []

    def pos_extend(chosen, min_key, rem):
        if rem == 0:
            mono = Monomial(sorted(chosen, key=algebra.factor_key))
            results.append(mono)
            return
        if rem < 0:
            return
        for g in algebra.generators:
            gi = algebra.index(g.name)
            d = 0
            while g.weight + d <= 0:
                d += 1
            while g.weight + d <= rem:
                f = (g.name, d)
                key = (gi, d)
                if key >= min_key:
                    nxt = (gi, d) if not g.parity else (gi, d + 1)
                    pos_extend(chosen + [f], nxt, rem - (g.weight + d))
                d += 1

    for mask in range(1 << len(nonpos)):
        subset = [nonpos[i] for i in range(len(nonpos)) if mask >> i & 1]
        s = sum((algebra.factor_weight(f) for f in subset), Fraction(0))
        pos_extend(subset, (-1, 0), weight - s)

    out = []
    seen = set()
    for m in results:
        if m in seen:
            continue
        seen.add(m)
        if parity is not None and algebra.mono_parity(m) != parity:
            continue
        if ghost is not None and algebra.mono_ghost(m) != ghost:
            continue
        out.append(m)
    out.sort(key=algebra.mono_key)
    return out


# -- total derivatives -----------------------------------------------------


def is_total_derivative(ctx: OpeContext, expr: FieldExpr):
    """(True, preimage) when expr equals the derivative of some field of
    one weight less with the same parity and ghost number."""
    alg = ctx.algebra
    if expr.is_zero:
        return True, FieldExpr.zero(alg)
    w, p, g = expr.weight(), expr.parity(), expr.ghost()
    if w is None or p is None or g is None:
        raise AnalysisError("expression is not homogeneous")
    basis = weight_basis(alg, w - 1, parity=p, ghost=g)
    images = [ctx.derivative(FieldExpr(alg, {m: RF_ONE})) for m in basis]
    target = set(expr.terms)
    for im in images:
        target.update(im.terms)
    target = sorted(target, key=alg.mono_key)
    matrix = [[im.coefficient(t) for im in images] for t in target]
    rhs = [expr.coefficient(t) for t in target]
    x = solve(matrix, rhs, RF_ZERO, RF_ONE)
    if x is None:
        return False, None
    pre = FieldExpr.zero(alg)
    for m, k in zip(basis, x):
        pre = pre + FieldExpr(alg, {m: RF_ONE}).scaled(k)
    return True, pre


# -- identities ------------------------------------------------------------


def jacobi_check(ctx: OpeContext, a: FieldExpr, b: FieldExpr, c: FieldExpr):
    """Residuals of the pole-bracket Jacobi identity; empty list = pass."""
    pa, pb = a.parity(), b.parity()
    if pa is None or pb is None:
        raise AnalysisError("arguments must have definite parity")
    sign = -1 if pa and pb else 1
    ab, ac, bc = ctx.ope(a, b), ctx.ope(a, c), ctx.ope(b, c)
    t1 = {q: ctx.ope(a, e) for q, e in bc.items()}
    t2 = {p: ctx.ope(b, e) for p, e in ac.items()}
    t3 = {l: ctx.ope(e, c) for l, e in ab.items()}
    top = 1
    for d in (ab, ac, bc):
        top = max(top, max(d, default=0))
    for sub in (*t1.values(), *t2.values(), *t3.values()):
        top = max(top, max(sub, default=0))
    bad = []
    z = FieldExpr.zero(ctx.algebra)
    for p in range(1, 2 * top + 1):
        for q in range(1, 2 * top + 1):
            r = z
            for qq, sub in t1.items():
                if qq == q and p in sub:
                    r = r + sub[p]
            for pp, sub in t2.items():
                if pp == p and q in sub:
                    r = r - sub[q].scaled(sign)
            for l, sub in t3.items():
                m = p + q - l
                if m in sub and l <= p:
                    r = r - sub[m].scaled(comb(p - 1, l - 1))
            if not r.is_zero:
                bad.append((p, q, r))
    return bad


def central_charge(ctx: OpeContext, t: FieldExpr) -> RationalFunction:
    """Twice the fourth-pole coefficient of the self-product of a
    stress tensor candidate."""
    poles = ctx.ope(t, t)
    for n in poles:
        if n > 4:
            raise AnalysisError(f"self-product has a pole of order {n} > 4")
    top = poles.get(4)
    if top is None:
        return RF_ZERO
    from .fields import UNIT
    if set(top.terms) != {UNIT}:
        raise AnalysisError("fourth pole is not proportional to the identity")
    return top.terms[UNIT] + top.terms[UNIT]


def primary_check(ctx: OpeContext, t: FieldExpr, x: FieldExpr, weight=None):
    """Is x primary of the given weight with respect to t?"""
    if weight is None:
        weight = x.weight()
    poles = ctx.ope(t, x)
    issues = []
    for n, e in poles.items():
        if n > 2:
            issues.append(f"pole {n} nonzero")
    if poles.get(2, FieldExpr.zero(ctx.algebra)) != x.scaled(weight):
        issues.append("second pole is not weight * field")
    if poles.get(1, FieldExpr.zero(ctx.algebra)) != ctx.derivative(x):
        issues.append("first pole is not the derivative")
    return not issues, issues


# -- table validation ------------------------------------------------------


def validate_table(algebra: OpeAlgebra):
    """Grading and self-pair exchange consistency of the stored table.

    Returns a list of human-readable issues; an empty list means the
    table is consistent.
    """
    issues = []
    ctx = algebra.context()
    for (a, b), poles in algebra.table_items():
        da, db = algebra.decl(a), algebra.decl(b)
        for n, expr in poles.items():
            want_w = da.weight + db.weight - n
            want_p = (da.parity + db.parity) % 2
            want_g = da.ghost + db.ghost
            for m in expr.terms:
                if algebra.mono_weight(m) != want_w:
                    issues.append(
                        f"ope {a} {b} pole {n}: weight of {m.factors} is "
                        f"{algebra.mono_weight(m)}, expected {want_w}")
                if algebra.mono_parity(m) != want_p:
                    issues.append(f"ope {a} {b} pole {n}: parity mismatch")
                if algebra.mono_ghost(m) != want_g:
                    issues.append(f"ope {a} {b} pole {n}: ghost number mismatch")
        if a == b:
            flipped = ctx._flip(poles, da.parity, da.parity)
            keys = set(poles) | set(flipped)
            z = FieldExpr.zero(algebra)
            for n in sorted(keys):
                diff = poles.get(n, z) - flipped.get(n, z)
                if not diff.is_zero:
                    issues.append(
                        f"ope {a} {a} pole {n}: not self-exchange consistent, "
                        f"residual {diff!r}")
    return issues


# -- automorphisms ---------------------------------------------------------


def transform_signs(expr: FieldExpr, signs: dict) -> FieldExpr:
    out = {}
    for m, v in expr.terms.items():
        s = 1
        for name, _ in m.factors:
            s *= signs.get(name, 1)
        out[m] = v if s == 1 else -v
    return FieldExpr(expr.algebra, out)


def apply_automorphism(algebra: OpeAlgebra, signs: dict):
    """Check that flipping the signs of the listed generators preserves
    the table.  Returns (ok, issues)."""
    for name, s in signs.items():
        algebra.decl(name)
        if s not in (1, -1):
            raise AnalysisError("signs must be +1 or -1")
    issues = []
    for (a, b), poles in algebra.table_items():
        s = signs.get(a, 1) * signs.get(b, 1)
        for n, expr in poles.items():
            mapped = transform_signs(expr, signs)
            if mapped != (expr if s == 1 else -expr):
                issues.append(f"ope {a} {b} pole {n} breaks the sign map")
    return not issues, issues
