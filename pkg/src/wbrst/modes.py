"""Fock-space mode oracle for free fermionic bc systems.

Independent cross-validation of the operator product engine: composite
fields are expanded into Laurent modes acting on explicit states, the
singular products are reconstructed from mode commutators, and the
resulting matrices are compared entry by entry with the engine output.
All arithmetic is exact over Fraction; parameterized tables must be
specialized to numbers before they reach the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .fields import FieldExpr, Monomial, UNIT
from .linalg import solve


class ModeError(Exception):
    pass


@dataclass(frozen=True)
class BcSystem:
    """A fermionic first-order pair: b of weight lam, c of weight 1 - lam,
    with b(z) c(w) ~ 1/(z - w), i.e. {b_m, c_n} = delta_{m+n,0}."""
    b: str
    c: str
    lam: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lam", Fraction(self.lam))

    def weight(self, name):
        if name == self.b:
            return self.lam
        if name == self.c:
            return 1 - self.lam
        raise ModeError(f"{name!r} is not part of this system")


class FockSlice:
    """States of the tensor product of bc Fock spaces, graded by level.

    The vacuum is SL(2)-invariant: a mode A_m annihilates it exactly when
    m > -h_A.  The basis holds all states of level 0 through L whose
    excitations come from the ``excite`` subset of systems (default all);
    operators may map basis states to arbitrary states outside the basis.
    """

    def __init__(self, systems, level, excite=None):
        self.systems = tuple(systems)
        self.level = Fraction(level)
        names = {}
        for i, s in enumerate(self.systems):
            for kind, name in enumerate((s.b, s.c)):
                if name in names:
                    raise ModeError(f"duplicate field name {name!r}")
                names[name] = (i, kind, s.weight(name))
        self._names = names
        self._conj = {}
        for s in self.systems:
            self._conj[s.b] = s.c
            self._conj[s.c] = s.b
        if excite is None:
            excite = self.systems
        self.excite = tuple(excite)
        self.basis = self._enumerate()
        self.index = {s: i for i, s in enumerate(self.basis)}
        self._lmin = self.min_level()
        self._cache = {}

    def weight(self, name) -> Fraction:
        try:
            return self._names[name][2]
        except KeyError:
            raise ModeError(f"unknown field {name!r}") from None

    def op_key(self, op):
        name, m = op
        i, kind, _ = self._names[name]
        return (i, kind, m)

    def is_creation(self, op) -> bool:
        name, m = op
        return m <= -self.weight(name)

    def level_of(self, state) -> Fraction:
        return -sum((m for _, m in state), Fraction(0))

    def min_level(self) -> Fraction:
        """The smallest level any state can have (c-type zero and
        negative-level creation modes pull below the vacuum)."""
        low = Fraction(0)
        for s in self.systems:
            for name in (s.b, s.c):
                h = s.weight(name)
                m = -h  # largest creation mode
                while m > 0:
                    low -= m
                    m -= 1
        return low

    def _enumerate(self):
        ops = []
        for s in self.excite:
            for name in (s.b, s.c):
                h = self._names[name][2]
                m = -h
                while -m <= self.level:
                    ops.append((name, m))
                    m -= 1
        ops.sort(key=self.op_key)
        out = []

        def extend(prefix, start, lvl):
            if 0 <= lvl <= self.level:
                out.append(tuple(prefix))
            for i in range(start, len(ops)):
                nxt = lvl - ops[i][1]
                # prune only when no later op can lower the level again
                if nxt <= self.level or any(o[1] > 0 for o in ops[i + 1:]):
                    extend(prefix + [ops[i]], i + 1, nxt)

        extend([], 0, Fraction(0))
        out.sort(key=lambda st: (self.level_of(st), len(st),
                                 tuple(self.op_key(o) for o in st)))
        return out

    # -- single mode application -------------------------------------------

    def apply_op(self, op, state):
        """X_m applied to one basis state; returns {state: Fraction}."""
        name, m = op
        h = self.weight(name)
        if (m + h) != int(m + h):
            return {}
        out = {}
        sign = 1
        conj = self._conj[name]
        for i, o in enumerate(state):
            if o[0] == conj and o[1] + m == 0:
                rest = state[:i] + state[i + 1:]
                out[rest] = out.get(rest, 0) + sign
            sign = -sign
        if self.is_creation(op):
            key = self.op_key(op)
            idx = 0
            dup = False
            for o in state:
                k = self.op_key(o)
                if k == key:
                    dup = True
                    break
                if k < key:
                    idx += 1
            if not dup:
                new = state[:idx] + (op,) + state[idx:]
                s = -1 if idx % 2 else 1
                out[new] = out.get(new, 0) + s
        return {k: Fraction(v) for k, v in out.items() if v}


@dataclass
class ModeMatrix:
    """Sparse operator matrix: basis state -> {output state: value}."""
    mode: Fraction
    columns: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, ModeMatrix):
            return NotImplemented
        return self.mode == other.mode and self.columns == other.columns

    def first_difference(self, other):
        for s in set(self.columns) | set(other.columns):
            a = self.columns.get(s, {})
            b = other.columns.get(s, {})
            for o in set(a) | set(b):
                if a.get(o, 0) != b.get(o, 0):
                    return (s, o, a.get(o, 0), b.get(o, 0))
        return None

    @property
    def is_zero(self):
        return all(not col for col in self.columns.values())


# -- composite modes -------------------------------------------------------


def _mono_weight(slc, mono):
    return sum((slc.weight(n) + d for n, d in mono.factors), Fraction(0))


def _apply_factor(slc, factor, m, state):
    name, d = factor
    h = slc.weight(name)
    coeff = Fraction(1)
    for i in range(d):
        coeff *= -m - h - i
    if coeff == 0:
        return {}
    out = slc.apply_op((name, m), state)
    return {s: coeff * v for s, v in out.items()}


def _apply_mono(slc, factors, m, state):
    """Mode m of the right-nested normal product of factors, applied to
    one state.  Uses the standard composite-mode double sum with the
    first factor split at its weight.  Memoized on the slice."""
    if not factors:
        return {state: Fraction(1)} if m == 0 else {}
    if len(factors) == 1:
        return _apply_factor(slc, factors[0], m, state)
    key = (factors, m, state)
    hit = slc._cache.get(key)
    if hit is not None:
        return hit
    head, rest = factors[0], factors[1:]
    ha = slc.weight(head[0]) + head[1]
    sign = -1 if (len(rest) % 2) else 1
    lmin = slc._lmin
    lvl = slc.level_of(state)
    out = {}

    def acc(target, k):
        for s, v in target.items():
            cur = out.get(s, 0) + v * k
            if cur:
                out[s] = cur
            else:
                out.pop(s, None)

    # creation part of the head: p <= -ha, applied after the tail
    p = -ha
    while m - p <= lvl - lmin:
        mid = _apply_mono(slc, rest, m - p, state)
        for s, v in mid.items():
            acc(_apply_factor(slc, head, p, s), v)
        p -= 1
    # annihilation part of the head goes first, with the exchange sign
    p = -ha + 1
    while p <= lvl - lmin:
        mid = _apply_factor(slc, head, p, state)
        for s, v in mid.items():
            acc(_apply_mono(slc, rest, m - p, s), sign * v)
        p += 1
    out = {s: v for s, v in out.items() if v}
    slc._cache[key] = out
    return out


def _const(v) -> Fraction:
    if not v.is_constant:
        raise ModeError("oracle needs numeric coefficients; substitute "
                        "parameters first")
    return v.constant_value()


def field_modes(x, m, slc: FockSlice) -> ModeMatrix:
    """Matrix of the m-th Laurent mode of a monomial or field expression
    on the slice basis."""
    m = Fraction(m)
    if isinstance(x, Monomial):
        terms = {x: Fraction(1)}
    else:
        terms = {mono: _const(v) for mono, v in x.terms.items()}
    cols = {}
    for state in slc.basis:
        col = {}
        for mono, k in terms.items():
            for s, v in _apply_mono(slc, mono.factors, m, state).items():
                cur = col.get(s, 0) + k * v
                if cur:
                    col[s] = cur
                else:
                    col.pop(s, None)
        cols[state] = col
    return ModeMatrix(m, cols)


# -- singular products from commutators ------------------------------------


def _gbinom(x: Fraction, j: int) -> Fraction:
    out = Fraction(1)
    for i in range(j):
        out *= x - i
    return out / factorial(j)


def ope_poles_from_modes(a, b, r, slc: FockSlice, max_pole=8) -> dict:
    """All pole matrices of the product of a and b at total mode r,
    reconstructed from mode commutators alone.

    The graded commutator [a_p, b_q] equals
    sum_j binom(p + h_a - 1, j) ([ab]_{j+1})_{p+q}; varying p at fixed
    p + q = r gives a linear system solved for the pole-field matrices.
    ``max_pole`` bounds the number of unknown poles; an inconsistent
    overdetermined system (a pole above the bound) raises ModeError.
    Returns {n: ModeMatrix} for n = 1 .. max_pole.
    """
    ha = _expr_weight(slc, a)
    pa = _expr_parity(a)
    pb = _expr_parity(b)
    csign = -1 if pa and pb else 1  # graded commutator sign
    r = Fraction(r)
    nun = max_pole
    samples = [-ha + i - nun // 2 for i in range(nun + 3)]
    lhs = []
    for p in samples:
        q = r - p
        com = {}
        for state in slc.basis:
            col = {}
            _mat_acc(col, _chain(slc, a, p, b, q, state), Fraction(1))
            _mat_acc(col, _chain(slc, b, q, a, p, state), Fraction(-csign))
            com[state] = col
        lhs.append(com)
    # solve column by column for the pole matrices
    poles = {j: {} for j in range(nun)}
    mat = [[_gbinom(p + ha - 1, j) for j in range(nun)] for p in samples]
    for state in slc.basis:
        outs = set()
        for com in lhs:
            outs.update(com[state])
        for o in sorted(outs, key=lambda st: tuple(slc.op_key(x) for x in st)):
            rhs = [com[state].get(o, Fraction(0)) for com in lhs]
            x = solve(mat, rhs, Fraction(0), Fraction(1))
            if x is None:
                raise ModeError("mode commutators need more poles than "
                                f"max_pole={max_pole}")
            for j, v in enumerate(x):
                if v:
                    poles[j].setdefault(state, {})[o] = v
    return {j + 1: ModeMatrix(r, {s: poles[j].get(s, {}) for s in slc.basis})
            for j in range(nun)}


def ope_from_modes(a, b, n, r, slc: FockSlice, max_pole=8) -> ModeMatrix:
    """Matrix of the mode r of the n-th pole of the product of a and b,
    reconstructed from mode commutators; see ope_poles_from_modes."""
    if not 1 <= n <= max_pole:
        raise ModeError("pole order out of range")
    return ope_poles_from_modes(a, b, r, slc, max_pole=max_pole)[n]


def _chain(slc, x2, m2, x1, m1, state):
    """(x2)_{m2} (x1)_{m1} applied to one state."""
    first = field_modes_single(slc, x1, m1, state)
    out = {}
    for s, v in first.items():
        for s2, v2 in field_modes_single(slc, x2, m2, s).items():
            cur = out.get(s2, 0) + v * v2
            if cur:
                out[s2] = cur
            else:
                out.pop(s2, None)
    return out


def field_modes_single(slc, x, m, state):
    if isinstance(x, Monomial):
        return _apply_mono(slc, x.factors, Fraction(m), state)
    out = {}
    for mono, v in x.terms.items():
        k = _const(v)
        for s, w in _apply_mono(slc, mono.factors, Fraction(m), state).items():
            cur = out.get(s, 0) + k * w
            if cur:
                out[s] = cur
            else:
                out.pop(s, None)
    return out


def _mat_acc(col, add, k):
    for s, v in add.items():
        cur = col.get(s, 0) + k * v
        if cur:
            col[s] = cur
        else:
            col.pop(s, None)


def _expr_weight(slc, x):
    if isinstance(x, Monomial):
        return _mono_weight(slc, x)
    ws = {_mono_weight(slc, m) for m in x.terms}
    if len(ws) != 1:
        raise ModeError("expression must have a single weight")
    return ws.pop()


def _expr_parity(x):
    if isinstance(x, Monomial):
        return len(x.factors) % 2
    ps = {len(m.factors) % 2 for m in x.terms}
    if len(ps) != 1:
        raise ModeError("expression must have a single parity")
    return ps.pop()


# -- engine comparison ------------------------------------------------------


def systems_from_algebra(algebra) -> tuple:
    """Read the bc pairs off a frozen table of pure delta-function
    contractions: every stored product must be a single first-order pole
    equal to the unit."""
    pairs = []
    seen = set()
    for (a, b), poles in algebra.table_items():
        if a == b or not poles:
            continue
        unit = FieldExpr.unit(algebra)
        if set(poles) != {1} or poles[1] != unit:
            raise ModeError(f"product {a} {b} is not a free contraction")
        da, db = algebra.decl(a), algebra.decl(b)
        if not (da.parity and db.parity):
            raise ModeError("only fermionic systems are supported")
        if da.weight + db.weight != 1:
            raise ModeError(f"weights of {a}, {b} do not sum to one")
        bn, cn = (a, b) if da.weight >= db.weight else (b, a)
        if bn in seen or cn in seen:
            raise ModeError("field appears in two contractions")
        seen.update((bn, cn))
        pairs.append(BcSystem(bn, cn, algebra.decl(bn).weight))
    pairs.sort(key=lambda s: algebra.index(s.b))
    return tuple(pairs)


def crosscheck(algebra, pairs, level, excite=None, modes=(0, 1, -1)) -> dict:
    """Compare engine poles with mode-commutator reconstructions for each
    pair of fields, as matrices on the slice.  Returns a JSON-friendly
    report; ``ok`` is True when every matrix matches exactly."""
    systems = systems_from_algebra(algebra)
    if excite is not None:
        by_name = {s.b: s for s in systems} | {s.c: s for s in systems}
        excite = tuple(dict.fromkeys(by_name[n] for n in excite))
    slc = FockSlice(systems, level, excite=excite)
    ctx = algebra.context()
    report = {"level": str(slc.level), "states": len(slc.basis),
              "checks": [], "ok": True}
    for x, y in pairs:
        xe = x if isinstance(x, FieldExpr) else FieldExpr(algebra, {x: _rf1()})
        ye = y if isinstance(y, FieldExpr) else FieldExpr(algebra, {y: _rf1()})
        engine = ctx.ope(xe, ye)
        top = max(engine, default=0) + 2
        label = f"[{_label(x)} {_label(y)}]"
        hsum = _expr_weight(slc, xe) + _expr_weight(slc, ye)
        for m0 in modes:
            r = -(hsum - 1) + m0  # on the mode lattice of every pole field
            try:
                oracle = ope_poles_from_modes(xe, ye, r, slc, max_pole=top)
            except ModeError as err:
                report["ok"] = False
                report["checks"].append({"pair": label, "mode": str(r),
                                         "match": False, "error": str(err)})
                continue
            for n in range(1, top + 1):
                if n in engine:
                    wanted = field_modes(engine[n], r, slc)
                else:
                    wanted = ModeMatrix(r, {s: {} for s in slc.basis})
                entry = {"pair": label, "pole": n, "mode": str(r)}
                diff = oracle[n].first_difference(wanted)
                if diff is None:
                    entry["match"] = True
                else:
                    s, o, ov, ev = diff
                    entry["match"] = False
                    entry["state"] = repr(s)
                    entry["output"] = repr(o)
                    entry["oracle"] = str(ov)
                    entry["engine"] = str(ev)
                    report["ok"] = False
                report["checks"].append(entry)
    return report


def crosscheck_bundle(algebra, level, modes=(0,)) -> dict:
    """Run crosscheck over a standard pair list for each bc system of a
    free algebra, one single-system slice at a time: contraction,
    derivative, ghost current and stress tensor products.  The merged
    report also lists the per-system stress central charges."""
    from .algebras import ghost_stress
    systems = systems_from_algebra(algebra)
    ctx = algebra.context()
    merged = {"level": str(Fraction(level)), "ok": True, "systems": [],
              "checks": []}
    for s in systems:
        b = FieldExpr(algebra, {Monomial(((s.b, 0),)): _rf1()})
        c = FieldExpr(algebra, {Monomial(((s.c, 0),)): _rf1()})
        bc = ctx.normal_product(b, c)
        t = ghost_stress(ctx, [(s.b, s.c)])
        pairs = [(Monomial(((s.b, 0),)), Monomial(((s.c, 0),))),
                 (Monomial(((s.b, 1),)), Monomial(((s.c, 0),))),
                 (bc, bc), (t, b), (t, c), (t, t)]
        rep = crosscheck(algebra, pairs, level,
                         excite=[s.b, s.c], modes=modes)
        cc = stress_central_charge(t, s, level=2)
        merged["systems"].append({"b": s.b, "c": s.c,
                                  "weight": str(s.lam),
                                  "states": rep["states"],
                                  "central_charge": str(cc)})
        merged["checks"].extend(rep["checks"])
        merged["ok"] = merged["ok"] and rep["ok"]
    return merged


def stress_central_charge(t, system, level=2) -> Fraction:
    """Twice the vacuum coefficient of the fourth pole of the stress
    self-product, reconstructed from mode commutators alone."""
    slc = FockSlice([system], level)
    m4 = ope_from_modes(t, t, 4, 0, slc, max_pole=6)
    return 2 * m4.columns[()].get((), Fraction(0))


def _rf1():
    from .scalars import RF_ONE
    return RF_ONE


def _label(x):
    if isinstance(x, Monomial):
        return "*".join(n + "'" * d for n, d in x.factors)
    from .parsing import format_field_expr
    return format_field_expr(x)
