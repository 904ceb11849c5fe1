"""Definition-file and expression parsing: round trips, conventions,
and error reporting."""

from fractions import Fraction

import pytest

from conftest import ALG_FILES, QLA_FILES, load_alg, read_data
from wbrst.fields import FieldExpr
from wbrst.parsing import (ParseError, format_algebra_file, format_field_expr,
                           format_monomial, parse_algebra_file,
                           parse_coefficient, parse_field_expr, parse_qla_file)
from wbrst.scalars import RF_ONE, RationalFunction as RF


@pytest.mark.parametrize("name", ALG_FILES)
def test_algebra_file_round_trip(name):
    alg = load_alg(name)
    text = format_algebra_file(alg)
    again = parse_algebra_file(text)
    assert again.name == alg.name
    assert again.params == alg.params
    assert [g.name for g in again.generators] == [g.name for g in alg.generators]
    table1 = {k: v for k, v in alg.table_items()}
    table2 = {k: v for k, v in again.table_items()}
    assert set(table1) == set(table2)
    for key in table1:
        poles1, poles2 = table1[key], table2[key]
        assert set(poles1) == set(poles2), key
        for n in poles1:
            assert format_field_expr(poles1[n]) == format_field_expr(poles2[n])


@pytest.mark.parametrize("name", ALG_FILES)
def test_format_is_deterministic(name):
    alg = load_alg(name)
    assert format_algebra_file(alg) == format_algebra_file(load_alg(name))


def test_coefficient_round_trip():
    from wbrst.scalars import format_rational
    cases = [
        RF.const(Fraction(-3, 7)),
        RF.var("c"),
        (RF.var("c") + RF.const(1)) / (RF.var("c") - RF.const(2)),
        RF.var("g1") * RF.var("g2") - RF.const(Fraction(16, 261)),
    ]
    for v in cases:
        assert parse_coefficient(format_rational(v)) == v


def test_field_expr_round_trip():
    alg = load_alg("w3.alg")
    ctx = alg.context()
    t = FieldExpr.generator(alg, "T")
    w = FieldExpr.generator(alg, "W")
    exprs = [
        t,
        ctx.derivative(t, 2),
        ctx.normal_product(t, t).scaled(RF.var("c")),
        ctx.normal_product(t, ctx.normal_product(t, w)) - w.scaled(3),
    ]
    for e in exprs:
        assert parse_field_expr(format_field_expr(e), alg, ctx=ctx) == e


def test_monomial_formatting_right_nested():
    alg = load_alg("w3.alg")
    ctx = alg.context()
    t = FieldExpr.generator(alg, "T")
    ttt = ctx.normal_product(t, ctx.normal_product(t, t))
    assert any(format_monomial(m) == "N(T,N(T,T))" for m in ttt.terms)


def test_parse_error_reports_line_and_column():
    with pytest.raises(ParseError) as exc:
        parse_field_expr("T + %", load_alg("w3.alg"))
    assert exc.value.column is not None

    bad = "algebra x\nfield T weight=2\nope T T : 1 -> Q\n"
    with pytest.raises(ParseError) as exc:
        parse_algebra_file(bad)
    assert exc.value.line == 3


def test_unknown_directive_rejected():
    with pytest.raises(ParseError):
        parse_algebra_file("algebra x\nfrobnicate y\n")
    with pytest.raises(ParseError):
        parse_qla_file("dim 2\nwhatever 1\n")


def test_qla_one_based_indices():
    d, tw = parse_qla_file(read_data("so3.qla"))
    assert d.n == 3
    # file line `c 1 2 3 = 1` lands on key (upper, lower, lower) = (2, 0, 1)
    assert d.c.get((2, 0, 1)) == RF_ONE
    assert d.c.get((2, 1, 0)) == -RF_ONE


def test_qla_phi_modes():
    from wbrst.tensors import lie_super_twist, super_permutation
    d, tw = parse_qla_file(read_data("super_ef.qla"))
    phi, _ = lie_super_twist(d.parities)
    assert tw.phi.items() == phi.items()
    d2, tw2 = parse_qla_file(read_data("lyubashenko.qla"))
    assert tw2.phi.items() == d2.sigma.items()
    d3, tw3 = parse_qla_file("dim 2\nsigma 1 2 2 1 = 1\nsigma 2 1 1 2 = 1\n"
                             "sigma 1 1 1 1 = 1\nsigma 2 2 2 2 = 1\n")
    assert tw3.phi.items() == super_permutation((0, 0)).items()


def test_qla_missing_dim_rejected():
    with pytest.raises(ParseError):
        parse_qla_file("parities e e\n")


def test_qla_parity_length_mismatch():
    with pytest.raises(ParseError):
        parse_qla_file("dim 3\nparities e e\n")


@pytest.mark.parametrize("name", QLA_FILES)
def test_qla_files_parse(name):
    d, tw = parse_qla_file(read_data(name))
    assert d.n >= 2
    assert len(d.parities) == d.n


def test_comments_and_blank_lines_ignored():
    text = read_data("w3.alg") + "\n# trailing comment\n\n"
    alg = parse_algebra_file(text)
    assert alg.name == load_alg("w3.alg").name


def test_def_substitution():
    text = ("algebra d\nparam c\nfield T weight=2\n"
            "def k = c / 2\n"
            "ope T T : 4 -> k*one ; 2 -> 2*T ; 1 -> D(T)\n")
    alg = parse_algebra_file(text)
    pole4 = alg.table_entry("T", "T")[0][4]
    from wbrst.fields import UNIT
    assert pole4.terms[UNIT] == RF.var("c") / 2
