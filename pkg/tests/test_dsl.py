import random
from fractions import Fraction

import pytest

from ellsym.dsl import format_operator, format_system, parse_operator, parse_system
from ellsym.errors import (
    DimensionMismatchError,
    DslSyntaxError,
    DuplicateBlockError,
    NonHomogeneousRowError,
    UnknownComponentError,
)
from ellsym.operators import SystemSpec
from genops import random_operator

F = Fraction


def test_parse_scalar_divergence_row():
    op = parse_operator("rows: d1 f1 + d2 f2 + d3 f3", 3)
    assert (op.source_dim, op.target_dim) == (3, 1)
    assert op.coeffs[(1, 0, 0)] == ((F(1), F(0), F(0)),)
    assert op.coeffs[(0, 1, 0)] == ((F(0), F(1), F(0)),)
    assert op.coeffs[(0, 0, 1)] == ((F(0), F(0), F(1)),)
    assert op.order == 1


def test_parse_identity_row_zeroth_order():
    op = parse_operator("rows: f1", 2)
    assert op.coeffs == {(0, 0): ((F(1),),)}
    assert op.order == 0


def test_parse_quartic_rows_with_group():
    op = parse_operator("rows: (d1^4 + d2^4) u1; d3^4 u2; d4^4 u2", 4)
    assert (op.source_dim, op.target_dim) == (2, 3)
    assert op.row_degrees() == [4, 4, 4]
    assert op.coeffs[(4, 0, 0, 0)][0] == (F(1), F(0))
    assert op.coeffs[(0, 4, 0, 0)][0] == (F(1), F(0))
    assert op.coeffs[(0, 0, 4, 0)][1] == (F(0), F(1))
    assert op.coeffs[(0, 0, 0, 4)][2] == (F(0), F(1))


def test_parse_rational_coefficients_and_signs():
    op = parse_operator("rows: 2/3 d1^2 f1 - d2^2 f2; 4 f3", 2)
    assert op.coeffs[(2, 0)][0] == (F(2, 3), F(0), F(0))
    assert op.coeffs[(0, 2)][0] == (F(0), F(-1), F(0))
    assert op.coeffs[(0, 0)][1] == (F(0), F(0), F(4))
    assert op.row_degrees() == [2, 0]


def test_nonhomogeneous_row_rejected():
    with pytest.raises(NonHomogeneousRowError):
        parse_operator("rows: d1 f1 + f2", 2)


def test_unknown_component_rejected():
    with pytest.raises(UnknownComponentError):
        parse_operator("from 2 to 1\nrows: d1 f3", 2)


def test_syntax_error_carries_position():
    with pytest.raises(DslSyntaxError) as err:
        parse_operator("rows: d1 f1 +", 2)
    assert "line" in str(err.value)


def test_scalar_only_row_rejected():
    with pytest.raises(DslSyntaxError):
        parse_operator("rows: d1 + d2", 2)


def test_nonlinear_component_product_rejected():
    with pytest.raises(DslSyntaxError):
        parse_operator("rows: f1 f2", 2)


def test_group_powers():
    op = parse_operator("rows: (d1 + d2)^2 u1", 2)
    assert op.coeffs[(2, 0)] == ((F(1),),)
    assert op.coeffs[(1, 1)] == ((F(2),),)
    assert op.coeffs[(0, 2)] == ((F(1),),)


def test_comments_and_blank_lines():
    text = """
# leading comment
rows:   # trailing comment
  d1 u1;  # one row
  d2 u1
"""
    op = parse_operator(text, 2)
    assert op.target_dim == 2


def test_parse_system_divcurl():
    text = open("systems/divcurl_r3.sys").read()
    spec = parse_system(text)
    assert spec.n == 3
    assert (spec.a.source_dim, spec.a.target_dim) == (3, 4)
    assert (spec.c.source_dim, spec.c.target_dim) == (4, 1)


def test_parse_system_without_constraint():
    spec = parse_system("dim 2\noperator A {\nfrom 1 to 2\nrows: d1 u1; d2 u1\n}")
    assert spec.c is None


def test_parse_system_dimension_mismatch():
    text = """
dim 3
operator A { from 3 to 4 rows: d1 u1; d2 u2; d3 u3; d1 u2 }
constraint C { from 5 to 1 rows: d1 f1 }
"""
    with pytest.raises(DimensionMismatchError):
        parse_system(text)


def test_parse_system_duplicate_block():
    text = """
dim 2
operator A { from 1 to 1 rows: d1 u1 }
operator B { from 1 to 1 rows: d2 u1 }
"""
    with pytest.raises(DuplicateBlockError):
        parse_system(text)


def test_sig_row_count_mismatch():
    with pytest.raises(DimensionMismatchError):
        parse_operator("from 1 to 3\nrows: d1 u1; d2 u1", 2)


def test_parse_deterministic():
    text = "rows: d1 u1 + 1/2 d2 u2; d2 u1 - d1 u2"
    assert parse_operator(text, 2) == parse_operator(text, 2)


def test_roundtrip_random_specs():
    rng = random.Random(314)
    for _ in range(25):
        n = rng.randint(1, 3)
        op = random_operator(rng, n, rng.randint(1, 3), rng.randint(1, 3), max_degree=3)
        text = format_operator(op, letter=rng.choice("uf"))
        back = parse_operator(text, n)
        assert back == op, text


def test_roundtrip_system():
    rng = random.Random(271)
    for _ in range(10):
        n = rng.randint(1, 3)
        e_dim = rng.randint(1, 3)
        a = random_operator(rng, n, rng.randint(1, 3), e_dim, homogeneous=True)
        c = random_operator(rng, n, e_dim, rng.randint(1, 2))
        spec = SystemSpec(a, c, n)
        back = parse_system(format_system(spec))
        assert back.a == spec.a and back.c == spec.c and back.n == spec.n


def test_zero_row_roundtrip():
    op = parse_operator("from 2 to 2\nrows: 0 u1; d1 u1 + d2 u2", 2)
    assert op.target_dim == 2
    assert all(all(x == 0 for x in mat[0]) for mat in op.coeffs.values())
    assert parse_operator(format_operator(op), 2) == op
