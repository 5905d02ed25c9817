"""Class-expression grammar: parse, canonical printing, evaluation."""

import pytest

from cohomtc.classexpr import (
    ClassExprError,
    context_for_group,
    parse_class_expr,
    print_class_expr,
)
from cohomtc.groups import make_cyclic, make_klein_four, make_quaternion

ROUND_TRIP = [
    "xL",
    "v1",
    "v1_pulled",
    "xL + yR",
    "tau_x^2*yR + tau_x*tau_y*xL",
    "(xL + xR)^2",
    "xL xR yL",          # implicit products
    "xL(yL + yR)",
    "((xL))",
    "xL^2^3",
]


@pytest.mark.parametrize("text", ROUND_TRIP)
def test_parse_print_fixed_point(text):
    node = parse_class_expr(text)
    printed = print_class_expr(node)
    assert parse_class_expr(printed) == node
    # and printing is stable
    assert print_class_expr(parse_class_expr(printed)) == printed


def test_implicit_and_explicit_products_agree():
    assert parse_class_expr("xL yR") == parse_class_expr("xL*yR")
    assert parse_class_expr("xL(yL + yR)") == parse_class_expr("xL*(yL + yR)")


def test_macros_expand():
    from cohomtc.spaces import V_CLASS_EXPRS

    for name, expansion in V_CLASS_EXPRS.items():
        assert parse_class_expr(name) == parse_class_expr(expansion)


ERRORS = [
    ("tau_x * (xL + yR", 16),     # unbalanced parenthesis
    ("", 0),                      # empty input
    ("xL + ", 5),                 # dangling operator
    ("xL ^", 4),                  # missing exponent
]


@pytest.mark.parametrize("text,pos", ERRORS)
def test_errors_report_byte_positions(text, pos):
    with pytest.raises(ClassExprError) as exc:
        parse_class_expr(text)
    assert exc.value.position == pos


def test_unknown_generator_rejected():
    with pytest.raises(ClassExprError):
        parse_class_expr("zL + xR")


def test_evaluate_over_klein_square(ws):
    from cohomtc.spaces import klein_square_classes

    ctx = context_for_group(ws, make_klein_four())
    _, v = klein_square_classes(ws)
    for i in (1, 2, 3):
        d, z = ctx.evaluate(parse_class_expr(f"v{i}"))
        assert d == 3 and z == v[i]
    d0, z0 = ctx.evaluate(parse_class_expr("xL + xL"))
    assert d0 == 1 and z0.is_zero()


def test_evaluate_respects_ring_relations(ws):
    """Over the square of Q8, the left-factor copies of the generators
    satisfy the base-ring relations."""
    ctx = context_for_group(ws, make_quaternion(1))
    d, z = ctx.evaluate(parse_class_expr("xL^2 + xL*yL + yL^2"))
    assert d == 2 and z.is_zero()
    d, z = ctx.evaluate(parse_class_expr("xL^2 yL + xL yL^2"))
    assert d == 3 and z.is_zero()


def test_evaluate_pulled_classes(ws):
    from cohomtc.spaces import (
        QuaternionRingData,
        klein_square_classes,
        pull_to_quaternion_square,
    )

    ctx = context_for_group(ws, make_quaternion(1))
    ring = QuaternionRingData(ws, 1)
    _, v = klein_square_classes(ws, ring.x_V, ring.y_source)
    d, z = ctx.evaluate(parse_class_expr("v1_pulled"))
    assert d == 3
    assert z == pull_to_quaternion_square(ws, ring, v[1])


def test_inhomogeneous_sum_rejected(ws):
    ctx = context_for_group(ws, make_klein_four())
    with pytest.raises(ClassExprError):
        ctx.evaluate(parse_class_expr("xL + xL^2"))


def test_pulled_macro_needs_quaternion_context(ws):
    ctx = context_for_group(ws, make_klein_four())
    with pytest.raises(ClassExprError):
        ctx.evaluate(parse_class_expr("v1_pulled"))


def test_context_rejects_other_groups(ws):
    with pytest.raises(ValueError):
        context_for_group(ws, make_cyclic(2))
