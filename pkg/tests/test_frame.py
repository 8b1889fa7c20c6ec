import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpsasakian.expr import parse_expression
from lpsasakian.frame import (
    DomainViolation,
    FrameField,
    ManifoldError,
    ManifoldSpec,
    VectorValue,
    directional_derivative,
    frame_matrix,
    inner,
    lie_bracket,
)

points = st.tuples(*(st.floats(-0.95, 0.95) for _ in range(3))).map(np.array)
coeffs = st.tuples(*(st.floats(-2, 2) for _ in range(3))).map(np.array)


def test_signature_and_lorentzian(ex3):
    assert ex3.spec.signature == (1, 1, -1)
    assert ex3.spec.is_lorentzian
    assert ex3.spec.dimension == 3


@pytest.mark.parametrize("p", [(0, 0, 0), (0.3, -0.2, 0.9), (-1, 1, -1)])
def test_brackets_of_example_frame(ex3, p):
    np.testing.assert_allclose(lie_bracket(ex3.spec, 0, 2, p).components, [-1, 0, 0], atol=1e-12)
    np.testing.assert_allclose(lie_bracket(ex3.spec, 0, 1, p).components, [0, 0, 0], atol=1e-12)
    np.testing.assert_allclose(lie_bracket(ex3.spec, 1, 2, p).components, [0, -1, 0], atol=1e-12)


def test_inner_products(ex3):
    assert inner(ex3.spec, 2, 2) == -1.0
    assert inner(ex3.spec, 0, 1) == 0.0


def test_directional_derivative_examples(ex3, origin):
    assert directional_derivative(ex3.spec, "exp(z)", 2, origin) == pytest.approx(1.0)
    assert directional_derivative(ex3.spec, "y", 0, origin) == pytest.approx(1.0)


def test_point_outside_domain_rejected(ex3):
    with pytest.raises(DomainViolation):
        lie_bracket(ex3.spec, 0, 1, (2.0, 0, 0))


def test_spec_rejects_bad_metrics():
    one = parse_expression("1")
    zero = parse_expression("0")
    frame = ((one, zero), (zero, one))
    with pytest.raises(ManifoldError, match="degenerate"):
        ManifoldSpec(("x", "y"), frame, np.ones((2, 2)))
    with pytest.raises(ManifoldError, match="symmetric"):
        ManifoldSpec(("x", "y"), frame, np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(ManifoldError, match="dimension mismatch"):
        ManifoldSpec(("x", "y", "z"), frame, np.eye(2))


@settings(max_examples=40, deadline=None)
@given(points, coeffs, coeffs)
def test_bracket_antisymmetry(ex3, p, X, Y):
    s = ex3.spec
    r = lie_bracket(s, X, Y, p).components + lie_bracket(s, Y, X, p).components
    assert np.max(np.abs(r)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(points)
def test_jacobi_identity_on_frame_triples(ex3, p):
    s = ex3.spec

    # [X, [Y, Z]] needs [Y, Z] as a field: for this frame the structure functions are constant
    def br(i, j):
        return FrameField.of(s, lie_bracket(s, i, j, p).components)

    total = sum(
        lie_bracket(s, i, br(j, k), p).components for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
    )
    assert np.max(np.abs(total)) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(points, coeffs, coeffs)
def test_leibniz_rule_for_brackets(ex3, p, X, Y):
    s = ex3.spec
    f = parse_expression("x*y + sin(z)")
    Yf = FrameField.of(s, Y)
    lhs = lie_bracket(s, X, Yf.scaled(f), p).components
    fp = float(f(x=p[0], y=p[1], z=p[2]))
    rhs = directional_derivative(s, f, X, p) * Y + fp * lie_bracket(s, X, Y, p).components
    assert np.max(np.abs(lhs - rhs)) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(points, coeffs)
def test_frame_coordinate_round_trip(ex3, p, X):
    v = VectorValue(X)
    back = v.to_coordinates(ex3.spec, p).to_frame(ex3.spec, p).components
    assert np.max(np.abs(back - X)) <= 1e-12 * max(1.0, np.max(np.abs(X)))


@settings(max_examples=30, deadline=None)
@given(points, coeffs, st.floats(-1, 1), st.floats(-1, 1))
def test_directional_derivative_matches_finite_difference(ex3, p, X, shift_a, shift_b):
    s = ex3.spec
    f = parse_expression(f"x^3*y - {shift_a}*z^2*x + {shift_b}*y*z", s.coordinates)
    p = np.clip(p, -0.9, 0.9)
    d = frame_matrix(s, p[None])[0] @ X
    h = 1e-5
    fp = float(f(**dict(zip(s.coordinates, p + h * d))))
    fm = float(f(**dict(zip(s.coordinates, p - h * d))))
    assert abs(directional_derivative(s, f, X, p) - (fp - fm) / (2 * h)) <= 1e-7
