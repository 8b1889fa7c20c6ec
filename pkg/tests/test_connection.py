import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpsasakian.connection import (
    ConnectionAt,
    ConnectionParams,
    connection_suite,
    covariant_derivative,
    generalized_connection,
    levi_civita,
    metric_compatibility_residual,
    negative_control_connection,
    proposition_residuals,
    torsion,
    torsion_suite,
)
from lpsasakian.expr import parse_expression
from lpsasakian.frame import FrameField, directional_derivative

from .conftest import DEFAULT_GRID, SQUARE_GRID

# frozen tables: nabla_{nu_i} nu_j as frame components, indexed [i][j]
LC_TABLE = np.array(
    [
        [[0, 0, -1], [0, 0, 0], [-1, 0, 0]],
        [[0, 0, 0], [0, 0, -1], [0, -1, 0]],
        [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    ],
    dtype=float,
)


def generalized_table(a, b):
    k = -1 - a + b
    return np.array(
        [
            [[0, 0, k], [0, 0, 0], [k, 0, 0]],
            [[0, 0, 0], [0, 0, k], [0, k, 0]],
            [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
        ]
    )


POINTS = [(0.0, 0.0, 0.0), (0.4, -0.7, 0.9), (-1.0, 1.0, -1.0)]


@pytest.mark.parametrize("p", POINTS)
def test_levi_civita_table(ex3, p):
    conn = levi_civita(ex3)
    got = np.array([[covariant_derivative(conn, i, j, p).components for j in range(3)] for i in range(3)])
    assert np.max(np.abs(got - LC_TABLE)) <= 1e-12


@pytest.mark.parametrize("a, b", DEFAULT_GRID + [(2.0, -3.0)])
def test_generalized_table(ex3, a, b):
    conn = generalized_connection(ex3, (a, b))
    for p in POINTS:
        got = conn.coefficients(np.array([p]))[0]
        assert np.max(np.abs(got - generalized_table(a, b))) <= 1e-12


def test_zero_parameters_give_levi_civita(ex3):
    pts = np.array(POINTS)
    np.testing.assert_array_equal(
        generalized_connection(ex3, (0, 0)).coefficients(pts), levi_civita(ex3).coefficients(pts)
    )


@pytest.mark.parametrize("a, b", [(0.0, 0.0), (1.0, 0.0), (0.3, 2.0)])
def test_torsion_of_nu1_nu3(ex3, a, b):
    td = torsion(generalized_connection(ex3, (a, b)), 0, 2, (0.1, 0.2, 0.3))
    np.testing.assert_allclose(td.torsion_value.components, [b - a, 0, 0], atol=1e-12)
    np.testing.assert_allclose(td.model_value.components, [b - a, 0, 0], atol=1e-12)


def test_lc_torsion_vanishes(ex3):
    for i in range(3):
        for j in range(3):
            assert np.max(np.abs(torsion(levi_civita(ex3), i, j, (0.2, 0.1, -0.5)).torsion_value.components)) <= 1e-12


def test_nabla_xi_along_nu1(ex3):
    a, b = 0.6, -0.4
    v = covariant_derivative(generalized_connection(ex3, (a, b)), 0, 2, (0, 0, 0)).components
    np.testing.assert_allclose(v, [b - 1 - a, 0, 0], atol=1e-12)


def test_metric_compatibility(ex3):
    assert metric_compatibility_residual(levi_civita(ex3)) <= 1e-12
    assert metric_compatibility_residual(generalized_connection(ex3, (2, -3))) <= 1e-9


def test_negative_control_is_not_metric(ex3):
    assert metric_compatibility_residual(negative_control_connection(ex3)) > 0.1


def test_leibniz_in_second_argument(ex3):
    conn = generalized_connection(ex3, (0.5, 0.25))
    f = parse_expression("x*y")
    U, V = np.array([0.3, -1.0, 0.7]), np.array([1.0, 0.5, -0.2])
    p = np.array([0.4, -0.3, 0.2])
    lhs = covariant_derivative(conn, U, FrameField.of(ex3.spec, V).scaled(f), p).components
    fp = float(f(x=p[0], y=p[1]))
    rhs = directional_derivative(ex3.spec, f, U, p) * V + fp * covariant_derivative(conn, U, V, p).components
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_connection_from_other_structure_rejected(ex3):
    from lpsasakian.structure import build_example3

    other = build_example3()
    with pytest.raises(ValueError):
        ConnectionAt(levi_civita(ex3), other.at(np.zeros((1, 3))))


def test_params_validation():
    with pytest.raises(ValueError):
        ConnectionParams(float("nan"), 0)
    assert tuple(ConnectionParams(1, 2)) == (1.0, 2.0)


@pytest.mark.parametrize("a, b", DEFAULT_GRID)
def test_connection_suite_passes(ex3, a, b):
    rep = connection_suite(ex3, ConnectionParams(a, b), seed=1)
    assert rep.ok, str(rep)


@pytest.mark.parametrize("a, b", SQUARE_GRID)
def test_torsion_suite_on_square_grid(ex3, a, b):
    rep = torsion_suite(ex3, ConnectionParams(a, b), seed=2)
    assert rep.ok, str(rep)
    assert "torsion_model_phiY_read_as_phiU" in rep["torsion_model"].flags


@pytest.mark.parametrize("a, b", DEFAULT_GRID)
def test_proposition_closed_forms(ex3, a, b):
    assert proposition_residuals(ex3, (a, b), seed=4).ok


params = st.tuples(st.floats(-3, 3), st.floats(-3, 3))


@settings(max_examples=25, deadline=None)
@given(params, st.integers(0, 10_000))
def test_generalized_connection_is_metric_for_all_parameters(ex3, ab, seed):
    assert metric_compatibility_residual(generalized_connection(ex3, ab), seed, 8) <= 1e-9 * max(1, *map(abs, ab))


@settings(max_examples=25, deadline=None)
@given(params, st.integers(0, 10_000))
def test_difference_tensor_is_the_additive_part(ex3, ab, seed):
    rep = connection_suite(ex3, ConnectionParams(*ab), seed=seed, count=8)
    assert rep["difference_equals_h"].max_residual <= 1e-9 * max(1, *map(abs, ab))
