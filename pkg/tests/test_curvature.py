import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpsasakian.connection import ConnectionParams, generalized_connection, levi_civita
from lpsasakian.curvature import (
    EINSTEIN,
    ETA_EINSTEIN,
    GENERALIZED_ETA_EINSTEIN,
    NO_CLASS,
    RankDeficiencyError,
    classify,
    curvature_closed_form,
    curvature_suite,
    eta_einstein_fit,
    lemma3_residuals,
    lemma5_residuals,
    ricci,
    ricci_closed_form,
    ricci_semisymmetry_residual,
    ricci_suite,
    riemann,
    semisymmetry_suite,
    theorem44_verify,
)
from lpsasakian.report import FAIL, MEASURED, NOT_APPLICABLE, PASS, VACUOUS
from lpsasakian.structure import build_example3

from .conftest import DEFAULT_GRID, SQUARE_GRID

P = (0.1, 0.2, 0.3)


def printed_ok(a, b):
    """The printed closed forms agree with direct curvature exactly when beta(beta - alpha) = 0."""
    return b * (b - a) == 0


# ---------------------------------------------------------------- oracles


def test_lc_riemann_values(ex3):
    lc = levi_civita(ex3)
    np.testing.assert_allclose(riemann(lc, 0, 1, 1, P).components, [1, 0, 0], atol=1e-12)
    np.testing.assert_allclose(riemann(lc, 0, 2, 2, P).components, [-1, 0, 0], atol=1e-12)


@pytest.mark.parametrize("a, b", DEFAULT_GRID + [(2.0, 0.5)])
def test_generalized_r13_xi(ex3, a, b):
    direct = riemann(generalized_connection(ex3, (a, b)), 0, 2, 2, P).components
    np.testing.assert_allclose(direct, [-(1 - b + a), 0, 0], atol=1e-12)
    printed = -(1 - b + b * b) - a * (1 - b)
    assert (abs(direct[0] - printed) <= 1e-12) == printed_ok(a, b)


def test_first_slot_antisymmetry(ex3):
    conn = generalized_connection(ex3, (0.7, -1.3))
    U = np.array([0.2, -0.5, 1.0])
    assert np.max(np.abs(riemann(conn, U, U, 1, P).components)) <= 1e-12


def test_closed_form_at_zero_is_lc(ex3):
    U, V, W = np.eye(3)
    assert np.allclose(curvature_closed_form(ex3, (0, 0), U, V, W, P).components,
                       riemann(levi_civita(ex3), U, V, W, P).components, atol=1e-12)


def test_lc_ricci_and_trace(ex3):
    rd = ricci(levi_civita(ex3), ex3, P)
    np.testing.assert_allclose(rd.s_bar, np.diag([2.0, 2.0, -2.0]), atol=1e-12)
    assert rd.trace_phi == -2.0
    assert rd.scalar == pytest.approx(6.0)


def test_semisymmetric_connection_ricci(ex3):
    rd = ricci(generalized_connection(ex3, (1, 0)), ex3, P)
    np.testing.assert_allclose(rd.s_bar, np.diag([6.0, 6.0, -4.0]), atol=1e-12)
    assert ricci_closed_form(ex3, (1, 0), 2, 2, P) == pytest.approx(-4.0)
    assert ricci_closed_form(ex3, (1, 0), 2, 2, P, corrected=True) == pytest.approx(-4.0)


@pytest.mark.parametrize("a, b", [(0.0, 1.0), (0.7, -1.3)])
def test_printed_ricci_eta_block_differs(ex3, a, b):
    direct = ricci(generalized_connection(ex3, (a, b)), ex3, P).s_bar[2, 2]
    assert ricci_closed_form(ex3, (a, b), 2, 2, P, corrected=True) == pytest.approx(direct, abs=1e-12)
    assert abs(ricci_closed_form(ex3, (a, b), 2, 2, P) - direct) > 0.1


def test_non_orthonormal_frame_rejected():
    from lpsasakian.frame import ManifoldError, ManifoldSpec

    s = build_example3()
    G = np.array([[2.0, 0, 0], [0, 1, 0], [0, 0, -1]])
    bad = s.replace(spec=ManifoldSpec(s.spec.coordinates, s.spec.frame, G))
    with pytest.raises(ManifoldError):
        ricci(levi_civita(bad), bad, P)


def test_eta_einstein_fit_of_lc(ex3):
    S = ricci(levi_civita(ex3), ex3, P).s_bar
    fit = eta_einstein_fit(ex3, S[None], np.array([P]))
    assert (fit.a, fit.b, fit.c) == pytest.approx((2.0, 0.0, 0.0), abs=1e-7)
    assert fit.classification == EINSTEIN


def test_fit_on_xi_pair_only_is_rank_deficient(ex3):
    S = ricci(levi_civita(ex3), ex3, P).s_bar
    with pytest.raises(RankDeficiencyError):
        eta_einstein_fit(ex3, S[None], np.array([P]), pairs=[((0, 0, 1), (0, 0, 1))])


def test_classification_thresholds():
    assert classify(2, 0, 0, 0) == EINSTEIN
    assert classify(2, 1, 0, 0) == ETA_EINSTEIN
    assert classify(2, 1, 1, 0) == GENERALIZED_ETA_EINSTEIN
    assert classify(2, 0, 0, 1.0) == NO_CLASS
    assert classify(2, 5e-8, -5e-8, 0) == EINSTEIN


def test_semisymmetry_values(ex3):
    assert ricci_semisymmetry_residual(ex3, (0, 0)) <= 1e-9
    assert ricci_semisymmetry_residual(ex3, (1, 0)) == pytest.approx(4.0)


# ---------------------------------------------------------------- suites


@pytest.mark.parametrize("a, b", DEFAULT_GRID)
def test_curvature_suite(ex3, a, b):
    rep = curvature_suite(ex3, (a, b), seed=11)
    assert rep["closed_form_corrected"].status == PASS
    assert rep["first_slot_antisymmetry"].status == PASS
    assert rep["closed_form"].status == (PASS if printed_ok(a, b) else FAIL)
    assert "printed_closed_form_inconsistent" in rep["closed_form"].flags
    for i in rep.ids():
        if i.startswith("lc_"):
            assert rep[i].status == PASS


@pytest.mark.parametrize("a, b", SQUARE_GRID)
def test_corrected_closed_form_on_square_grid(ex3, a, b):
    assert curvature_suite(ex3, (a, b), seed=1, count=16)["closed_form_corrected"].status == PASS


@pytest.mark.parametrize("a, b", DEFAULT_GRID)
def test_lemma3(ex3, a, b):
    rep = lemma3_residuals(ex3, (a, b), seed=12)
    for i in ("r_bar_uv_xi", "r_bar_xi_v_w", "r_bar_xi_v_xi"):
        assert rep[i + "_corrected"].status == PASS
        assert rep[i].status == (PASS if printed_ok(a, b) else FAIL)
    assert "curvature_minus_a_read_as_alpha" in rep["r_bar_xi_v_w"].flags


@pytest.mark.parametrize("a, b", DEFAULT_GRID)
def test_ricci_suite(ex3, a, b):
    rep = ricci_suite(ex3, (a, b), seed=13)
    for i in ("weighted_equals_trace", "symmetry", "closed_form_corrected"):
        assert rep[i].status == PASS
    assert rep["closed_form"].status == (PASS if printed_ok(a, b) else FAIL)


@pytest.mark.parametrize("a, b", DEFAULT_GRID)
def test_lemma5(ex3, a, b):
    rep = lemma5_residuals(ex3, (a, b), seed=14)
    for i in ("s_bar_v_xi", "s_bar_phi_phi"):
        assert rep[i + "_corrected"].status == PASS


def test_lemma5_quarter_symmetric_coefficient(ex3):
    # (0, 1): printed coefficient (n-1)(1 - 1 + 1) = 2 while S(nu1, xi) = 0 = 2 eta(nu1) either way
    rep = lemma5_residuals(ex3, (0, 1))
    assert rep["s_bar_v_xi_corrected"].status == PASS


def test_semisymmetry_suite_is_measured(ex3):
    assert semisymmetry_suite(ex3, (1, 1))["ricci_semisymmetric"].status == MEASURED


def test_theorem44_at_levi_civita(ex3):
    rep = theorem44_verify(ex3, (0, 0), seed=15)
    assert rep["semisymmetric"].max_residual <= 1e-9
    for i in ("ricc", "etkkk", "ricc_corrected", "etkkk_corrected", "soni_corrected", "branch_soniii"):
        assert rep[i].status == PASS, i
    assert rep["eta_einstein_fit"].status == PASS


def test_theorem44_degenerate_branch(ex3):
    rep = theorem44_verify(ex3, (1, 0))
    assert rep["semisymmetric"].max_residual == pytest.approx(4.0)
    assert rep["branch_soniii"].status == NOT_APPLICABLE
    assert "degenerate_branch" in rep["branch_soniii"].flags


def test_degenerate_branch_is_vacuous_where_semisymmetric(ex3):
    # alpha = -1 also zeroes 1 - alpha^2, and here the example is semi-symmetric
    rep = theorem44_verify(ex3, (-1, 0))
    assert rep["semisymmetric"].max_residual <= 1e-9
    assert rep["branch_soniii"].status == VACUOUS
    assert "degenerate_branch" in rep["branch_soniii"].flags


def test_branch_selection():
    from lpsasakian.curvature import _branch

    assert _branch(ConnectionParams(1, 0)) == ("soniii", 0.0)
    assert _branch(ConnectionParams(0, 0.5))[0] == "sonii"
    assert _branch(ConnectionParams(0.7, -1.3))[0] == "soni"


@pytest.mark.parametrize("a, b", [(0.0, 1.0), (1.0, 1.0)])
def test_theorem44_chain_where_semisymmetric(ex3, a, b):
    rep = theorem44_verify(ex3, (a, b))
    assert rep["semisymmetric"].max_residual <= 1e-9
    for i in ("ricc_corrected", "etkkk_corrected", "soni_corrected"):
        assert rep[i].status == PASS
    assert rep["soni"].status == FAIL  # printed form
    assert rep["ricc"].status == (FAIL if (a, b) == (0.0, 1.0) else PASS)


def test_theorem44_not_applicable_off_semisymmetry(ex3):
    rep = theorem44_verify(ex3, (0, 0.5))
    assert rep["branch_sonii"].status == NOT_APPLICABLE
    assert "beta_branch_gYV_read_as_gYU" in rep["branch_sonii"].flags


# ---------------------------------------------------------------- properties

params = st.tuples(st.floats(-2, 2), st.floats(-2, 2))
vecs = st.tuples(*(st.floats(-1, 1) for _ in range(3))).map(np.array)


@settings(max_examples=30, deadline=None)
@given(params, vecs, vecs, vecs)
def test_corrected_closed_form_equals_direct(ab, U, V, W):
    s = build_example3()
    direct = riemann(generalized_connection(s, ab), U, V, W, P).components
    closed = curvature_closed_form(s, ab, U, V, W, P, corrected=True).components
    assert np.max(np.abs(direct - closed)) <= 1e-9 * (1 + max(map(abs, ab))) ** 2


@settings(max_examples=30, deadline=None)
@given(params)
def test_ricci_is_symmetric(ab):
    s = build_example3()
    S = ricci(generalized_connection(s, ab), s, P).s_bar
    assert np.max(np.abs(S - S.T)) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(params, vecs, vecs)
def test_corrected_ricci_closed_form_equals_contraction(ab, U, V):
    s = build_example3()
    S = ricci(generalized_connection(s, ab), s, P).s_bar
    assert abs(U @ S @ V - ricci_closed_form(s, ab, U, V, P, corrected=True)) <= 1e-9 * (1 + max(map(abs, ab))) ** 2
