import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpsasakian.frame import ManifoldSpec
from lpsasakian.report import FAIL, PASS
from lpsasakian.structure import (
    build_example3,
    phi_form,
    phi_rank,
    trace_phi,
    verify_lc_curvature_identities,
    verify_lp_axioms,
)

AXIOM_IDS = ["eta_xi", "phi_square", "metric_compat_phi", "nabla_xi", "nabla_phi",
             "eta_closed_2_10", "phi_xi_zero", "eta_phi_zero"]


def _failures(structure):
    return [e.identity_id for e in verify_lp_axioms(structure).entries if e.status == FAIL]


def _with_metric(st_, i, j, value):
    G = np.diag([1.0, 1.0, -1.0])
    G[i, j] = G[j, i] = value
    return st_.replace(spec=ManifoldSpec(st_.spec.coordinates, st_.spec.frame, G))


def test_example_passes_axioms_exactly(ex3):
    rep = verify_lp_axioms(ex3, seed=3, count=64)
    assert rep.ids() == AXIOM_IDS
    for e in rep.entries:
        assert e.status == PASS
        assert e.max_residual <= 1e-12


def test_lc_curvature_identities_hold(ex3):
    rep = verify_lc_curvature_identities(ex3, seed=5)
    assert all(e.max_residual <= 1e-9 for e in rep.entries)


def test_example_values(ex3, origin):
    sa = ex3.at(origin[None])
    assert sa.eta(np.array([[0.0, 0.0, 1.0]]))[0] == -1.0
    np.testing.assert_allclose(sa.phi(sa.phi(np.array([[1.0, 0, 0]]))), [[1.0, 0, 0]])
    assert phi_form(ex3, 0, 0, origin) == -1.0
    assert phi_form(ex3, 2, 2, origin) == 0.0
    assert trace_phi(ex3, origin) == -2.0
    assert phi_rank(ex3, origin) == 2


@pytest.mark.parametrize(
    "corrupt",
    [
        pytest.param(lambda s: s.replace(phi=((-1, 1e-3, 0), (0, -1, 0), (0, 0, 0))), id="phi"),
        pytest.param(lambda s: s.replace(xi=(0, 1e-3, 1)), id="xi"),
        pytest.param(lambda s: _with_metric(s, 2, 2, -1.001), id="g_timelike_norm"),
        pytest.param(lambda s: _with_metric(s, 0, 2, 1e-3), id="g_mixing"),
    ],
)
def test_small_corruptions_are_detected(ex3, corrupt):
    assert _failures(corrupt(ex3))


def test_spacelike_rescaling_is_not_a_corruption(ex3):
    # scaling g on the phi-eigenspace keeps an LP-Sasakian structure
    assert _failures(_with_metric(ex3, 0, 0, 1.001)) == []


def test_doubled_xi_fails_normalization(ex3):
    rep = verify_lp_axioms(ex3.replace(xi=(0, 0, 2)))
    assert rep["eta_xi"].status == FAIL
    assert rep["eta_xi"].max_residual == pytest.approx(3.0)  # eta(xi) = -4


def test_identity_phi_fails_square_law(ex3):
    assert "phi_square" in _failures(ex3.replace(phi=np.eye(3).tolist()))


def test_open_eta_marks_closedness_not_applicable(ex3):
    from lpsasakian.structure import LPStructure

    open_st = LPStructure(ex3.spec, ex3.phi, ex3.xi, closed_eta=False)
    assert verify_lp_axioms(open_st)["eta_closed_2_10"].status == "not_applicable"


vectors = st.tuples(*(st.floats(-3, 3) for _ in range(3)))
points = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))


@settings(max_examples=50, deadline=None)
@given(vectors, vectors, points)
def test_phi_form_symmetric_and_kills_xi(U, V, p):
    s = build_example3()
    assert abs(phi_form(s, U, V, p) - phi_form(s, V, U, p)) <= 1e-12 * (1 + np.abs(U).max() * np.abs(V).max())
    assert phi_form(s, U, (0, 0, 1), p) == 0.0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_axioms_pass_for_any_seed(seed):
    assert verify_lp_axioms(build_example3(), seed=seed, count=8).ok
