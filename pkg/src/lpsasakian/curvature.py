"""Curvature, Ricci tensors and the semi-symmetry classification.

Conventions: ``R(U, V)W = nabla_U nabla_V W - nabla_V nabla_U W - nabla_[U,V] W``
and ``R[N, i, j, k, l]`` is the ``nu_l`` component of ``R(nu_i, nu_j) nu_k``.

Several printed closed forms (the K1/K2/K3 decomposition, the three
xi-curvature formulas, the Ricci closed form and its consequences) are
evaluated exactly as printed; each has a ``*_corrected`` companion derived
by direct expansion, which is what the numbers actually satisfy.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .connection import (
    Connection,
    ConnectionAt,
    ConnectionParams,
    generalized_connection,
    levi_civita,
)
from .frame import ManifoldError, VectorValue, as_frame_vector, orthonormal_signature
from .report import (
    DEFAULT_SAMPLES,
    EXACT_TOL,
    IDENTITY_TOL,
    MEASURED,
    NOT_APPLICABLE,
    VACUOUS,
    ZERO_THRESHOLD,
    IdentityReport,
    Sampler,
    max_norm,
)
from .structure import LPStructure, StructureAt, verify_lc_curvature_identities

CHAIN_TOL = 1e-8

EINSTEIN = "Einstein"
ETA_EINSTEIN = "EtaEinstein"
GENERALIZED_ETA_EINSTEIN = "GeneralizedEtaEinstein"
NO_CLASS = "None"


def _params(params) -> ConnectionParams:
    return params if isinstance(params, ConnectionParams) else ConnectionParams(*params)


# ---------------------------------------------------------------------------
# tensors


def riemann_tensor(ca: ConnectionAt) -> np.ndarray:
    """``R[N, i, j, k, l]`` from the coefficient jets and structure functions."""
    gam = ca.gamma
    c = ca.sa.c.val
    G = gam.val
    dG = ca.sa.frame_deriv(gam)  # [N, j, k, l, i] = nu_i(Gamma_jkl)
    return (
        np.einsum("Njkli->Nijkl", dG)
        - np.einsum("Niklj->Nijkl", dG)
        + np.einsum("Njkm,Niml->Nijkl", G, G)
        - np.einsum("Nikm,Njml->Nijkl", G, G)
        - np.einsum("Nijm,Nmkl->Nijkl", c, G)
    )


def ricci_tensor(ca: ConnectionAt) -> np.ndarray:
    """``S[N, j, k]``: the trace of ``X -> R(X, nu_j) nu_k``."""
    return np.einsum("Nijki->Njk", riemann_tensor(ca))


def weighted_ricci(R: np.ndarray, G: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """``sum_i eps_i g(R(nu_i, .) ., nu_i)`` for an orthonormal frame."""
    return np.einsum("i,Nijkl,li->Njk", eps, R, G)


def _apply3(R, A, B, C):
    return np.einsum("Ni,Nj,Nk,Nijkl->Nl", A, B, C, R)


def _apply2(S, A, B):
    return np.einsum("Ni,Nj,Nij->N", A, B, S)


def riemann(conn: Connection, U, V, W, p) -> VectorValue:
    """``R(U, V)W`` at ``p`` for constant frame combinations."""
    pt = np.reshape(np.asarray(p, dtype=float), (1, -1))
    ca = conn.at(pt)
    spec = conn.structure.spec
    u, v, w = (as_frame_vector(spec, X, p)[None] for X in (U, V, W))
    return VectorValue(_apply3(riemann_tensor(ca), u, v, w)[0])


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class CoefficientForms:
    """Values of K1(V,W), K2(V,W) and K3(U,V)W."""

    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray


def coefficient_forms(sa: StructureAt, params, U, V, W, corrected: bool = False) -> CoefficientForms:
    """K1(V,W), K2(V,W), K3(U,V)W as printed, or the corrected forms.

    The corrected K1 drops the ``-beta^2`` from the eta-eta coefficient and
    the corrected K2 gains ``alpha beta eta(V)eta(W)``.
    """
    a, b = _params(params)
    g, eta, Phi = sa.g, sa.eta, sa.Phi
    ee = eta(V) * eta(W)
    if corrected:
        k1 = (a * b - a) * Phi(V, W) + a * a * g(V, W) + (a * a + b) * ee
        k2 = (b * b - 2 * b) * Phi(V, W) - a * (1 - b) * g(V, W) + a * b * ee
    else:
        k1 = (a * b - a) * Phi(V, W) + a * a * g(V, W) + (a * a + b - b * b) * ee
        k2 = (b * b - 2 * b) * Phi(V, W) - a * (1 - b) * g(V, W)
    k3 = ((a * a + b) * g(V, W) + a * b * Phi(V, W)) * eta(U)
    return CoefficientForms(k1, k2, k3)


def closed_form_batch(sa: StructureAt, R_lc, params, U, V, W, corrected: bool = False) -> np.ndarray:
    """``R + K1(V,W)U - K1(U,W)V + K2(V,W)phi U - K2(U,W)phi V + {K3(U,V)W - K3(V,U)W} xi``."""
    kv = coefficient_forms(sa, params, U, V, W, corrected)
    ku = coefficient_forms(sa, params, V, U, W, corrected)
    out = _apply3(R_lc, U, V, W)
    out = out + kv.k1[:, None] * U - ku.k1[:, None] * V
    out = out + kv.k2[:, None] * sa.phi(U) - ku.k2[:, None] * sa.phi(V)
    return out + sa.xi_times(kv.k3 - ku.k3)


def curvature_closed_form(st: LPStructure, params, U, V, W, p, corrected: bool = False) -> VectorValue:
    pt = np.reshape(np.asarray(p, dtype=float), (1, -1))
    sa = st.at(pt)
    R = riemann_tensor(ConnectionAt(levi_civita(st), sa))
    u, v, w = (as_frame_vector(st.spec, X, p)[None] for X in (U, V, W))
    return VectorValue(closed_form_batch(sa, R, params, u, v, w, corrected)[0])


def lemma3_forms(sa: StructureAt, params, U, V, W, corrected: bool = False) -> dict[str, np.ndarray]:
    """The three xi-curvature formulas: R(U,V)xi, R(xi,V)W and R(xi,V)xi."""
    a, b = _params(params)
    g, eta, phi, Phi, xit = sa.g, sa.eta, sa.phi, sa.Phi, sa.xi_times
    eU, eV, eW = (eta(X)[:, None] for X in (U, V, W))
    xi = sa.xi_v
    if corrected:
        p1, p2, drop = 1 - b, a, 0.0
    else:
        p1, p2, drop = 1 - b + b * b, a * (1 - b), b * b
    return {
        "r_bar_uv_xi": p1 * (eV * U - eU * V) + p2 * (eU * phi(V) - eV * phi(U)),
        "r_bar_xi_v_w": xit(-a * Phi(V, W) + (1 - b) * g(V, W) - drop * eta(V) * eta(W))
        - p1 * eW * V
        + p2 * eW * phi(V),
        "r_bar_xi_v_xi": p1 * (eV * xi + V) - p2 * phi(V),
    }


def ricci_closed_form_batch(sa: StructureAt, S_lc, params, V, W, trace_phi, corrected: bool = False) -> np.ndarray:
    """``S + A Phi + B g + C eta eta`` with the printed or corrected eta-eta block."""
    a, b = _params(params)
    n = sa.n
    A = -a * b + (n - 2) * (a * b - a) + (b * b - 2 * b) * trace_phi
    B = -2 * a * a + b - b * b + n * a * a + (a * b - a) * trace_phi
    if corrected:
        C = (n - 2) * a * a + n * b - b * b + a * b * trace_phi
    else:
        C = -2 * a * a + n * (a * a + b - b * b)
    return _apply2(S_lc, V, W) + A * sa.Phi(V, W) + B * sa.g(V, W) + C * sa.eta(V) * sa.eta(W)


def xi_ricci_coefficient(n: int, params, trace_phi, corrected: bool = False):
    """Coefficient of eta(V) in S(V, xi)."""
    a, b = _params(params)
    if corrected:
        return (n - 1) * (1 - b) - a * trace_phi
    return (n - 1) * (1 - b + b * b) + a * (b - 1) * trace_phi


def _trace_phi_batch(sa: StructureAt) -> np.ndarray:
    eps = orthonormal_signature(sa.spec)
    return np.einsum("i,Nii->N", eps, sa.Phi_m)


def ricci_closed_form(st: LPStructure, params, U, V, p, corrected: bool = False) -> float:
    pt = np.reshape(np.asarray(p, dtype=float), (1, -1))
    sa = st.at(pt)
    S = ricci_tensor(ConnectionAt(levi_civita(st), sa))
    u, v = (as_frame_vector(st.spec, X, p)[None] for X in (U, V))
    return float(ricci_closed_form_batch(sa, S, params, u, v, _trace_phi_batch(sa), corrected)[0])


@dataclass(frozen=True)
class RicciData:
    s_bar: np.ndarray
    scalar: float
    trace_phi: float


def ricci(conn: Connection, st: LPStructure, p) -> RicciData:
    """Signature-weighted Ricci contraction, scalar curvature and trace Phi at ``p``."""
    if st.spec.signature is None:
        raise ManifoldError("Ricci contraction needs an orthonormal frame")
    eps = orthonormal_signature(st.spec)
    pt = np.reshape(np.asarray(p, dtype=float), (1, -1))
    ca = ConnectionAt(conn, st.at(pt))
    S = weighted_ricci(riemann_tensor(ca), ca.sa.G, eps)[0]
    return RicciData(S, float(eps @ np.diag(S)), float(_trace_phi_batch(ca.sa)[0]))


# ---------------------------------------------------------------------------
# semi-symmetry and eta-Einstein fits


def semisymmetry_tensor(R: np.ndarray, S: np.ndarray) -> np.ndarray:
    """``Q[N, x, y, z, u] = S(R(x,y)z, u) + S(z, R(x,y)u)``."""
    return np.einsum("Nxyzw,Nwu->Nxyzu", R, S) + np.einsum("Nzw,Nxyuw->Nxyzu", S, R)


def _generalized_tensors(st: LPStructure, params, pts):
    sa = st.at(pts)
    ca = ConnectionAt(generalized_connection(st, _params(params)), sa)
    R = riemann_tensor(ca)
    return sa, R, np.einsum("Nijki->Njk", R)


def ricci_semisymmetry_residual(st: LPStructure, params, seed: int = 0, count: int = DEFAULT_SAMPLES) -> float:
    """max |S(R(X,Y)Z, U) + S(Z, R(X,Y)U)| over sampled quadruples."""
    smp = Sampler(seed, "semisymmetry")
    pts = smp.points(st.spec.domain, count)
    n = st.dimension
    X, Y, Z, U = (smp.vectors(count, n, s) for s in range(4))
    sa, R, S = _generalized_tensors(st, params, pts)
    val = _apply2(S, _apply3(R, X, Y, Z), U) + _apply2(S, Z, _apply3(R, X, Y, U))
    return max_norm(val)


class RankDeficiencyError(ValueError):
    """The g, eta-eta and Phi columns do not determine the fit."""


@dataclass(frozen=True)
class EtaEinsteinFit:
    a: float
    b: float
    c: float
    residual: float
    classification: str


def classify(a: float, b: float, c: float, residual: float, tol: float = IDENTITY_TOL,
             zero: float = ZERO_THRESHOLD) -> str:
    if residual > tol:
        return NO_CLASS
    if abs(c) <= zero and abs(b) <= zero:
        return EINSTEIN
    if abs(c) <= zero:
        return ETA_EINSTEIN
    return GENERALIZED_ETA_EINSTEIN


def eta_einstein_fit(st: LPStructure, ricci_values, points, pairs=None, tol: float = IDENTITY_TOL) -> EtaEinsteinFit:
    """Least-squares fit ``S ~ a g + b eta eta + c Phi``.

    ``ricci_values[N, n, n]`` are Ricci matrices in the frame at ``points``;
    ``pairs`` is an optional list of ``(U, V)`` frame vectors (default: every
    ordered pair of frame fields).  A column that lies in the span of the
    earlier ones is dropped and its coefficient reported as zero, which is
    what happens to Phi when it is a combination of g and eta eta; if g and
    eta eta themselves are dependent the fit is rejected.
    """
    S = np.asarray(ricci_values, dtype=float)
    pts = np.atleast_2d(points)
    sa = st.at(pts)
    n = st.dimension
    if pairs is None:
        pairs = [(np.eye(n)[i], np.eye(n)[j]) for i in range(n) for j in range(n)]
    cols, rhs = [[], [], []], []
    for U, V in pairs:
        u = sa.const(as_frame_vector(st.spec, U))
        v = sa.const(as_frame_vector(st.spec, V))
        cols[0].append(sa.g(u, v))
        cols[1].append(sa.eta(u) * sa.eta(v))
        cols[2].append(sa.Phi(u, v))
        rhs.append(_apply2(S, u, v))
    design = np.stack([np.concatenate(c) for c in cols], axis=1)
    target = np.concatenate(rhs)

    scale = max(1.0, float(np.max(np.abs(design))))
    kept = []
    for j in range(3):
        trial = design[:, kept + [j]]
        if np.linalg.matrix_rank(trial, tol=1e-9 * scale * np.sqrt(len(trial))) == len(kept) + 1:
            kept.append(j)
        elif j < 2:
            raise RankDeficiencyError("g and eta (x) eta are linearly dependent on the sampled pairs")
    coef, *_ = np.linalg.lstsq(design[:, kept], target, rcond=None)
    full = np.zeros(3)
    full[kept] = coef
    resid = max_norm(design[:, kept] @ coef - target)
    a, b, c = (float(x) for x in full)
    return EtaEinsteinFit(a, b, c, resid, classify(a, b, c, resid, tol))


# ---------------------------------------------------------------------------
# suites


def _triples(st: LPStructure, salt: str, seed: int, count: int):
    smp = Sampler(seed, salt)
    pts = smp.points(st.spec.domain, count)
    n = st.dimension
    return pts, smp.vectors(count, n, 0), smp.vectors(count, n, 1), smp.vectors(count, n, 2)


def curvature_suite(st: LPStructure, params, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    params = _params(params)
    pts, U, V, W = _triples(st, "curvature", seed, count)
    sa = st.at(pts)
    R_lc = riemann_tensor(ConnectionAt(levi_civita(st), sa))
    R = riemann_tensor(ConnectionAt(generalized_connection(st, params), sa))
    direct = _apply3(R, U, V, W)

    rep = IdentityReport("curvature", seed)
    rep.add("closed_form", max_norm(direct - closed_form_batch(sa, R_lc, params, U, V, W)), samples=count,
            flags=("printed_closed_form_inconsistent",))
    rep.add("closed_form_corrected",
            max_norm(direct - closed_form_batch(sa, R_lc, params, U, V, W, corrected=True)), samples=count)
    rep.add("first_slot_antisymmetry", max_norm(direct + _apply3(R, V, U, W)), samples=count)
    for e in verify_lc_curvature_identities(st, seed=seed, count=count).entries:
        rep.add("lc_" + e.identity_id, e.max_residual, e.tolerance, e.samples_used)
    return rep


def lemma3_residuals(st: LPStructure, params, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    params = _params(params)
    pts, U, V, W = _triples(st, "lemma3", seed, count)
    sa, R, _ = _generalized_tensors(st, params, pts)
    xi = sa.xi_v
    direct = {
        "r_bar_uv_xi": _apply3(R, U, V, xi),
        "r_bar_xi_v_w": _apply3(R, xi, V, W),
        "r_bar_xi_v_xi": _apply3(R, xi, V, xi),
    }
    printed = lemma3_forms(sa, params, U, V, W)
    corrected = lemma3_forms(sa, params, U, V, W, corrected=True)
    rep = IdentityReport("lemma3", seed)
    for key in direct:
        flags = ["printed_closed_form_inconsistent"]
        if key == "r_bar_xi_v_w":
            flags.insert(0, "curvature_minus_a_read_as_alpha")
        rep.add(key, max_norm(direct[key] - printed[key]), samples=count, flags=flags)
    for key in direct:
        rep.add(key + "_corrected", max_norm(direct[key] - corrected[key]), samples=count)
    return rep


def ricci_suite(st: LPStructure, params, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    params = _params(params)
    pts, U, V, _ = _triples(st, "ricci", seed, count)
    sa = st.at(pts)
    eps = orthonormal_signature(st.spec)
    S_lc = ricci_tensor(ConnectionAt(levi_civita(st), sa))
    R = riemann_tensor(ConnectionAt(generalized_connection(st, params), sa))
    S = weighted_ricci(R, sa.G, eps)
    tr = _trace_phi_batch(sa)
    contraction = _apply2(S, U, V)
    flags = ("ricci_signature_weighted",)

    rep = IdentityReport("ricci", seed)
    rep.add("weighted_equals_trace", max_norm(S - np.einsum("Nijki->Njk", R)), samples=count, flags=flags)
    rep.add("symmetry", max_norm(S - np.swapaxes(S, 1, 2)), samples=count, flags=flags)
    rep.add("closed_form", max_norm(contraction - ricci_closed_form_batch(sa, S_lc, params, U, V, tr)),
            samples=count, flags=("printed_closed_form_inconsistent",))
    rep.add("closed_form_corrected",
            max_norm(contraction - ricci_closed_form_batch(sa, S_lc, params, U, V, tr, corrected=True)),
            samples=count)
    return rep


def _lemma5_entries(sa: StructureAt, S, params, V, W, tr, corrected: bool):
    k = xi_ricci_coefficient(sa.n, params, tr, corrected)
    eV, eW = sa.eta(V), sa.eta(W)
    r12 = _apply2(S, V, sa.const(sa.xi_v)) - k * eV
    r19 = _apply2(S, sa.phi(V), sa.phi(W)) - _apply2(S, V, W) - k * eV * eW
    return max_norm(r12), max_norm(r19)


def lemma5_residuals(st: LPStructure, params, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    params = _params(params)
    pts, V, W, _ = _triples(st, "lemma5", seed, count)
    sa, R, _ = _generalized_tensors(st, params, pts)
    S = weighted_ricci(R, sa.G, orthonormal_signature(st.spec))
    tr = _trace_phi_batch(sa)
    rep = IdentityReport("lemma5", seed)
    flags = ("printed_closed_form_inconsistent",)
    r12, r19 = _lemma5_entries(sa, S, params, V, W, tr, corrected=False)
    rep.add("s_bar_v_xi", r12, samples=count, flags=flags)
    rep.add("s_bar_phi_phi", r19, samples=count, flags=flags)
    r12, r19 = _lemma5_entries(sa, S, params, V, W, tr, corrected=True)
    rep.add("s_bar_v_xi_corrected", r12, samples=count)
    rep.add("s_bar_phi_phi_corrected", r19, samples=count)
    return rep


def semisymmetry_suite(st: LPStructure, params, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    rep = IdentityReport("semisymmetry", seed)
    rep.add("ricci_semisymmetric", ricci_semisymmetry_residual(st, params, seed, count), samples=count,
            status=MEASURED)
    return rep


def _branch(params: ConnectionParams) -> tuple[str, float]:
    """The equation that specializes the classification at ``params`` and its multiplier."""
    a, b = params
    if b == 0:
        return "soniii", 1 - a * a
    if a == 0 and b not in (0.0, 1.0):
        return "sonii", 1.0
    return "soni", (1 - b + b * b) ** 2 - (a * b - a) ** 2


def theorem44_verify(st: LPStructure, params, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    """The derivation chain from Ricci semi-symmetry to the eta-Einstein forms.

    Every identity is evaluated on all frame pairs at each sampled point
    where the semi-symmetry tensor vanishes; when it vanishes nowhere the
    entries are not applicable.
    """
    params = _params(params)
    a, b = params
    smp = Sampler(seed, "theorem44")
    pts = smp.points(st.spec.domain, count)
    sa, R, _ = _generalized_tensors(st, params, pts)
    S = weighted_ricci(R, sa.G, orthonormal_signature(st.spec))
    n = sa.n
    Q = semisymmetry_tensor(R, S)
    q = np.max(np.abs(Q.reshape(len(pts), -1)), axis=1)
    held = q <= IDENTITY_TOL
    m = int(held.sum())

    rep = IdentityReport("theorem44", seed)
    rep.add("semisymmetric", float(q.max()), samples=count, status=MEASURED)
    branch, mult = _branch(params)
    branch_flags = ("degenerate_branch",) if abs(mult) <= ZERO_THRESHOLD else ()

    ids = ["ricc", "etkkk", "soni", "branch_" + branch, "ricc_corrected", "etkkk_corrected",
           "soni_corrected", "eta_einstein_fit"]
    flag_map = {
        "ricc": ("semisym_chain_PhiY_read_as_phiY", "curvature_minus_a_read_as_alpha", "printed_closed_form_inconsistent"),
        "etkkk": ("printed_closed_form_inconsistent",),
        "soni": ("printed_closed_form_inconsistent",),
        "branch_" + branch: branch_flags + (("beta_branch_gYV_read_as_gYU",) if branch == "sonii" else ()),
    }
    if m == 0:
        for i in ids:
            rep.add(i, None, CHAIN_TOL, 0, status=NOT_APPLICABLE, flags=flag_map.get(i, ()))
        return rep

    sah = st.at(pts[held])
    Sh = S[held]
    G = sa.G
    Phi = sah.Phi_m  # [m, i, j]
    eta = sah.eta_v
    ee = np.einsum("Ni,Nj->Nij", eta, eta)
    g = np.broadcast_to(G, Sh.shape)
    tr = _trace_phi_batch(sah)[:, None, None]
    # S(phi Y, U) as a matrix in (Y, U)
    S_phi = np.einsum("Nmy,Nmu->Nyu", sah.phi_m, Sh)

    kp = xi_ricci_coefficient(n, params, tr)
    kc = xi_ricci_coefficient(n, params, tr, corrected=True)
    p1 = 1 - b + b * b
    chain = {
        "ricc": p1 * Sh + a * (b - 1) * S_phi - kp * (-a * Phi + (1 - b) * g - b * b * ee),
        "etkkk": p1 * S_phi + a * (b - 1) * Sh - kp * ((1 - b) * Phi - a * g - a * b * ee),
        "soni": (p1 ** 2 - (a * b - a) ** 2) * Sh
        - kp * (a * b * Phi - (1 - b) * (p1 - a * a) * g
                + (-b ** 4 + b ** 3 - b * b + a * a * b * b - b * a * a) * ee),
    }
    if branch == "soniii":
        chain["branch_soniii"] = mult * Sh - mult * (n - 1 - a * tr) * g
    elif branch == "sonii":
        chain["branch_sonii"] = Sh - (n - 1) * (1 - b) * g + (n - 1) * b * b * ee
    else:
        chain["branch_soni"] = chain["soni"]
    chain["ricc_corrected"] = (1 - b) * Sh - a * S_phi - kc * ((1 - b) * g - a * Phi)
    chain["etkkk_corrected"] = (1 - b) * S_phi - a * Sh - kc * ((1 - b) * Phi - a * g)
    mc = (1 - b) ** 2 - a * a
    chain["soni_corrected"] = mc * Sh - kc * mc * g

    for i in ids[:-1]:
        status = VACUOUS if i.startswith("branch_") and branch_flags else ""
        rep.add(i, max_norm(chain[i]), CHAIN_TOL, m, status=status, flags=flag_map.get(i, ()))

    fit = eta_einstein_fit(st, Sh, pts[held])
    rep.add("eta_einstein_fit", fit.residual, ZERO_THRESHOLD, m)
    return rep
