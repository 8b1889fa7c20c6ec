"""Levi-Civita and generalized symmetric metric connections in a frame.

Coefficients are stored as ``Gamma[N, i, j, k]`` with
``nabla_{nu_i} nu_j = Gamma_ijk nu_k``; the generalized connection of type
``(alpha, beta)`` adds

    H(U, V) = alpha {eta(V) U - g(U, V) xi} + beta {eta(V) phi U - g(phi U, V) xi}

to the Levi-Civita connection.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .frame import FrameField, ManifoldError, VectorValue, as_frame_vector
from .jet import Jet
from .report import DEFAULT_SAMPLES, EXACT_TOL, IDENTITY_TOL, IdentityReport, Sampler, max_norm
from .structure import LPStructure, StructureAt

LEVI_CIVITA = "levi-civita"
GENERALIZED = "generalized"
CUSTOM = "custom"


@dataclass(frozen=True)
class ConnectionParams:
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise ValueError("alpha and beta must be finite")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def __iter__(self):
        return iter((self.alpha, self.beta))


@dataclass(frozen=True, eq=False)
class Connection:
    """A linear connection on the frame manifold of ``structure``.

    ``extra`` returns the jet of the (1,2) tensor added to the Levi-Civita
    coefficients; it is ``None`` for the Levi-Civita connection itself.
    """

    structure: LPStructure
    kind: str = LEVI_CIVITA
    params: ConnectionParams | None = None
    extra: Callable[[StructureAt], Jet] | None = field(default=None, repr=False)

    def at(self, points) -> ConnectionAt:
        return ConnectionAt(self, self.structure.at(points))

    def coefficients(self, points) -> np.ndarray:
        """``Gamma[N, i, j, k]`` at the given points."""
        return self.at(points).gamma.val


def koszul_coefficients(sa: StructureAt) -> Jet:
    """Levi-Civita coefficients from the Koszul formula.

    With a constant frame metric the derivative terms drop and
    ``2 g(nabla_i nu_j, nu_k) = c'_ijk - c'_jki - c'_ikj`` where ``c'`` is
    the structure tensor with its last index lowered.
    """
    G, Ginv = sa.G, sa.spec.metric_inverse

    def solve(c):
        low = np.einsum("Nijm...,mk->Nijk...", c, G)
        low = 0.5 * (low - np.einsum("Njki...->Nijk...", low) - np.einsum("Nikj...->Nijk...", low))
        return np.einsum("Nijk...,kl->Nijl...", low, Ginv)

    return Jet(solve(sa.c.val), solve(sa.c.der))


def additive_tensor(sa: StructureAt, params: ConnectionParams) -> Jet:
    """Jet of ``H[N, i, j, k]``, the ``nu_k`` component of ``H(nu_i, nu_j)``."""
    a, b = params
    n, G = sa.n, sa.G
    eta, xi, phi = sa.eta_jet, sa.xi_jet, sa.phi_jet
    I = np.eye(n)
    # Phi_ij = phi_mi G_mj
    Phi_val = np.einsum("Nmi,mj->Nij", phi.val, G)
    Phi_der = np.einsum("NmiZ,mj->NijZ", phi.der, G)
    val = a * (np.einsum("Nj,ik->Nijk", eta.val, I) - np.einsum("ij,Nk->Nijk", G, xi.val))
    der = a * (np.einsum("NjZ,ik->NijkZ", eta.der, I) - np.einsum("ij,NkZ->NijkZ", G, xi.der))
    val = val + b * (np.einsum("Nj,Nki->Nijk", eta.val, phi.val) - np.einsum("Nij,Nk->Nijk", Phi_val, xi.val))
    der = der + b * (
        np.einsum("NjZ,Nki->NijkZ", eta.der, phi.val)
        + np.einsum("Nj,NkiZ->NijkZ", eta.val, phi.der)
        - np.einsum("NijZ,Nk->NijkZ", Phi_der, xi.val)
        - np.einsum("Nij,NkZ->NijkZ", Phi_val, xi.der)
    )
    return Jet(val, der)


class ConnectionAt:
    """A connection evaluated on the points of a :class:`StructureAt`."""

    def __init__(self, conn: Connection, sa: StructureAt):
        if sa.st is not conn.structure and sa.spec is not conn.structure.spec:
            raise ValueError("structure data belongs to a different manifold")
        self.conn = conn
        self.sa = sa

    @cached_property
    def levi_civita(self) -> Jet:
        return koszul_coefficients(self.sa)

    @cached_property
    def gamma(self) -> Jet:
        lc = self.levi_civita
        if self.conn.extra is None:
            return lc
        return lc + self.conn.extra(self.sa)

    def nabla(self, U: np.ndarray, W: Jet) -> np.ndarray:
        """``nabla_U W`` for frame vectors ``U`` and a vector-field jet ``W``."""
        dW = self.sa.frame_deriv(W)  # [N, k, i] = nu_i(W^k)
        return np.einsum("Ni,Nki->Nk", U, dW) + np.einsum("Ni,Nj,Nijk->Nk", U, W.val, self.gamma.val)

    def nabla_const(self, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        """``nabla_U V`` with ``V`` extended by constant frame coefficients."""
        return np.einsum("Ni,Nj,Nijk->Nk", U, V, self.gamma.val)

    def bracket_const(self, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        return np.einsum("Ni,Nj,Nijk->Nk", U, V, self.sa.c.val)

    def torsion_const(self, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        return self.nabla_const(U, V) - self.nabla_const(V, U) - self.bracket_const(U, V)

    def H(self, U, V, params: ConnectionParams) -> np.ndarray:
        """The additive part evaluated directly from g, eta, phi and xi."""
        a, b = params
        sa = self.sa
        return (
            a * (sa.eta(V)[:, None] * U - sa.xi_times(sa.g(U, V)))
            + b * (sa.eta(V)[:, None] * sa.phi(U) - sa.xi_times(sa.Phi(U, V)))
        )


def levi_civita(st: LPStructure) -> Connection:
    if abs(np.linalg.det(st.spec.frame_metric)) == 0:
        raise ManifoldError("singular frame metric")
    return Connection(st, LEVI_CIVITA)


def generalized_connection(st: LPStructure, params: ConnectionParams | tuple = (0.0, 0.0)) -> Connection:
    if not isinstance(params, ConnectionParams):
        params = ConnectionParams(*params)
    return Connection(st, GENERALIZED, params, lambda sa: additive_tensor(sa, params))


def negative_control_connection(st: LPStructure) -> Connection:
    """``nabla_U V + eta(V) U``: the semi-symmetric term without its compensator (not metric)."""

    def extra(sa: StructureAt) -> Jet:
        eta = sa.eta_jet
        I = np.eye(sa.n)
        return Jet(np.einsum("Nj,ik->Nijk", eta.val, I), np.einsum("NjZ,ik->NijkZ", eta.der, I))

    return Connection(st, CUSTOM, None, extra)


# ---------------------------------------------------------------------------
# pointwise API


def _at_point(conn: Connection, p) -> ConnectionAt:
    return conn.at(np.reshape(np.asarray(p, dtype=float), (1, -1)))


def covariant_derivative(conn: Connection, U, V, p) -> VectorValue:
    """``nabla_U V`` at ``p``.

    ``U`` and ``V`` are frame indices, constant frame combinations or
    :class:`FrameField` objects; ``U`` is used only through its value at p.
    """
    ca = _at_point(conn, p)
    spec = conn.structure.spec
    u = FrameField.of(spec, U).jet(spec, ca.sa.points).val
    vj = FrameField.of(spec, V).jet(spec, ca.sa.points)
    return VectorValue(ca.nabla(u, vj)[0])


@dataclass(frozen=True)
class TorsionData:
    torsion_value: VectorValue
    model_value: VectorValue
    tprime_value: VectorValue
    h_value: VectorValue


def torsion_model(sa: StructureAt, U, V, params: ConnectionParams) -> np.ndarray:
    """``alpha{eta(V)U - eta(U)V} + beta{eta(V) phi U - eta(U) phi V}``."""
    a, b = params
    eU, eV = sa.eta(U)[:, None], sa.eta(V)[:, None]
    return a * (eV * U - eU * V) + b * (eV * sa.phi(U) - eU * sa.phi(V))


def tprime(sa: StructureAt, U, V, params: ConnectionParams) -> np.ndarray:
    """``alpha{eta(U)V - g(U,V)xi} + beta{eta(U) phi V - g(phi U, V) xi}``."""
    a, b = params
    eU = sa.eta(U)[:, None]
    return a * (eU * V - sa.xi_times(sa.g(U, V))) + b * (eU * sa.phi(V) - sa.xi_times(sa.Phi(U, V)))


def torsion(conn: Connection, U, V, p) -> TorsionData:
    ca = _at_point(conn, p)
    sa = ca.sa
    u = as_frame_vector(sa.spec, U, p)[None]
    v = as_frame_vector(sa.spec, V, p)[None]
    params = conn.params or ConnectionParams()
    T = ca.torsion_const(u, v)
    model = torsion_model(sa, u, v, params)
    tp = tprime(sa, u, v, params)
    h = 0.5 * (T + tp + tprime(sa, v, u, params))
    return TorsionData(*(VectorValue(x[0]) for x in (T, model, tp, h)))


def metric_compatibility_residual(conn: Connection, seed: int = 0, count: int = DEFAULT_SAMPLES) -> float:
    """max |X g(Y,Z) - g(nabla_X Y, Z) - g(Y, nabla_X Z)| over seeded samples.

    ``Y`` and ``Z`` carry expression coefficients (polynomials in the
    coordinates) so the derivative term does not vanish trivially.
    """
    from .expr import Num, Var, add, mul

    st = conn.structure
    spec = st.spec
    smp = Sampler(seed, "metric")
    pts = smp.points(spec.domain, count)
    n = spec.dimension
    X = smp.vectors(count, n, 0)
    ca = conn.at(pts)
    sa = ca.sa
    cy, cz = smp.rng.uniform(-1, 1, (2, n, n + 1))
    coords = [Var(x) for x in spec.coordinates]

    def field_of(coef):
        # affine coefficients: coef[k, 0] + sum_a coef[k, a+1] x_a
        comps = []
        for row in coef:
            e = Num(float(row[0]))
            for a, x in enumerate(coords):
                e = add(e, mul(Num(float(row[a + 1])), x))
            comps.append(e)
        return FrameField(tuple(comps))

    Yj = field_of(cy).jet(spec, pts)
    Zj = field_of(cz).jet(spec, pts)
    gYZ = Jet(
        sa.g(Yj.val, Zj.val),
        np.einsum("NiZ,ij,Nj->NZ", Yj.der, sa.G, Zj.val) + np.einsum("Ni,ij,NjZ->NZ", Yj.val, sa.G, Zj.der),
    )
    Xg = gYZ.along(np.einsum("Nbi,Ni->Nb", sa.F, X))
    res = Xg - sa.g(ca.nabla(X, Yj), Zj.val) - sa.g(Yj.val, ca.nabla(X, Zj))
    return max_norm(res)


def connection_suite(st: LPStructure, params: ConnectionParams, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    """Torsion-freeness and metricity of the Levi-Civita connection, metricity
    and the additive structure of the generalized connection, and its two
    classical specializations."""
    smp = Sampler(seed, "connection")
    pts = smp.points(st.spec.domain, count)
    n = st.dimension
    U, V = smp.vectors(count, n, 0), smp.vectors(count, n, 1)
    sa = st.at(pts)
    lc = ConnectionAt(levi_civita(st), sa)
    gen = ConnectionAt(generalized_connection(st, params), sa)

    rep = IdentityReport("connection", seed)
    rep.add("lc_torsion_free", max_norm(lc.torsion_const(U, V)), samples=count)
    rep.add("lc_metric_compat", metric_compatibility_residual(levi_civita(st), seed, count), samples=count)
    rep.add("metric_compat", metric_compatibility_residual(generalized_connection(st, params), seed, count), samples=count)
    diff = gen.nabla_const(U, V) - lc.nabla_const(U, V) - lc.H(U, V, params)
    rep.add("difference_equals_h", max_norm(diff), samples=count)

    semi = ConnectionAt(generalized_connection(st, (1.0, 0.0)), sa)
    quarter = ConnectionAt(generalized_connection(st, (0.0, 1.0)), sa)
    lcUV = lc.nabla_const(U, V)
    semi_formula = lcUV + sa.eta(V)[:, None] * U - sa.xi_times(sa.g(U, V))
    quarter_formula = lcUV + sa.eta(V)[:, None] * sa.phi(U) - sa.xi_times(sa.Phi(U, V))
    rep.add("specialization_semi", max_norm(semi.nabla_const(U, V) - semi_formula), EXACT_TOL, count)
    rep.add("specialization_quarter", max_norm(quarter.nabla_const(U, V) - quarter_formula), EXACT_TOL, count)
    return rep


def torsion_suite(st: LPStructure, params: ConnectionParams, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    smp = Sampler(seed, "torsion")
    pts = smp.points(st.spec.domain, count)
    n = st.dimension
    U, V, W = (smp.vectors(count, n, s) for s in range(3))
    sa = st.at(pts)
    gen = ConnectionAt(generalized_connection(st, params), sa)
    lc = ConnectionAt(levi_civita(st), sa)

    T = gen.torsion_const(U, V)
    rep = IdentityReport("torsion", seed)
    rep.add("torsion_model", max_norm(T - torsion_model(sa, U, V, params)), samples=count,
            flags=("torsion_model_phiY_read_as_phiU",))
    TWU = gen.torsion_const(W, U)
    rep.add("tprime_duality", max_norm(sa.g(tprime(sa, U, V, params), W) - sa.g(TWU, V)), samples=count)
    h = 0.5 * (T + tprime(sa, U, V, params) + tprime(sa, V, U, params))
    additive = gen.nabla_const(U, V) - lc.nabla_const(U, V)
    rep.add("h_equals_additive_part", max_norm(h - additive), samples=count)
    return rep


def proposition_residuals(st: LPStructure, params: ConnectionParams | tuple, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    """Covariant derivatives of phi, xi and eta under the generalized connection
    against their closed forms."""
    if not isinstance(params, ConnectionParams):
        params = ConnectionParams(*params)
    a, b = params
    smp = Sampler(seed, "proposition")
    pts = smp.points(st.spec.domain, count)
    n = st.dimension
    U, V = smp.vectors(count, n, 0), smp.vectors(count, n, 1)
    sa = st.at(pts)
    gen = ConnectionAt(generalized_connection(st, params), sa)
    g, eta, phi, Phi = sa.g, sa.eta, sa.phi, sa.Phi
    eU, eV = eta(U), eta(V)

    Vj = sa.const_jet(V)
    direct = gen.nabla(U, sa.phi_field(Vj)) - phi(gen.nabla(U, Vj))
    formula = (
        sa.xi_times((1 - b) * g(U, V) + (2 - 2 * b) * eU * eV - a * Phi(U, V))
        + (1 - b) * eV[:, None] * U
        - a * eV[:, None] * phi(U)
    )
    rep = IdentityReport("proposition", seed)
    rep.add("nabla_bar_phi", max_norm(direct - formula), samples=count)

    direct = gen.nabla(U, sa.xi_jet)
    formula = (1 - b) * phi(U) - a * U - a * sa.xi_times(eU)
    rep.add("nabla_bar_xi", max_norm(direct - formula), samples=count)

    direct = sa.eta_of(Vj).along(np.einsum("Nbi,Ni->Nb", sa.F, U)) - eta(gen.nabla(U, Vj))
    formula = (1 - b) * Phi(U, V) - a * g(phi(U), phi(V))
    rep.add("nabla_bar_eta", max_norm(direct - formula), samples=count)
    return rep
