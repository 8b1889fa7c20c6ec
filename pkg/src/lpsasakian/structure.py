"""Lorentzian almost para-contact structures (phi, xi, eta, g) on a frame manifold."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .expr import ScalarExpr, as_expr, parse_expression
from .frame import (
    FrameField,
    ManifoldError,
    ManifoldSpec,
    as_frame_vector,
    expr_jet,
    frame_derivative,
    frame_matrix,
    structure_functions,
)
from .jet import Jet
from .report import DEFAULT_SAMPLES, IDENTITY_TOL, NOT_APPLICABLE, IdentityReport, Sampler, max_norm


@dataclass(frozen=True, eq=False)
class LPStructure:
    """The quadruple (phi, xi, eta, g) in frame components.

    ``phi[k][j]`` is the ``nu_k`` component of ``phi(nu_j)``; ``xi`` holds
    frame coefficients.  ``eta`` is not stored: ``eta(U) = g(U, xi)``.
    Entries may be constants or expressions in the coordinates.
    """

    spec: ManifoldSpec
    phi: tuple[tuple[ScalarExpr, ...], ...]
    xi: tuple[ScalarExpr, ...]
    closed_eta: bool = True
    name: str = ""

    def __post_init__(self):
        n = self.spec.dimension
        phi = tuple(tuple(as_expr(c) for c in row) for row in self.phi)
        if len(phi) != n or any(len(row) != n for row in phi):
            raise ManifoldError(f"phi must be a {n}x{n} matrix")
        xi = tuple(as_expr(c) for c in self.xi)
        if len(xi) != n:
            raise ManifoldError(f"xi must have {n} frame coefficients")
        names = set(self.spec.coordinates)
        for e in (*xi, *(c for row in phi for c in row)):
            if e.variables() - names:
                raise ManifoldError(f"structure uses unknown names {sorted(e.variables() - names)}")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "xi", xi)

    @property
    def dimension(self) -> int:
        return self.spec.dimension

    @cached_property
    def is_constant(self) -> bool:
        return all(e.is_constant for e in (*self.xi, *(c for row in self.phi for c in row)))

    def at(self, points) -> StructureAt:
        return StructureAt(self, self.spec.check_points(points))

    def replace(self, *, phi=None, xi=None, spec=None) -> LPStructure:
        return LPStructure(
            spec if spec is not None else self.spec,
            phi if phi is not None else self.phi,
            xi if xi is not None else self.xi,
            self.closed_eta,
            self.name,
        )


class StructureAt:
    """Frame data of a structure evaluated on a batch of points.

    Vectors are frame-component arrays of shape ``(N, n)``.
    """

    def __init__(self, st: LPStructure, points: np.ndarray):
        self.st = st
        self.spec = st.spec
        self.points = points
        self.N = len(points)
        self.n = st.dimension
        self.G = st.spec.frame_metric

    @cached_property
    def F(self) -> np.ndarray:
        return frame_matrix(self.spec, self.points)

    @cached_property
    def c(self) -> Jet:
        return structure_functions(self.spec, self.points)

    @cached_property
    def env(self):
        return self.spec.env(self.points)

    @cached_property
    def phi_jet(self) -> Jet:
        return expr_jet(self.st.phi, self.spec.coordinates, self.points, self.env)

    @cached_property
    def xi_jet(self) -> Jet:
        return expr_jet(self.st.xi, self.spec.coordinates, self.points, self.env)

    @cached_property
    def eta_jet(self) -> Jet:
        x = self.xi_jet
        return Jet(x.val @ self.G, np.einsum("jm,NmZ->NjZ", self.G, x.der))

    @property
    def phi_m(self) -> np.ndarray:
        return self.phi_jet.val

    @property
    def xi_v(self) -> np.ndarray:
        return self.xi_jet.val

    @property
    def eta_v(self) -> np.ndarray:
        return self.eta_jet.val

    @cached_property
    def Phi_m(self) -> np.ndarray:
        """``Phi_ij = g(phi nu_i, nu_j)``."""
        return np.einsum("Nmi,mj->Nij", self.phi_m, self.G)

    # algebra on (N, n) vector batches
    def g(self, U, V) -> np.ndarray:
        return np.einsum("Ni,ij,Nj->N", U, self.G, V)

    def eta(self, U) -> np.ndarray:
        return np.einsum("Nj,Nj->N", self.eta_v, U)

    def phi(self, U) -> np.ndarray:
        return np.einsum("Nkj,Nj->Nk", self.phi_m, U)

    def Phi(self, U, V) -> np.ndarray:
        return self.g(self.phi(U), V)

    def xi_times(self, f) -> np.ndarray:
        return f[:, None] * self.xi_v

    def basis(self, i: int) -> np.ndarray:
        return np.broadcast_to(np.eye(self.n)[i], (self.N, self.n)).copy()

    def const(self, v) -> np.ndarray:
        return np.broadcast_to(np.asarray(v, dtype=float), (self.N, self.n)).copy()

    def frame_deriv(self, jet: Jet) -> np.ndarray:
        return frame_derivative(jet, self.F)

    def const_jet(self, V) -> Jet:
        return Jet.constant(V, self.n)

    def phi_field(self, V: Jet) -> Jet:
        """The field ``phi V`` for a vector-field jet ``V``."""
        p = self.phi_jet
        val = np.einsum("Nkj,Nj->Nk", p.val, V.val)
        der = np.einsum("NkjZ,Nj->NkZ", p.der, V.val) + np.einsum("Nkj,NjZ->NkZ", p.val, V.der)
        return Jet(val, der)

    def eta_of(self, V: Jet) -> Jet:
        e = self.eta_jet
        return Jet(
            np.einsum("Nj,Nj->N", e.val, V.val),
            np.einsum("NjZ,Nj->NZ", e.der, V.val) + np.einsum("Nj,NjZ->NZ", e.val, V.der),
        )


# ---------------------------------------------------------------------------


def build_example3() -> LPStructure:
    """The 3-dimensional example on R^3.

    Frame ``nu1 = e^z d/dy``, ``nu2 = e^z (d/dx + d/dy)``, ``nu3 = d/dz`` with
    ``g = diag(1, 1, -1)``, ``phi nu1 = -nu1``, ``phi nu2 = -nu2``,
    ``phi nu3 = 0`` and ``xi = nu3``.
    """
    P = parse_expression
    spec = ManifoldSpec(
        coordinates=("x", "y", "z"),
        frame=(
            (P("0"), P("exp(z)"), P("0")),
            (P("exp(z)"), P("exp(z)"), P("0")),
            (P("0"), P("0"), P("1")),
        ),
        frame_metric=np.diag([1.0, 1.0, -1.0]),
        name="example3",
    )
    phi = ((-1, 0, 0), (0, -1, 0), (0, 0, 0))
    return LPStructure(spec, phi, (0, 0, 1), closed_eta=True, name="example3")


def phi_form(st: LPStructure, U, V, p) -> float:
    """``Phi(U, V) = g(phi U, V)`` at ``p``."""
    sa = st.at(np.reshape(p, (1, -1)))
    u = as_frame_vector(st.spec, U, p)[None]
    v = as_frame_vector(st.spec, V, p)[None]
    return float(sa.Phi(u, v)[0])


def trace_phi(st: LPStructure, p) -> float:
    """``sum_i eps_i Phi(nu_i, nu_i)`` (orthonormal frames)."""
    sig = st.spec.signature
    if sig is None:
        raise ManifoldError("trace Phi needs an orthonormal frame")
    sa = st.at(np.reshape(p, (1, -1)))
    return float(np.einsum("i,Nii->N", np.array(sig, float), sa.Phi_m)[0])


def phi_rank(st: LPStructure, p, tol: float = 1e-9) -> int:
    sa = st.at(np.reshape(p, (1, -1)))
    return int(np.linalg.matrix_rank(sa.phi_m[0], tol=tol))


def verify_lp_axioms(st: LPStructure, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    """Residuals of the LP-Sasakian axioms over ``count`` seeded samples."""
    from .connection import ConnectionAt, levi_civita

    smp = Sampler(seed, "axioms")
    pts = smp.points(st.spec.domain, count)
    n = st.dimension
    U, V = smp.vectors(count, n, 0), smp.vectors(count, n, 1)
    sa = st.at(pts)
    lc = ConnectionAt(levi_civita(st), sa)
    xi, g, eta, phi = sa.xi_v, sa.g, sa.eta, sa.phi

    rep = IdentityReport("axioms", seed)
    rep.add("eta_xi", max_norm(eta(xi) + 1.0), samples=count)
    rep.add("phi_square", max_norm(phi(phi(U)) - U - sa.xi_times(eta(U))), samples=count)
    rep.add("metric_compat_phi", max_norm(g(phi(U), phi(V)) - g(U, V) - eta(U) * eta(V)), samples=count)
    rep.add("nabla_xi", max_norm(lc.nabla(U, sa.xi_jet) - phi(U)), samples=count)

    # (nabla_U phi) V = nabla_U (phi V) - phi(nabla_U V)
    Vj = sa.const_jet(V)
    lhs = lc.nabla(U, sa.phi_field(Vj)) - phi(lc.nabla(U, Vj))
    rhs = sa.xi_times(g(U, V)) + eta(V)[:, None] * U + sa.xi_times(2 * eta(U) * eta(V))
    rep.add("nabla_phi", max_norm(lhs - rhs), samples=count)

    # (nabla_U eta) V = U(eta(V)) - eta(nabla_U V)
    d_eta = sa.eta_of(Vj).along(np.einsum("Nbi,Ni->Nb", sa.F, U)) - eta(lc.nabla(U, Vj))
    res = max(max_norm(d_eta - sa.Phi(U, V)), max_norm(sa.Phi(U, xi)))
    if st.closed_eta:
        rep.add("eta_closed_2_10", res, samples=count)
    else:
        rep.add("eta_closed_2_10", res, samples=count, status=NOT_APPLICABLE)
    rep.add("phi_xi_zero", max_norm(phi(xi)), samples=count)
    rep.add("eta_phi_zero", max_norm(eta(phi(U))), samples=count)
    return rep


def verify_lc_curvature_identities(st: LPStructure, conn=None, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    """Curvature identities of the Levi-Civita connection of an LP-Sasakian manifold."""
    from .connection import ConnectionAt, levi_civita
    from .curvature import ricci_tensor, riemann_tensor

    conn = conn if conn is not None else levi_civita(st)
    smp = Sampler(seed, "lc_curvature")
    pts = smp.points(st.spec.domain, count)
    n = st.dimension
    U, V = smp.vectors(count, n, 0), smp.vectors(count, n, 1)
    sa = st.at(pts)
    ca = ConnectionAt(conn, sa)
    R = riemann_tensor(ca)
    S = ricci_tensor(ca)
    xi, g, eta, phi = sa.xi_v, sa.g, sa.eta, sa.phi

    def Rv(A, B, C):
        return np.einsum("Ni,Nj,Nk,Nijkl->Nl", A, B, C, R)

    def Sv(A, B):
        return np.einsum("Ni,Nj,Nij->N", A, B, S)

    rep = IdentityReport("lc_curvature", seed)
    rep.add("r_xi_u_v", max_norm(Rv(xi, U, V) - sa.xi_times(g(U, V)) + eta(V)[:, None] * U), samples=count)
    rep.add("r_u_v_xi", max_norm(Rv(U, V, xi) - eta(V)[:, None] * U + eta(U)[:, None] * V), samples=count)
    rep.add("s_u_xi", max_norm(Sv(U, xi) - (n - 1) * eta(U)), samples=count)
    rep.add("s_phi_phi", max_norm(Sv(phi(U), phi(V)) - Sv(U, V) - (n - 1) * eta(U) * eta(V)), samples=count)
    return rep
