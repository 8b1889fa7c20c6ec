"""Embedded CR-submanifolds of a frame manifold.

A submanifold is given by a map from sub-coordinates ``u`` into the ambient
chart together with ``m`` tangent fields written as ambient frame
combinations.  Every field along the image is carried as a :class:`Jet`
with respect to ``u``; ambient coefficient jets are pulled back through the
Jacobian of the map, so covariant derivatives along tangent directions stay
exact.

Vectors are ambient frame-component arrays of shape ``(N, n)``.  Tangent
fields used by the identity suites are constant-coefficient combinations of
the declared tangent frame.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .connection import Connection, ConnectionParams, generalized_connection, levi_civita
from .expr import ScalarExpr, as_expr
from .frame import ManifoldError, VectorValue, as_frame_vector, expr_jet, frame_matrix
from .jet import Jet, jeinsum, jinv
from .report import (
    DEFAULT_SAMPLES,
    EXACT_TOL,
    IDENTITY_TOL,
    MEASURED,
    NOT_APPLICABLE,
    VACUOUS,
    IdentityReport,
    Sampler,
    max_norm,
)
from .structure import LPStructure, StructureAt

XI_HORIZONTAL = "xi_horizontal"
XI_VERTICAL = "xi_vertical"
XI_MIXED = "mixed"

VALIDATION_SAMPLES = 16
CR_TOL = 1e-9


class SubmanifoldError(ManifoldError):
    pass


@dataclass(frozen=True, eq=False)
class EmbeddingSpec:
    ambient: LPStructure
    coordinates: tuple[str, ...]
    map: tuple[ScalarExpr, ...]
    sub_frame: tuple[tuple[ScalarExpr, ...], ...]
    domain: tuple[tuple[float, float], ...] | None = None
    name: str = ""

    def __post_init__(self):
        n = self.ambient.dimension
        m = len(self.coordinates)
        if not 0 < m < n:
            raise SubmanifoldError(f"sub-dimension must satisfy 0 < m < {n}, got {m}")
        if len(set(self.coordinates)) != m:
            raise SubmanifoldError("sub-coordinate names must be distinct")
        if len(self.map) != n:
            raise SubmanifoldError(f"dimension mismatch: map has {len(self.map)} components, expected {n}")
        if len(self.sub_frame) != m:
            raise SubmanifoldError(f"dimension mismatch: {len(self.sub_frame)} tangent fields for {m} sub-coordinates")
        names = set(self.coordinates)
        smap = tuple(as_expr(e) for e in self.map)
        frame = []
        for row in self.sub_frame:
            if len(row) != n:
                raise SubmanifoldError(f"dimension mismatch: tangent field has {len(row)} components, expected {n}")
            frame.append(tuple(as_expr(e) for e in row))
        for e in (*smap, *(c for row in frame for c in row)):
            if e.variables() - names:
                raise SubmanifoldError(f"submanifold uses unknown names {sorted(e.variables() - names)}")
        object.__setattr__(self, "map", smap)
        object.__setattr__(self, "sub_frame", tuple(frame))
        if self.domain is None:
            object.__setattr__(self, "domain", tuple((-1.0, 1.0) for _ in range(m)))
        elif len(self.domain) != m or any(lo >= hi for lo, hi in self.domain):
            raise SubmanifoldError("sub-domain must give one (min, max) pair per sub-coordinate with min < max")

    @property
    def dimension(self) -> int:
        return len(self.coordinates)


@dataclass(frozen=True)
class DistributionSplit:
    """Index lists into the tangent frame spanning D and its complement."""

    d: tuple[int, ...]
    d_perp: tuple[int, ...]
    orientation: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(int(i) for i in self.d))
        object.__setattr__(self, "d_perp", tuple(int(i) for i in self.d_perp))


@dataclass(frozen=True)
class SplitVector:
    p_part: VectorValue
    q_part: VectorValue
    b_part: VectorValue
    c_part: VectorValue
    normal_part: VectorValue


@dataclass(frozen=True)
class SecondFundamental:
    h_value: VectorValue
    h_bar_value: VectorValue
    weingarten_value: VectorValue
    normal_connection_value: VectorValue
    induced_value: VectorValue


def _batch(a: np.ndarray, N: int) -> np.ndarray:
    return np.broadcast_to(a, (N,) + a.shape).copy()


class SubmanifoldAt:
    """Pulled-back data on a batch of sub-coordinate points."""

    def __init__(self, sub: Submanifold, u: np.ndarray):
        self.sub = sub
        self.emb = sub.emb
        self.u = u
        self.N = len(u)
        self.n = sub.emb.ambient.dimension
        self.m = sub.emb.dimension
        self.G = sub.emb.ambient.spec.frame_metric
        emb = self.emb
        ij = expr_jet(emb.map, emb.coordinates, u)
        self.x = emb.ambient.spec.check_points(ij.val)
        self.J = ij.der  # [N, a, m]
        self.sa: StructureAt = emb.ambient.at(self.x)
        self._gammas: dict = {}
        self._conns: dict = {}

    # pulled-back ambient jets
    def pull(self, jet: Jet) -> Jet:
        return jet.chain(self.J)

    @cached_property
    def F(self) -> np.ndarray:
        return frame_matrix(self.emb.ambient.spec, self.x)

    @cached_property
    def T(self) -> Jet:
        """Tangent frame ``T[N, a, k]``: ambient frame component k of field a."""
        return expr_jet(self.emb.sub_frame, self.emb.coordinates, self.u)

    @cached_property
    def phi_jet(self) -> Jet:
        return self.pull(self.sa.phi_jet)

    @cached_property
    def xi_jet(self) -> Jet:
        return self.pull(self.sa.xi_jet)

    @cached_property
    def eta_jet(self) -> Jet:
        return self.pull(self.sa.eta_jet)

    @property
    def xi(self) -> np.ndarray:
        return self.xi_jet.val

    def gamma(self, conn: Connection) -> Jet:
        key = id(conn)
        if key not in self._gammas:
            if conn.structure.dimension != self.n:
                raise SubmanifoldError("connection lives on a manifold of different dimension")
            self._gammas[key] = (conn, self.pull(conn.at(self.x).gamma))
        return self._gammas[key][1]

    @cached_property
    def lc(self) -> Connection:
        return levi_civita(self.emb.ambient)

    def generalized(self, params: ConnectionParams) -> Connection:
        key = (params.alpha, params.beta)
        if key not in self._conns:
            self._conns[key] = generalized_connection(self.emb.ambient, params)
        return self._conns[key]

    # projectors
    def _projector(self, idx) -> Jet:
        N, n = self.N, self.n
        if len(idx) == 0:
            return Jet(np.zeros((N, n, n)), np.zeros((N, n, n, self.m)))
        T = self.T[list(idx)]
        Gb = _batch(self.G, N)
        M = jeinsum("ak,kl,bl->ab", T, Gb, T)
        return jeinsum("ak,ab,bl,lj->kj", T, jinv(M), T, Gb)

    @cached_property
    def induced_metric(self) -> np.ndarray:
        return np.einsum("Nak,kl,Nbl->Nab", self.T.val, self.G, self.T.val)

    @cached_property
    def tan(self) -> Jet:
        return self._projector(range(self.m))

    @cached_property
    def nor(self) -> Jet:
        t = self.tan
        return Jet(_batch(np.eye(self.n), self.N) - t.val, -t.der)

    @cached_property
    def P(self) -> Jet:
        return self._projector(self.sub.split.d)

    @cached_property
    def Q(self) -> Jet:
        return self._projector(self.sub.split.d_perp)

    # value-level algebra
    @staticmethod
    def apply(op, v):
        op = op.val if isinstance(op, Jet) else op
        return np.einsum("Nkj,Nj->Nk", op, v)

    def g(self, a, b):
        return np.einsum("Ni,ij,Nj->N", a, self.G, b)

    def eta(self, v):
        return np.einsum("Nj,Nj->N", self.eta_jet.val, v)

    def phi(self, v):
        return self.apply(self.phi_jet, v)

    def Phi(self, a, b):
        return self.g(self.phi(a), b)

    def xi_times(self, f):
        return f[:, None] * self.xi

    # fields
    def field(self, coef: np.ndarray) -> Jet:
        """``sum_a coef[N, a] T_a`` with constant coefficients."""
        return jeinsum("a,ak->k", np.asarray(coef, dtype=float), self.T)

    def const_coef(self, c) -> np.ndarray:
        return np.broadcast_to(np.asarray(c, dtype=float), (self.N, self.m)).copy()

    def op_field(self, op: Jet, W: Jet) -> Jet:
        return jeinsum("kj,j->k", op, W)

    def du(self, X: np.ndarray) -> np.ndarray:
        """Sub-coordinate components of a tangent vector ``X``."""
        coord = np.einsum("Nbi,Ni->Nb", self.F, X)
        return np.einsum("Nmb,Nb->Nm", np.linalg.pinv(self.J), coord)

    def nabla(self, gam: Jet, X: np.ndarray, W: Jet) -> np.ndarray:
        return W.along(self.du(X)) + np.einsum("Ni,Nj,Nijk->Nk", X, W.val, gam.val)

    def bracket(self, Y: Jet, Z: Jet) -> np.ndarray:
        gam = self.gamma(self.lc)
        return self.nabla(gam, Y.val, Z) - self.nabla(gam, Z.val, Y)

    # normal frames
    @cached_property
    def normal_basis(self) -> np.ndarray:
        """Orthonormal normal vectors ``[N, n - m, n]`` by pivoted completion."""
        return _orthonormal_columns(self.nor.val, self.G, self.sub.normal_pivots, self.n - self.m)

    @cached_property
    def mu_basis(self) -> np.ndarray:
        """Orthonormal basis of the complement of phi(D_perp) in the normal space."""
        if not self.sub.split.d_perp:
            return self.normal_basis
        Td = self.T.val[:, list(self.sub.split.d_perp)]
        pdp = np.einsum("Nkj,Naj->Nak", self.phi_jet.val, Td)  # phi(D_perp), may contain phi(xi) = 0
        out = []
        for s in range(self.N):
            ws = _gram_schmidt(pdp[s], self.G)
            proj = np.eye(self.n) - sum((np.outer(w, w @ self.G) / (w @ self.G @ w) for w in ws), np.zeros((self.n, self.n)))
            op = proj @ self.nor.val[s]
            out.append(_orthonormal_columns(op[None], self.G, self.sub.normal_pivots, self.n - self.m - len(ws))[0])
        return np.stack(out)


def _gram_schmidt(vectors, G, tol: float = 1e-10) -> list[np.ndarray]:
    """Metric Gram-Schmidt that skips null and dependent vectors."""
    got = []
    for v in vectors:
        v = np.array(v, dtype=float)
        for w in got:
            v = v - (w @ G @ v) / (w @ G @ w) * w
        nn = v @ G @ v
        if abs(nn) > tol:
            got.append(v / np.sqrt(abs(nn)))
    return got


def _orthonormal_columns(op: np.ndarray, G: np.ndarray, pivots, count: int) -> np.ndarray:
    """Metric Gram-Schmidt of ``op @ e_k`` in pivot order, keeping ``count`` vectors."""
    N, n = op.shape[0], op.shape[-1]
    out = np.zeros((N, count, n))
    for s in range(N):
        got = _gram_schmidt((op[s][:, k] for k in pivots), G)[:count]
        if len(got) < count:
            raise SubmanifoldError("could not complete a normal frame")
        out[s] = np.array(got) if count else out[s]
    return out


class Submanifold:
    """A validated CR-submanifold handle."""

    def __init__(self, emb: EmbeddingSpec, split: DistributionSplit, orientation: str,
                 normal_pivots: tuple[int, ...]):
        self.emb = emb
        self.split = split
        self.orientation = orientation
        self.normal_pivots = normal_pivots

    @property
    def ambient(self) -> LPStructure:
        return self.emb.ambient

    def at(self, u) -> SubmanifoldAt:
        u = np.atleast_2d(np.asarray(u, dtype=float))
        if u.shape[1] != self.emb.dimension:
            raise SubmanifoldError(f"sub-points must have {self.emb.dimension} coordinates")
        return SubmanifoldAt(self, u)

    def sample(self, seed: int, salt: str, count: int) -> SubmanifoldAt:
        return self.at(Sampler(seed, salt).points(self.emb.domain, count))


def _domain_center(domain) -> np.ndarray:
    return np.array([(lo + hi) / 2 for lo, hi in domain])


def build_submanifold(emb: EmbeddingSpec, split: DistributionSplit, seed: int = 0,
                      count: int = VALIDATION_SAMPLES) -> Submanifold:
    """Validate the embedding and the CR split on seeded sample points."""
    m, n = emb.dimension, emb.ambient.dimension
    idx = sorted(split.d + split.d_perp)
    if idx != list(range(m)):
        raise SubmanifoldError("D and D_perp must partition the tangent frame indices")

    pts = np.vstack([_domain_center(emb.domain), Sampler(seed, "cr_validation").points(emb.domain, count)])
    # provisional handle to evaluate projections; pivots fixed below
    probe = Submanifold(emb, split, XI_MIXED, tuple(range(n)))
    try:
        sa = probe.at(pts)
        T = sa.T.val
        Mi = sa.induced_metric
    except ManifoldError as exc:
        raise SubmanifoldError(f"embedding cannot be evaluated: {exc}") from exc
    if np.any(np.abs(np.linalg.det(Mi)) <= 1e-10):
        raise SubmanifoldError("degenerate induced metric")

    # tangent frame must lie in the image of the Jacobian
    Jf = np.linalg.solve(sa.F, sa.J)  # frame components of d(map)/du
    for s in range(len(pts)):
        if np.linalg.matrix_rank(Jf[s], tol=1e-9) < m:
            raise SubmanifoldError("map is not an immersion at a sampled point")
        if np.linalg.matrix_rank(np.hstack([Jf[s], T[s].T]), tol=1e-9) > m:
            raise SubmanifoldError("tangent frame is not tangent to the image of the map")

    xi = sa.xi
    if max_norm(xi - sa.apply(sa.tan, xi)) > CR_TOL:
        raise SubmanifoldError("xi is not tangent to the submanifold")
    for a in split.d:
        v = sa.phi(T[:, a])
        if max_norm(v - sa.apply(sa.P, v)) > CR_TOL:
            raise SubmanifoldError("phi(D) is not contained in D")
    for a in split.d_perp:
        if max_norm(sa.apply(sa.tan, sa.phi(T[:, a]))) > CR_TOL:
            raise SubmanifoldError("phi(D_perp) is not normal (D_perp is not totally real)")
    for a in split.d:
        for b in split.d_perp:
            if max_norm(sa.g(T[:, a], T[:, b])) > CR_TOL:
                raise SubmanifoldError("D and D_perp are not orthogonal")

    in_d = max_norm(xi - sa.apply(sa.P, xi)) <= CR_TOL
    in_dp = max_norm(xi - sa.apply(sa.Q, xi)) <= CR_TOL
    orientation = XI_HORIZONTAL if in_d else XI_VERTICAL if in_dp else XI_MIXED
    if split.orientation is not None and split.orientation != orientation:
        raise SubmanifoldError(f"declared orientation {split.orientation} but xi membership gives {orientation}")

    # deterministic pivots: column-pivoted order of the normal projector at the center
    nor0 = sa.nor.val[0]
    norms = np.linalg.norm(nor0, axis=0)
    pivots = tuple(int(k) for k in np.argsort(-np.round(norms, 12), kind="stable"))
    return Submanifold(emb, split, orientation, pivots)


# ---------------------------------------------------------------------------
# pointwise API


def _coef(sub: Submanifold, X) -> np.ndarray:
    m = sub.emb.dimension
    if isinstance(X, (int, np.integer)):
        return np.eye(m)[X]
    v = np.asarray(X, dtype=float)
    if v.shape != (m,):
        raise ValueError(f"expected {m} tangent-frame coefficients")
    return v


def split_tangent_normal(sub: Submanifold, X, p) -> SplitVector:
    """Split an ambient vector at sub-point ``p`` into P, Q, and B, C of its normal part."""
    sa = sub.at(p)
    x = as_frame_vector(sub.ambient.spec, X, sa.x[0])[None]
    nrm = sa.apply(sa.nor, x)
    pn = sa.phi(nrm)
    parts = (sa.apply(sa.P, x), sa.apply(sa.Q, x), sa.apply(sa.tan, pn), sa.apply(sa.nor, pn), nrm)
    return SplitVector(*(VectorValue(v[0]) for v in parts))


def second_fundamental_form(sub: Submanifold, conn: Connection, X, Y, p, N=None) -> SecondFundamental:
    """Gauss and Weingarten data at sub-point ``p``.

    ``X``, ``Y`` are tangent-frame coefficient vectors (or indices); ``Y``
    is extended with constant coefficients.  ``N`` is an ambient normal
    vector extended through the normal projector; it defaults to the first
    vector of the normal frame.
    """
    sa = sub.at(p)
    x = sa.field(sa.const_coef(_coef(sub, X))).val
    Yf = sa.field(sa.const_coef(_coef(sub, Y)))
    lc = sa.gamma(sa.lc)
    gam = sa.gamma(conn)
    n0 = sa.normal_basis[:, 0] if N is None else as_frame_vector(sub.ambient.spec, N, sa.x[0])[None]
    Nf = sa.op_field(sa.nor, Jet.constant(n0, sa.m))
    d_lc = sa.nabla(lc, x, Yf)
    d_c = sa.nabla(gam, x, Yf)
    dN = sa.nabla(lc, x, Nf)
    vals = (
        sa.apply(sa.nor, d_lc),
        sa.apply(sa.nor, d_c),
        -sa.apply(sa.tan, dN),
        sa.apply(sa.nor, dN),
        sa.apply(sa.tan, d_c),
    )
    return SecondFundamental(*(VectorValue(v[0]) for v in vals))


# ---------------------------------------------------------------------------
# suites


class _Fields:
    """Seeded constant-coefficient fields restricted to index sets."""

    def __init__(self, sa: SubmanifoldAt, smp: Sampler):
        self.sa = sa
        self.smp = smp

    def draw(self, idx, slot=0) -> Jet | None:
        if len(idx) == 0:
            return None
        c = np.zeros((self.sa.N, self.sa.m))
        c[:, list(idx)] = self.smp.vectors(self.sa.N, len(idx), slot)
        return self.sa.field(c)


def _params(params) -> ConnectionParams:
    return params if isinstance(params, ConnectionParams) else ConnectionParams(*params)


def cr_structure_suite(sub: Submanifold, params=None, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    smp = Sampler(seed, "cr_structure")
    sa = sub.at(smp.points(sub.emb.domain, count))
    split = sub.split
    allidx = range(sub.emb.dimension)
    fld = _Fields(sa, smp)
    X = fld.draw(allidx).val
    amb = smp.rng.uniform(-1, 1, (count, sa.n))
    t, nr, P, Q = sa.tan.val, sa.nor.val, sa.P.val, sa.Q.val

    rep = IdentityReport("cr_structure", seed)
    rep.add("xi_tangent", max_norm(sa.xi - sa.apply(t, sa.xi)), samples=count)
    dvals = [sa.T.val[:, a] for a in split.d]
    dpvals = [sa.T.val[:, a] for a in split.d_perp]
    res = max((max_norm(sa.phi(v) - sa.apply(P, sa.phi(v))) for v in dvals), default=0.0)
    rep.add("phi_d_in_d", res, samples=count, status=VACUOUS if not dvals else "")
    res = max((max_norm(sa.apply(t, sa.phi(v))) for v in dpvals), default=0.0)
    rep.add("phi_d_perp_normal", res, samples=count, status=VACUOUS if not dpvals else "")
    rep.add("projector_idempotent", max(max_norm(t @ t - t), max_norm(nr @ nr - nr)), EXACT_TOL, count)
    rep.add("projectors_sum_identity", max_norm(t + nr - np.eye(sa.n)), EXACT_TOL, count)
    rep.add("tangent_normal_orthogonal", max_norm(sa.g(sa.apply(t, amb), sa.apply(nr, amb))), samples=count)
    rep.add("p_plus_q", max_norm(sa.apply(P, X) + sa.apply(Q, X) - X), samples=count)
    rep.add("pq_annihilate", max(max_norm(P @ Q), max_norm(Q @ P)), samples=count)
    nv = sa.apply(nr, amb)
    pn = sa.phi(nv)
    B, C = sa.apply(t, pn), sa.apply(nr, pn)
    res = max_norm(B - sa.apply(Q, B))
    mu = sa.mu_basis
    c_in_mu = C - np.einsum("Nr,Nrk->Nk", np.einsum("Nrk,kl,Nl->Nr", mu, sa.G, C), mu)
    rep.add("normal_split_b_in_d_perp", res, samples=count)
    rep.add("normal_split_c_in_mu", max_norm(c_in_mu), samples=count)
    phimu = np.einsum("Nkj,Nrj->Nrk", sa.phi_jet.val, mu)
    back = phimu - np.einsum("Nrs,Nsk->Nrk", np.einsum("Nrk,kl,Nsl->Nrs", phimu, sa.G, mu), mu)
    rep.add("mu_phi_invariant", max_norm(back), samples=count)
    if sub.orientation == XI_HORIZONTAL:
        rep.add("orientation", max_norm(sa.xi - sa.apply(P, sa.xi)), samples=count)
    elif sub.orientation == XI_VERTICAL:
        rep.add("orientation", max_norm(sa.xi - sa.apply(Q, sa.xi)), samples=count)
    else:
        rep.add("orientation", None, samples=count, status=NOT_APPLICABLE)
    return rep


def generalized_gauss_weingarten_residuals(sub: Submanifold, params, seed: int = 0,
                                           count: int = DEFAULT_SAMPLES) -> IdentityReport:
    params = _params(params)
    a, b = params
    smp = Sampler(seed, "gauss_weingarten")
    sa = sub.at(smp.points(sub.emb.domain, count))
    fld = _Fields(sa, smp)
    allidx = range(sub.emb.dimension)
    Xf, Yf = fld.draw(allidx, 0), fld.draw(allidx, 1)
    X, Y = Xf.val, Yf.val
    nb = sa.normal_basis
    ncoef = smp.vectors(count, nb.shape[1], 2)
    n0 = np.einsum("Nr,Nrk->Nk", ncoef, nb)
    Nf = sa.op_field(sa.nor, Jet.constant(n0, sa.m))
    lc = sa.gamma(sa.lc)
    gen = sa.gamma(sa.generalized(params))
    t, nr, P, Q = sa.tan.val, sa.nor.val, sa.P.val, sa.Q.val
    ap = sa.apply

    dl, dg = sa.nabla(lc, X, Yf), sa.nabla(gen, X, Yf)
    h, hb = ap(nr, dl), ap(nr, dg)
    ind, indb = ap(t, dl), ap(t, dg)
    eY = sa.eta(Y)[:, None]
    phiQX = sa.phi(ap(Q, X))
    gXY = sa.g(X, Y)
    PhiXY = sa.Phi(X, Y)
    Pxi, Qxi = ap(P, sa.xi), ap(Q, sa.xi)

    rep = IdentityReport("gauss_weingarten", seed)
    rep.add("h_bar_vs_h", max_norm(hb - h - b * eY * phiQX), samples=count)
    rhs = (ap(P, ind) + a * eY * ap(P, X) - a * gXY[:, None] * Pxi + b * eY * sa.phi(ap(P, X))
           - b * PhiXY[:, None] * Pxi)
    rep.add("tangential_p", max_norm(ap(P, indb) - rhs), samples=count)
    rhs = ap(Q, ind) + a * eY * ap(Q, X) - a * gXY[:, None] * Qxi - b * PhiXY[:, None] * Qxi
    rep.add("tangential_q", max_norm(ap(Q, indb) - rhs), samples=count)
    rep.add("gauss_form", max_norm(dg - (indb + h + b * eY * phiQX)), samples=count)

    dN = sa.nabla(gen, X, Nf)
    dN_lc = sa.nabla(lc, X, Nf)
    A_N, perp = -ap(t, dN_lc), ap(nr, dN_lc)
    Nv = Nf.val
    eN = sa.eta(Nv)[:, None]
    rhs = -A_N + perp + a * eN * X + b * eN * sa.phi(X) - b * sa.xi_times(sa.g(sa.phi(X), Nv))
    rep.add("weingarten_form", max_norm(dN - rhs), samples=count)
    rep.add("weingarten_duality", max_norm(sa.g(h, Nv) - sa.g(A_N, Y)), samples=count)
    rep.add("h_symmetric", max_norm(h - ap(nr, sa.nabla(lc, Y, Xf))), samples=count)

    _induced_connection_entries(rep, sub, sa, fld, lc, gen, params, count)
    return rep


def _induced_connection_entries(rep, sub, sa, fld, lc, gen, params, count):
    a, b = params
    split = sub.split
    ap = sa.apply
    t, Q, P = sa.tan.val, sa.Q.val, sa.P.val

    def induced_generalized(idx, vertical: bool):
        Xf, Yf, Zf = fld.draw(idx, 0), fld.draw(idx, 1), fld.draw(idx, 2)
        X, Y, Z = Xf.val, Yf.val, Zf.val
        ind = ap(t, sa.nabla(lc, X, Yf))
        indb = ap(t, sa.nabla(gen, X, Yf))
        eY = sa.eta(Y)[:, None]
        add = a * (eY * X - sa.xi_times(sa.g(X, Y)))
        if vertical:
            add = add - b * sa.xi_times(sa.Phi(X, Y))
        else:
            add = add + b * (eY * sa.phi(X) - sa.xi_times(sa.Phi(X, Y)))
        # parallel: the induced derivative of a distribution field stays in the distribution
        other = Q if not vertical else P
        hyp = max_norm(ap(other, indb))
        return X, Y, Z, Xf, Yf, Zf, ind, indb, add, hyp

    # (i) xi-horizontal, X, Y in D
    if sub.orientation == XI_HORIZONTAL and split.d:
        X, Y, Z, Xf, Yf, Zf, ind, indb, add, hyp = induced_generalized(split.d, vertical=False)
        ok = hyp <= IDENTITY_TOL
        st = "" if ok else MEASURED
        fl = () if ok else ("hypothesis_not_met",)
        rep.add("thm53_induced_form", max_norm(indb - ind - add), samples=count, status=st, flags=fl)
        # metric: X g(Y,Z) - g(nabla'_X Y, Z) - g(Y, nabla'_X Z)
        gYZ = jeinsum("k,kl,l->", Yf, _batch(sa.G, sa.N), Zf)
        met = gYZ.along(sa.du(X)) - sa.g(indb, Z) - sa.g(Y, ap(t, sa.nabla(gen, X, Zf)))
        rep.add("thm53_induced_metric", max_norm(met), samples=count, status=st, flags=fl)
        tor = indb - ap(t, sa.nabla(gen, Y, Xf)) - sa.bracket(Xf, Yf)
        eX = sa.eta(X)[:, None]
        eY = sa.eta(Y)[:, None]
        model = a * (eY * X - eX * Y) + b * (eY * sa.phi(X) - eX * sa.phi(Y))
        rep.add("thm53_induced_torsion", max_norm(tor - model), samples=count, status=st, flags=fl)
    else:
        for i in ("thm53_induced_form", "thm53_induced_metric", "thm53_induced_torsion"):
            rep.add(i, None, samples=count, status=NOT_APPLICABLE)

    # (ii) xi-vertical, X, Y, Z in D_perp
    if sub.orientation == XI_VERTICAL and split.d_perp:
        X, Y, Z, Xf, Yf, Zf, ind, indb, add, hyp = induced_generalized(split.d_perp, vertical=True)
        ok = hyp <= IDENTITY_TOL
        st = "" if ok else MEASURED
        fl = () if ok else ("hypothesis_not_met",)
        rep.add("thm53_vertical_form", max_norm(indb - ind - add), samples=count, status=st, flags=fl)
        gYZ = jeinsum("k,kl,l->", Yf, _batch(sa.G, sa.N), Zf)
        dev = gYZ.along(sa.du(X)) - sa.g(indb, Z) - sa.g(Y, ap(t, sa.nabla(gen, X, Zf)))
        rhs = b * (sa.eta(Y) * sa.Phi(X, Z) + sa.eta(Z) * sa.Phi(X, Y))
        rep.add("thm53_metric_deviation", max_norm(dev - rhs), samples=count, status=st, flags=fl)
    else:
        for i in ("thm53_vertical_form", "thm53_metric_deviation"):
            rep.add(i, None, samples=count, status=NOT_APPLICABLE)


def integrability_tests(sub: Submanifold, params, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    """Bracket closure of D and D_perp against the algebraic criteria.

    Agreement entries compare truth values: residual 0 when the criterion
    and the Frobenius test agree, 1 otherwise.
    """
    params = _params(params)
    a, b = params
    smp = Sampler(seed, "integrability")
    sa = sub.at(smp.points(sub.emb.domain, count))
    fld = _Fields(sa, smp)
    split = sub.split
    lc = sa.gamma(sa.lc)
    ap = sa.apply
    t, nr, P, Q = sa.tan.val, sa.nor.val, sa.P.val, sa.Q.val
    rep = IdentityReport("integrability", seed)

    def h(Xv, Yf):
        return ap(nr, sa.nabla(lc, Xv, Yf))

    def A(Nf, Xv):
        return -ap(t, sa.nabla(lc, Xv, Nf))

    # D
    if split.d:
        Xf, Yf = fld.draw(split.d, 0), fld.draw(split.d, 1)
        frob = max_norm(ap(Q, sa.bracket(Xf, Yf)))
        rep.add("frobenius_d", frob, samples=count)
        if sub.orientation == XI_HORIZONTAL:
            pX, pY = sa.op_field(sa.phi_jet, Xf), sa.op_field(sa.phi_jet, Yf)
            crit = max_norm(h(pX.val, Yf) - h(pY.val, Xf))
            rep.add("criterion_d", crit, samples=count)
            agree = (crit <= IDENTITY_TOL) == (frob <= IDENTITY_TOL)
            rep.add("agreement_d", 0.0 if agree else 1.0, 0.0, count)
        else:
            rep.add("criterion_d", None, samples=count, status=NOT_APPLICABLE)
            rep.add("agreement_d", None, 0.0, count, status=NOT_APPLICABLE)
    else:
        for i in ("frobenius_d", "criterion_d", "agreement_d"):
            rep.add(i, 0.0, samples=count, status=VACUOUS)

    # D_perp
    lemma_ids = ("criterion_d_perp", "agreement_d_perp", "lemma55", "lemma55_corrected",
                 "corollary_beta1", "corollary_semisym")
    if not split.d_perp:
        rep.add("frobenius_d_perp", 0.0, samples=count, status=VACUOUS)
        for i in lemma_ids:
            rep.add(i, 0.0, samples=count, status=VACUOUS)
        return rep

    Yf, Zf = fld.draw(split.d_perp, 0), fld.draw(split.d_perp, 1)
    br = sa.bracket(Yf, Zf)
    frob = max_norm(ap(P, br))
    rep.add("frobenius_d_perp", frob, samples=count)
    if sub.orientation != XI_VERTICAL:
        for i in lemma_ids:
            rep.add(i, None, samples=count, status=NOT_APPLICABLE)
        return rep

    Y, Z = Yf.val, Zf.val
    pY, pZ = sa.op_field(sa.phi_jet, Yf), sa.op_field(sa.phi_jet, Zf)
    AA = A(pY, Z) - A(pZ, Y)
    eY, eZ = sa.eta(Y)[:, None], sa.eta(Z)[:, None]
    swap = eY * Z - eZ * Y

    def criterion(beta):
        return AA - (beta - 1) * swap

    crit = max_norm(criterion(b))
    rep.add("criterion_d_perp", crit, samples=count, flags=("d_perp_criterion_beta_coefficient",))
    agree = (crit <= IDENTITY_TOL) == (frob <= IDENTITY_TOL)
    rep.add("agreement_d_perp", 0.0 if agree else 1.0, 0.0, count)
    lhs = sa.phi(ap(P, br))
    rep.add("lemma55", max_norm(lhs - (AA + (b - 1) * (eZ * Y - eY * Z))), samples=count,
            flags=("d_perp_criterion_beta_coefficient",))
    rep.add("lemma55_corrected", max_norm(lhs - (AA - (eZ * Y - eY * Z))), samples=count)
    rep.add("corollary_beta1", max_norm(criterion(1.0) - AA), samples=count)
    rep.add("corollary_semisym", max_norm(criterion(0.0) - (AA - (eZ * Y - eY * Z))), samples=count)
    return rep


def lemma54_and_prop59_residuals(sub: Submanifold, params, seed: int = 0, count: int = DEFAULT_SAMPLES) -> IdentityReport:
    params = _params(params)
    a, b = params
    smp = Sampler(seed, "lemma54")
    sa = sub.at(smp.points(sub.emb.domain, count))
    fld = _Fields(sa, smp)
    split = sub.split
    ap = sa.apply
    t, nr, P, Q = sa.tan.val, sa.nor.val, sa.P.val, sa.Q.val
    lc = sa.gamma(sa.lc)
    gen = sa.gamma(sa.generalized(params))
    allidx = range(sub.emb.dimension)
    Xf, Yf = fld.draw(allidx, 0), fld.draw(allidx, 1)
    X, Y = Xf.val, Yf.val

    def h(Xv, Wf):
        return ap(nr, sa.nabla(lc, Xv, Wf))

    def ind(gam, Xv, Wf):
        return ap(t, sa.nabla(gam, Xv, Wf))

    def C(v):
        return ap(nr, sa.phi(v))

    def B(v):
        return ap(t, sa.phi(v))

    PY = sa.op_field(sa.P, Yf)
    QY = sa.op_field(sa.Q, Yf)
    phiPY = sa.op_field(sa.phi_jet, PY)
    phiQY = sa.op_field(sa.phi_jet, QY)
    QX = ap(Q, X)
    phiQX = sa.phi(QX)
    eY = sa.eta(Y)[:, None]
    xi = sa.xi
    K = (1 - b) * sa.g(X, Y) + (2 - 2 * b) * sa.eta(X) * sa.eta(Y) - a * sa.g(X, sa.phi(Y))
    hXY = h(X, Yf)
    indb_XY = ind(gen, X, Yf)
    ind_XY = ind(lc, X, Yf)
    perp = ap(nr, sa.nabla(lc, X, phiQY))
    A_phiQY = -ap(t, sa.nabla(lc, X, phiQY))
    indb_phiPY = ind(gen, X, phiPY)
    gcorr = b * sa.g(sa.phi(X), phiQY.val)
    eQX = sa.eta(QX)[:, None]

    rep = IdentityReport("lemma54", seed)
    lhs = h(X, phiPY) + b * eY * phiQX + perp
    rhs = C(hXY) - a * eY * phiQX + sa.phi(ap(Q, indb_XY))
    rep.add("eq_3_15", max_norm(lhs - rhs), samples=count, flags=("induced_identity_spurious_beta_term",))
    rep.add("eq_3_15_corrected", max_norm(lhs - b * eY * phiQX - rhs), samples=count)

    lhs = ap(P, indb_phiPY) - ap(P, A_phiQY) - gcorr[:, None] * ap(P, xi)
    common = K[:, None] * ap(P, xi) + (1 - b) * eY * ap(P, X) - a * eY * sa.phi(ap(P, X)) + b * eY * eQX * ap(P, xi)
    flags = ("submanifold_K_read_as_etaX_etaY",)
    rep.add("eq_3_16", max_norm(lhs - common - sa.phi(ap(P, indb_XY))), samples=count, flags=flags)
    rep.add("eq_3_16_as_printed", max_norm(lhs - common - sa.phi(ap(P, ind_XY))), samples=count,
            status=MEASURED, flags=flags + ("induced_identity_printed_uses_lc",))

    lhs = ap(Q, indb_phiPY) - ap(Q, A_phiQY) - gcorr[:, None] * ap(Q, xi)
    rhs = (K[:, None] * ap(Q, xi) + (1 - b) * eY * QX + B(hXY) + b * eY * QX + b * eY * eQX * ap(Q, xi))
    rep.add("eq_3_17", max_norm(lhs - rhs), samples=count, flags=flags)

    # the C h(phi X, Y) chain and its intermediate steps: xi-vertical, X, Y in D
    ids = ("prop59_chain", "eq_3_20_q_component", "eq_3_244_membership")
    if not split.d:
        for i in ids:
            rep.add(i, 0.0, samples=count, status=VACUOUS)
        return rep
    DXf, DYf = fld.draw(split.d, 3), fld.draw(split.d, 4)
    DX, DY = DXf.val, DYf.val
    pDX, pDY = sa.op_field(sa.phi_jet, DXf), sa.op_field(sa.phi_jet, DYf)
    hD = h(DX, DYf)
    chain = max(
        max_norm(sa.phi(C(hD)) - C(h(pDX.val, DYf))),
        max_norm(C(h(pDX.val, DYf)) - C(h(DX, pDY))),
    )
    hyp = sub.orientation == XI_VERTICAL
    st = "" if hyp else MEASURED
    fl = () if hyp else ("hypothesis_not_met",)
    rep.add("prop59_chain", chain, samples=count, status=st, flags=fl)
    lhs = ap(Q, ind(gen, DX, pDY))
    rhs = ((1 - b) * sa.g(DX, DY) - a * sa.g(DX, pDY.val))[:, None] * ap(Q, xi) + B(hD)
    rep.add("eq_3_20_q_component", max_norm(lhs - rhs), samples=count, status=st, flags=fl)
    memb = ap(Q, ind(gen, pDX.val, pDY) - ind(gen, DY, DXf))
    rep.add("eq_3_244_membership", max_norm(memb), samples=count, status=st, flags=fl)
    return rep


# ---------------------------------------------------------------------------
# shipped example


def build_example3_leaf(x0: float = 0.0) -> Submanifold:
    """The leaf ``{x = x0}`` of span{nu1, nu3} in the 3-dimensional example."""
    from .structure import build_example3

    st = build_example3()
    emb = EmbeddingSpec(
        st, ("u", "v"), (x0, "u", "v"),
        ((1, 0, 0), (0, 0, 1)),
        name="example3-leaf",
    )
    return build_submanifold(emb, DistributionSplit((0, 1), ()))
