"""Manifolds given by a coordinate chart and a global frame.

The frame ``nu_1..nu_n`` is the primary representation: each field is a list
of coordinate components (``ScalarExpr``) and the metric is the constant
matrix ``g(nu_i, nu_j)``.  Vectors are handled in frame components unless a
:class:`VectorValue` says otherwise.

Array conventions used throughout the package (``N`` is the batch of sample
points):

* ``F[N, a, i]`` -- coordinate component ``a`` of ``nu_i``;
* ``c[N, i, j, k]`` -- structure functions, ``[nu_i, nu_j] = c_ijk nu_k``;
* jets differentiate with respect to the ambient coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .expr import ExpressionError, ScalarExpr, as_expr, evaluate_all
from .jet import Jet, jeinsum, jinv

DEGENERACY_TOL = 1e-10
FRAME_CONDITION_LIMIT = 1e10


class ManifoldError(ValueError):
    pass


class DomainViolation(ManifoldError):
    """A point lies outside the chart domain."""


@dataclass(frozen=True, eq=False)
class ManifoldSpec:
    coordinates: tuple[str, ...]
    frame: tuple[tuple[ScalarExpr, ...], ...]
    frame_metric: np.ndarray
    domain: tuple[tuple[float, float], ...] | None = None
    name: str = ""
    orthonormal: bool | None = None

    def __post_init__(self):
        n = len(self.coordinates)
        if n == 0:
            raise ManifoldError("dimension must be positive")
        if len(set(self.coordinates)) != n:
            raise ManifoldError("coordinate names must be distinct")
        if len(self.frame) != n:
            raise ManifoldError(f"dimension mismatch: {len(self.frame)} frame fields for {n} coordinates")
        frame = []
        for i, comps in enumerate(self.frame):
            if len(comps) != n:
                raise ManifoldError(
                    f"dimension mismatch: frame field {i + 1} has {len(comps)} components, expected {n}"
                )
            comps = tuple(as_expr(c) for c in comps)
            for c in comps:
                unknown = c.variables() - set(self.coordinates)
                if unknown:
                    raise ManifoldError(f"frame field {i + 1} uses unknown names {sorted(unknown)}")
            frame.append(comps)
        object.__setattr__(self, "frame", tuple(frame))

        g = np.array(self.frame_metric, dtype=float)
        if g.shape != (n, n):
            raise ManifoldError(f"dimension mismatch: metric is {g.shape}, expected {(n, n)}")
        if not np.allclose(g, g.T, atol=0, rtol=0):
            raise ManifoldError("frame metric is not symmetric")
        if abs(np.linalg.det(g)) <= DEGENERACY_TOL:
            raise ManifoldError("frame metric is degenerate")
        g.setflags(write=False)
        object.__setattr__(self, "frame_metric", g)

        if self.domain is None:
            object.__setattr__(self, "domain", tuple((-1.0, 1.0) for _ in range(n)))
        elif len(self.domain) != n or any(lo >= hi for lo, hi in self.domain):
            raise ManifoldError("domain must give one (min, max) pair per coordinate with min < max")

        diag = np.allclose(g, np.diag(np.diag(g))) and np.all(np.isin(np.diag(g), (-1.0, 1.0)))
        if self.orthonormal is None:
            object.__setattr__(self, "orthonormal", bool(diag))
        elif self.orthonormal and not diag:
            raise ManifoldError("frame declared orthonormal but the metric is not diag(+-1)")

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    @property
    def signature(self) -> tuple[int, ...] | None:
        """``eps_i = g(nu_i, nu_i)`` for orthonormal frames, else ``None``."""
        if not self.orthonormal:
            return None
        return tuple(int(v) for v in np.diag(self.frame_metric))

    @property
    def is_lorentzian(self) -> bool:
        return int(np.sum(np.linalg.eigvalsh(self.frame_metric) < 0)) == 1

    @cached_property
    def metric_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.frame_metric)

    @cached_property
    def _d1(self) -> np.ndarray:
        # d1[i][a][b] = d/dx_b of coordinate component a of nu_i
        return np.array(
            [[[c.diff(x) for x in self.coordinates] for c in comps] for comps in self.frame], dtype=object
        )

    @cached_property
    def _d2(self) -> np.ndarray:
        d1 = self._d1
        n = self.dimension
        out = np.empty((n, n, n, n), dtype=object)
        for idx in np.ndindex(d1.shape):
            for c, x in enumerate(self.coordinates):
                out[idx + (c,)] = d1[idx].diff(x)
        return out

    def env(self, points: np.ndarray) -> dict[str, np.ndarray]:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[-1] != self.dimension:
            raise ManifoldError(f"points must have {self.dimension} coordinates")
        return {x: points[:, a] for a, x in enumerate(self.coordinates)}

    def check_points(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.ndim != 2 or points.shape[1] != self.dimension:
            raise ManifoldError(f"points must have {self.dimension} coordinates")
        if not np.all(np.isfinite(points)):
            raise DomainViolation("point coordinates must be finite")
        lo = np.array([d[0] for d in self.domain])
        hi = np.array([d[1] for d in self.domain])
        if np.any(points < lo) or np.any(points > hi):
            raise DomainViolation("point outside the chart domain")
        return points


# ---------------------------------------------------------------------------
# batched evaluation


def frame_matrix(spec: ManifoldSpec, points) -> np.ndarray:
    """``F[N, a, i]``: coordinate component ``a`` of ``nu_i``."""
    pts = spec.check_points(points)
    comps = evaluate_all(spec.frame, spec.env(pts), (len(pts),))  # [N, i, a]
    F = np.swapaxes(comps, 1, 2)
    cond = np.linalg.cond(F)
    if np.any(~np.isfinite(cond)) or np.any(cond > FRAME_CONDITION_LIMIT):
        raise ManifoldError("frame is singular at a sampled point")
    return F


def frame_jets(spec: ManifoldSpec, points) -> tuple[Jet, Jet]:
    """Jets of ``F`` and of ``dF`` (``dF[N, a, i, b] = d_b F[a, i]``)."""
    pts = spec.check_points(points)
    env = spec.env(pts)
    N = len(pts)
    F = frame_matrix(spec, pts)
    d1 = np.moveaxis(evaluate_all(spec._d1, env, (N,)), 1, 2)  # [N, a, i, b]
    d2 = np.moveaxis(evaluate_all(spec._d2, env, (N,)), 1, 2)  # [N, a, i, b, c]
    return Jet(F, d1), Jet(d1, d2)


def expr_jet(exprs, coordinates: Sequence[str], points: np.ndarray, env=None) -> Jet:
    """Jet of a nested array of expressions with respect to ``coordinates``."""
    arr = np.asarray(exprs, dtype=object)
    pts = np.atleast_2d(points)
    env = env if env is not None else {x: pts[:, a] for a, x in enumerate(coordinates)}
    N = len(pts)
    val = evaluate_all(arr, env, (N,))
    darr = np.empty(arr.shape + (len(coordinates),), dtype=object)
    for idx in np.ndindex(arr.shape):
        for b, x in enumerate(coordinates):
            darr[idx + (b,)] = arr[idx].diff(x)
    der = evaluate_all(darr, env, (N,))
    return Jet(val, der)


def structure_functions(spec: ManifoldSpec, points) -> Jet:
    """Jet of ``c[N, i, j, k]`` with ``[nu_i, nu_j] = c_ijk nu_k``.

    Computed from exact first and second partial derivatives of the frame
    components; the derivative part is with respect to the coordinates.
    """
    Fj, dFj = frame_jets(spec, points)
    # coordinate components of [nu_i, nu_j]: nu_i^a d_a nu_j^c - nu_j^a d_a nu_i^c
    B = jeinsum("ai,cja->ijc", Fj, dFj)
    B = B - Jet(np.swapaxes(B.val, 1, 2), np.swapaxes(B.der, 1, 2))
    return jeinsum("kc,ijc->ijk", jinv(Fj), B)


def frame_derivative(jet: Jet, F: np.ndarray) -> np.ndarray:
    """``nu_m`` applied to every component: result ``[N, *shape, m]``."""
    return np.einsum("N...b,Nbm->N...m", jet.der, F)


# ---------------------------------------------------------------------------
# vectors


@dataclass(frozen=True, eq=False)
class VectorValue:
    """A tangent vector at one point, in the frame or the coordinate basis."""

    components: np.ndarray
    basis: str = "frame"  # "frame" | "coordinate"

    def __post_init__(self):
        if self.basis not in ("frame", "coordinate"):
            raise ValueError(f"unknown basis tag {self.basis!r}")
        object.__setattr__(self, "components", np.asarray(self.components, dtype=float))

    def to_frame(self, spec: ManifoldSpec, point) -> VectorValue:
        if self.basis == "frame":
            return self
        F = frame_matrix(spec, point)[0]
        try:
            comps = np.linalg.solve(F, self.components)
        except np.linalg.LinAlgError as exc:
            raise ManifoldError("frame matrix is singular at the point") from exc
        return VectorValue(comps, "frame")

    def to_coordinates(self, spec: ManifoldSpec, point) -> VectorValue:
        if self.basis == "coordinate":
            return self
        F = frame_matrix(spec, point)[0]
        return VectorValue(F @ self.components, "coordinate")

    def __repr__(self):
        return f"VectorValue({np.round(self.components, 12).tolist()}, basis={self.basis!r})"


def as_frame_vector(spec: ManifoldSpec, X, point=None) -> np.ndarray:
    """Frame components of ``X``: a field index, a coefficient sequence or a VectorValue."""
    n = spec.dimension
    if isinstance(X, VectorValue):
        if X.basis == "coordinate" and point is None:
            raise ValueError("a point is needed to convert coordinate components")
        return X.to_frame(spec, point).components
    if isinstance(X, (int, np.integer)):
        if not 0 <= X < n:
            raise IndexError(f"frame index {X} out of range")
        return np.eye(n)[X]
    v = np.asarray(X, dtype=float)
    if v.shape != (n,):
        raise ValueError(f"expected {n} frame coefficients")
    return v


@dataclass(frozen=True, eq=False)
class FrameField:
    """A vector field ``sum_i f_i nu_i`` with expression coefficients."""

    coefficients: tuple[ScalarExpr, ...]

    @classmethod
    def of(cls, spec: ManifoldSpec, X) -> FrameField:
        if isinstance(X, FrameField):
            return X
        if isinstance(X, (int, np.integer, VectorValue)):
            return cls(tuple(as_expr(float(c)) for c in as_frame_vector(spec, X)))
        coeffs = tuple(as_expr(c) for c in X)
        if len(coeffs) != spec.dimension:
            raise ValueError(f"expected {spec.dimension} coefficients")
        return cls(coeffs)

    def jet(self, spec: ManifoldSpec, points) -> Jet:
        return expr_jet(self.coefficients, spec.coordinates, spec.check_points(points))

    def scaled(self, f: ScalarExpr) -> FrameField:
        from .expr import mul

        return FrameField(tuple(mul(f, c) for c in self.coefficients))


# ---------------------------------------------------------------------------
# pointwise operations


def _point(spec: ManifoldSpec, p) -> np.ndarray:
    return spec.check_points(np.asarray(p, dtype=float).reshape(1, -1))


def lie_bracket(spec: ManifoldSpec, X, Y, p) -> VectorValue:
    """``[X, Y]`` at ``p`` in frame components.

    ``X``/``Y`` are frame indices, constant frame combinations or
    :class:`FrameField` instances with expression coefficients.
    """
    pts = _point(spec, p)
    Xf, Yf = FrameField.of(spec, X), FrameField.of(spec, Y)
    F = frame_matrix(spec, pts)
    c = structure_functions(spec, pts).val
    xj, yj = Xf.jet(spec, pts), Yf.jet(spec, pts)
    x, y = xj.val, yj.val
    # [fX_i, gX_j] = f g c_ij + f X_i(g) - g X_j(f)
    out = np.einsum("Ni,Nj,Nijk->Nk", x, y, c)
    out += np.einsum("Ni,Nki->Nk", x, frame_derivative(yj, F))
    out -= np.einsum("Ni,Nki->Nk", y, frame_derivative(xj, F))
    return VectorValue(out[0])


def inner(spec: ManifoldSpec, X, Y, p=None) -> float:
    """``g(X, Y)`` through the constant frame metric."""
    x = as_frame_vector(spec, X, p)
    y = as_frame_vector(spec, Y, p)
    return float(x @ spec.frame_metric @ y)


def directional_derivative(spec: ManifoldSpec, f, X, p) -> float:
    """``X(f)(p)`` by symbolic differentiation of the expression ``f``."""
    pts = _point(spec, p)
    f = as_expr(f)
    unknown = f.variables() - set(spec.coordinates)
    if unknown:
        raise ExpressionError(f"unknown names {sorted(unknown)}")
    Xf = FrameField.of(spec, X)
    F = frame_matrix(spec, pts)
    x = Xf.jet(spec, pts).val
    fj = expr_jet(f, spec.coordinates, pts)
    return float(np.einsum("Nb,Nbi,Ni->N", fj.der, F, x)[0])


def orthonormal_signature(spec: ManifoldSpec) -> np.ndarray:
    sig = spec.signature
    if sig is None:
        raise ManifoldError("operation requires an orthonormal frame")
    return np.array(sig, dtype=float)
