"""First-order jets: batched arrays carrying their exact derivatives.

A :class:`Jet` holds ``val`` with shape ``(N, *s)`` and ``der`` with shape
``(N, *s, m)``, the derivative with respect to ``m`` parameters (ambient
coordinates, or coordinates of a submanifold).  Products are propagated by
the Leibniz rule through :func:`jeinsum`, so derivatives stay exact as long
as the leaves are exact.
"""
from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Jet:
    val: np.ndarray
    der: np.ndarray

    @classmethod
    def constant(cls, val: np.ndarray, m: int) -> Jet:
        val = np.asarray(val, dtype=float)
        return cls(val, np.zeros(val.shape + (m,)))

    @property
    def nparams(self) -> int:
        return self.der.shape[-1]

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val + other.val, self.der + other.der)
        return Jet(self.val + other, self.der)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val - other.val, self.der - other.der)
        return Jet(self.val - other, self.der)

    def __rsub__(self, other):
        return Jet(other - self.val, -self.der)

    def __neg__(self):
        return Jet(-self.val, -self.der)

    def __mul__(self, c):
        """Multiply by a constant scalar."""
        return Jet(self.val * c, self.der * c)

    __rmul__ = __mul__

    def scale(self, f: Jet) -> Jet:
        """Multiply by a batched scalar jet ``f`` (shape ``(N,)``)."""
        extra = (None,) * (self.val.ndim - 1)
        fv = f.val[(slice(None),) + extra]
        fd = f.der[(slice(None),) + extra]
        return Jet(self.val * fv, self.der * fv[..., None] + self.val[..., None] * fd)

    def chain(self, jac: np.ndarray) -> Jet:
        """Reparametrise: ``jac[N, m_old, m_new]`` is d(old)/d(new)."""
        return Jet(self.val, np.einsum("N...a,Nab->N...b", self.der, jac))

    def along(self, direction: np.ndarray) -> np.ndarray:
        """Directional derivative along ``direction[N, m]`` (parameter components)."""
        d = direction.reshape(direction.shape[:1] + (1,) * (self.val.ndim - 1) + direction.shape[1:])
        return np.sum(self.der * d, axis=-1)

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.val[(slice(None),) + idx], self.der[(slice(None),) + idx])


def jeinsum(spec: str, *ops) -> Jet:
    """Batched einsum over jets and plain arrays with the Leibniz rule.

    ``spec`` omits the batch axis, e.g. ``"ij,j->i"``.  Every operand has a
    leading batch axis.  Plain arrays are treated as constants.
    """
    ins, out = spec.split("->")
    terms = ins.split(",")
    if len(terms) != len(ops):
        raise ValueError("operand count does not match the einsum spec")
    used = set(spec)
    free = [c for c in string.ascii_letters if c not in used]
    b, z = free[0], free[1]
    vals = [op.val if isinstance(op, Jet) else np.asarray(op) for op in ops]
    base = ",".join(b + t for t in terms) + "->" + b + out
    val = np.einsum(base, *vals, optimize=True)
    m = next(op.nparams for op in ops if isinstance(op, Jet))
    der = np.zeros(val.shape + (m,))
    for k, op in enumerate(ops):
        if not isinstance(op, Jet):
            continue
        t = [b + s for s in terms]
        t[k] = t[k] + z
        args = list(vals)
        args[k] = op.der
        der += np.einsum(",".join(t) + "->" + b + out + z, *args, optimize=True)
    return Jet(val, der)


def jinv(a: Jet) -> Jet:
    """Inverse of a batch of square matrices: d(A^-1) = -A^-1 dA A^-1."""
    inv = np.linalg.inv(a.val)
    der = -np.einsum("Nij,NjkZ,Nkl->NilZ", inv, a.der, inv)
    return Jet(inv, der)
