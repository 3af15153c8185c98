"""Smith normal form over the residue rings Z/p^K.

Elimination uses minimum-valuation pivoting.  When ``p^K < 2^31`` the work
is done in ``int64`` numpy arrays (every product fits in 63 bits); larger
moduli fall back to ``object`` arrays of Python ints.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

INT64_LIMIT = 2 ** 31


def _dtype_for(modulus):
    return np.int64 if modulus < INT64_LIMIT else object


def as_mod_array(a, modulus):
    """Copy ``a`` into a reduced array of the dtype suited to ``modulus``."""
    dt = _dtype_for(modulus)
    if dt is np.int64:
        arr = np.array(a, dtype=object) % modulus
        return arr.astype(np.int64)
    return np.array(a, dtype=object) % modulus


def matmul_mod(a, b, modulus):
    """``a @ b mod modulus`` without int64 overflow."""
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=_dtype_for(modulus))
    if a.dtype == object or b.dtype == object or modulus >= INT64_LIMIT:
        return (np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)) % modulus
    if a.shape[1] * (modulus - 1) ** 2 < 2 ** 53:
        # every partial sum is an integer below 2^53, so BLAS in float64 is exact
        prod = np.asarray(a % modulus, dtype=np.float64) @ np.asarray(b % modulus, dtype=np.float64)
        return (prod.astype(np.int64)) % modulus
    # split a into 16-bit limbs so partial sums stay below 2^63
    lo = a & 0xFFFF
    hi = a >> 16
    out = (hi @ b) % modulus
    out = (out * 65536 + (lo @ b) % modulus) % modulus
    return out


def _eye(n, dt):
    if dt == object:
        return np.array(np.eye(n, dtype=np.int64), dtype=object)
    return np.eye(n, dtype=dt)


@dataclass
class SmithForm:
    """``U @ A @ V = diag(pivots)`` modulo ``p^K``.

    ``valuations[i]`` is the p-adic valuation of the i-th pivot, or ``K``
    when the pivot vanishes modulo ``p^K``.  ``Uinv`` is the inverse of ``U``.
    """

    p: int
    K: int
    valuations: list
    pivots: list
    U: Optional[np.ndarray]
    Uinv: Optional[np.ndarray]
    V: Optional[np.ndarray]
    Vinv: Optional[np.ndarray]
    shape: tuple

    @property
    def modulus(self):
        return self.p ** self.K

    @property
    def nonzero_count(self):
        return sum(1 for v in self.valuations if v < self.K)


def smith_form(A, p: int, K: int, transforms: bool = True) -> SmithForm:
    """Smith normal form of an integer matrix modulo ``p^K``."""
    m = p ** K
    S = as_mod_array(A, m)
    if S.ndim != 2:
        S = S.reshape(len(A), -1)
    R, C = S.shape
    dt = S.dtype
    U = Uinv = V = Vinv = None
    if transforms:
        U = _eye(R, dt)
        Uinv = _eye(R, dt)
        V = _eye(C, dt)
        Vinv = _eye(C, dt)
    valuations, pivots = [], []
    s = 0
    ps = 1
    n = min(R, C)
    for k in range(n):
        sub = S[k:, k:]
        idx = None
        while s < K:
            mask = (sub % (ps * p)) != 0
            if mask.any():
                idx = int(np.argmax(mask))
                break
            s += 1
            ps *= p
        if idx is None:
            valuations.extend([K] * (n - k))
            pivots.extend([0] * (n - k))
            break
        i, j = divmod(idx, sub.shape[1])
        i += k
        j += k
        if i != k:
            S[[k, i]] = S[[i, k]]
            if transforms:
                U[[k, i]] = U[[i, k]]
                Uinv[:, [k, i]] = Uinv[:, [i, k]]
        if j != k:
            S[:, [k, j]] = S[:, [j, k]]
            if transforms:
                V[:, [k, j]] = V[:, [j, k]]
                Vinv[[k, j]] = Vinv[[j, k]]
        piv = int(S[k, k])
        unit_mod = p ** (K - s)
        uinv = pow((piv // ps) % unit_mod, -1, unit_mod) if unit_mod > 1 else 0
        col = S[k + 1:, k]
        f = ((col // ps) * uinv) % unit_mod
        if f.any():
            S[k + 1:, k:] = (S[k + 1:, k:] - np.outer(f, S[k, k:]) % m) % m
            if transforms:
                U[k + 1:] = (U[k + 1:] - np.outer(f, U[k]) % m) % m
                Uinv[:, k] = (Uinv[:, k] + ((Uinv[:, k + 1:] * f) % m).sum(axis=1)) % m
        row = S[k, k + 1:]
        g = ((row // ps) * uinv) % unit_mod
        if g.any():
            S[k, k + 1:] = 0
            if transforms:
                V[:, k + 1:] = (V[:, k + 1:] - np.outer(V[:, k], g) % m) % m
                Vinv[k] = (Vinv[k] + ((Vinv[k + 1:] * g[:, None]) % m).sum(axis=0)) % m
        valuations.append(s)
        pivots.append(piv)
    return SmithForm(p, K, valuations, pivots, U, Uinv, V, Vinv, (R, C))


def subgroup_size_exponent(gens, orders, p: int) -> int:
    """log_p of the size of the subgroup of ``(+) Z/p^orders`` spanned by ``gens``.

    ``gens`` has one column per generator and one row per cyclic summand.
    """
    k = len(orders)
    if k == 0:
        return 0
    top = max(orders)
    if top == 0:
        return 0
    scale = np.array([p ** (top - c) for c in orders], dtype=object)
    G = (np.asarray(gens, dtype=object).reshape(k, -1) * scale[:, None])
    if G.shape[1] == 0:
        return 0
    sf = smith_form(G, p, top, transforms=False)
    return sum(top - v for v in sf.valuations)
