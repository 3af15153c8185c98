"""iota-twisted Pontryagin duals of finite Lambda-modules.

For ``M = (+) W/p^c_i`` with basis ``e_i`` the dual has the evaluation basis
``phi_k`` with ``phi_k(e_i) = delta_ik / p^c_k``.  T acts on the dual through
``(T phi)(m) = phi(iota(T) m)``.  Because the dual basis is recorded
explicitly, the double dual is the original module entry by entry.

Values in ``Q_p/Z_p`` are kept as integer numerators over the common
denominator ``p^c_1``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .elementary import ElementaryModule, twist
from .errors import InvalidInput
from .presented import FiniteWTModule, present_elementary, quotient_module
from .snf import INT64_LIMIT, matmul_mod, smith_form, subgroup_size_exponent


def _dt(m):
    return np.int64 if m < INT64_LIMIT else object


def _lifted(M: FiniteWTModule):
    m = M.p ** M.orders[0]
    return np.array(M.t_action, dtype=object).astype(_dt(m)) % m, m


def _eye(k, m):
    e = np.eye(k, dtype=np.int64)
    return e if _dt(m) is np.int64 else e.astype(object)


def unit_inverse(A, m, p):
    """``A^-1 mod m`` for ``A = I + N`` with ``N`` nilpotent mod p (Newton iteration)."""
    k = A.shape[0]
    I = _eye(k, m)
    X = (2 * I - A) % m
    while True:
        E = (I - matmul_mod(A, X, m)) % m
        if not E.any():
            return X
        X = (X + matmul_mod(X, E, m)) % m


def iota_matrix(t, m, p):
    """Matrix of ``iota(T) = (1+T)^-1 - 1`` given the matrix ``t`` of T."""
    k = t.shape[0]
    I = _eye(k, m)
    return (unit_inverse((I + t) % m, m, p) - I) % m


def dual(M: FiniteWTModule) -> FiniteWTModule:
    """iota-twisted dual in the evaluation basis."""
    k = len(M.orders)
    if k == 0:
        return FiniteWTModule(M.p, (), ())
    p, c = M.p, M.orders
    t, m = _lifted(M)
    S = iota_matrix(t, m, p)
    out = []
    for kk in range(k):
        row = []
        for i in range(k):
            s = int(S[i, kk])
            e = c[i] - c[kk]
            if e >= 0:
                val = s * p ** e
            else:
                if s % p ** (-e):  # pragma: no cover - guarded by the type invariant
                    raise InvalidInput("T-action is not well defined on the given orders")
                val = s // p ** (-e)
            row.append(val % p ** c[i])
        out.append(tuple(row))
    return FiniteWTModule(p, c, tuple(out))


@dataclass(frozen=True)
class PairingTable:
    """Pairing values ``numerators[i][k] / p^exponent`` taken mod 1.

    Rows run over the basis of ``M``, columns over the evaluation basis of
    its dual.
    """

    p: int
    exponent: int
    numerators: tuple

    def value(self, i, k) -> Fraction:
        return Fraction(self.numerators[i][k] % self.p ** self.exponent, self.p ** self.exponent)

    def as_fractions(self):
        return [[str(self.value(i, k)) for k in range(len(r))]
                for i, r in enumerate(self.numerators)]

    def perturbed(self, i, k, delta=1):
        rows = [list(r) for r in self.numerators]
        rows[i][k] = (rows[i][k] + delta) % self.p ** self.exponent
        return PairingTable(self.p, self.exponent, tuple(tuple(r) for r in rows))


def canonical_pairing(M: FiniteWTModule) -> PairingTable:
    k = len(M.orders)
    top = M.orders[0] if k else 0
    rows = [tuple(M.p ** (top - M.orders[i]) if i == j else 0 for j in range(k))
            for i in range(k)]
    return PairingTable(M.p, top, tuple(rows))


@dataclass(frozen=True)
class PairingResult:
    ok: bool
    table: PairingTable
    witness: Optional[tuple] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def pairing_check(M: FiniteWTModule, table: Optional[PairingTable] = None) -> PairingResult:
    """Check that ``table`` is a perfect iota-equivariant pairing ``M x dual(M)``."""
    D = dual(M)
    table = table or canonical_pairing(M)
    k = len(M.orders)
    if k == 0:
        return PairingResult(True, table)
    p, top = M.p, table.exponent
    if top != M.orders[0]:
        return PairingResult(False, table, None, "denominator does not match the module")
    m = p ** top
    V = np.array(table.numerators, dtype=object).astype(_dt(m)) % m
    # bilinearity: <e_i, .> has order dividing p^c_i, <., phi_k> order dividing p^c_k
    for i, ci in enumerate(M.orders):
        for kk, ck in enumerate(D.orders):
            if (int(V[i, kk]) * p ** min(ci, ck)) % m:
                return PairingResult(False, table, (i, kk), "value order exceeds generator order")
    # perfectness: both adjoint maps are injective
    left = [[int(V[i, kk]) // p ** (top - ck) for i in range(k)] for kk, ck in enumerate(D.orders)]
    right = [[int(V[i, kk]) // p ** (top - ci) for kk in range(k)] for i, ci in enumerate(M.orders)]
    size = sum(M.orders)
    if subgroup_size_exponent(left, D.orders, p) != size:
        return PairingResult(False, table, None, "left radical is nontrivial")
    if subgroup_size_exponent(right, M.orders, p) != size:
        return PairingResult(False, table, None, "right radical is nontrivial")
    # equivariance: <T e_i, phi_k> = <e_i, iota(T) phi_k>
    t, _ = _lifted(M)
    td, _ = _lifted(D)
    lhs = matmul_mod(t, V, m)
    Sd = iota_matrix(td, m, p)
    rhs = matmul_mod(V, np.ascontiguousarray(Sd.T), m)
    bad = np.argwhere((lhs - rhs) % m != 0)
    if len(bad):
        i, kk = (int(x) for x in bad[0])
        return PairingResult(False, table, (i, kk), "iota-equivariance fails")
    return PairingResult(True, table)


# --------------------------------------------------------------- isomorphism

def _vec_orders_mod(M):
    top = M.orders[0]
    return np.array([M.p ** (top - c) for c in M.orders], dtype=object)


def _krylov(M, v, length):
    """Columns ``v, T v, ..., T^length v`` (row convention: T x = x t)."""
    t, m = _lifted(M)
    cols = [np.array(v, dtype=object) % m]
    x = np.array(v, dtype=t.dtype).reshape(1, -1) % m
    for _ in range(length):
        x = matmul_mod(x, t, m)
        cols.append(x[0].astype(object))
    K = np.stack(cols, axis=1)
    orders = np.array([M.p ** c for c in M.orders], dtype=object)
    return K % orders[:, None]


def cyclic_generator(M: FiniteWTModule, rng=None):
    """A vector whose Lambda-span is ``M``, or None when none is found."""
    k = len(M.orders)
    if k == 0:
        return ()
    rng = rng or random.Random(0)
    size = sum(M.orders)
    candidates = [tuple(1 if j == i else 0 for j in range(k)) for i in range(k)]
    candidates.append(tuple([1] * k))
    candidates += [tuple(rng.randrange(M.p ** c) for c in M.orders) for _ in range(24)]
    for v in candidates:
        K = _krylov(M, v, k - 1)
        if subgroup_size_exponent(K, M.orders, M.p) == size:
            return v
    return None


def annihilator_relations(M: FiniteWTModule, v):
    """Generators of ``{a : sum a_j T^j v = 0}`` as polynomials of degree <= rank."""
    k = len(M.orders)
    p, top = M.p, M.orders[0]
    K = _krylov(M, v, k) * _vec_orders_mod(M)[:, None]
    sf = smith_form(K, p, top)
    rels = []
    cols = K.shape[1]
    for j in range(cols):
        s = sf.valuations[j] if j < len(sf.valuations) else top
        scale = p ** (top - min(s, top))
        rels.append(tuple(int(x) * scale % p ** top for x in sf.V[:, j]))
    return rels


def _apply_poly(M, coeffs, w):
    t, m = _lifted(M)
    x = np.array(w, dtype=t.dtype).reshape(1, -1) % m
    acc = np.zeros_like(x)
    for a in coeffs:
        acc = (acc + (a % m) * x) % m
        x = matmul_mod(x, t, m)
    orders = [M.p ** c for c in M.orders]
    return [int(acc[0, j]) % orders[j] for j in range(len(orders))]


def cyclic_isomorphic(A: FiniteWTModule, B: FiniteWTModule) -> Optional[bool]:
    """Decide ``A ~ B`` when ``A`` is cyclic; None when ``A`` is not cyclic."""
    if A.p != B.p:
        return False
    if sorted(A.orders) != sorted(B.orders):
        return False
    if not A.orders:
        return True
    v = cyclic_generator(A)
    if v is None:
        return None
    w = cyclic_generator(B)
    if w is None:
        return False
    for rel in annihilator_relations(A, v):
        if any(_apply_poly(B, rel, w)):
            return False
    return True


def _factor_slice(E: ElementaryModule, x, n):
    sub = ElementaryModule(E.prof, 0, (x,))
    return quotient_module(present_elementary(sub), n).torsion


def dual_elementary_shadow(E: ElementaryModule, n: int) -> bool:
    """The torsion of ``E/omega_n E`` is dual to that of ``twist(E)/omega_n``.

    The block-diagonal presentation splits each slice into factor slices,
    each a cyclic Lambda-module, so the isomorphism is certified factor by
    factor through annihilator relations.  The full slices are also checked
    for matching orders and a perfect equivariant pairing.
    """
    whole = quotient_module(present_elementary(E), n).torsion
    whole_tw = quotient_module(present_elementary(twist(E)), n).torsion
    D = dual(whole)
    if sorted(D.orders) != sorted(whole_tw.orders):
        return False
    if not pairing_check(whole):
        return False
    for x in E.factors:
        y = twist(ElementaryModule(E.prof, 0, (x,))).factors[0]
        Tx = _factor_slice(E, x, n)
        Ty = _factor_slice(E, y, n)
        verdict = cyclic_isomorphic(dual(Tx), Ty)
        if verdict is None:
            raise InvalidInput(f"factor slice of {E.describe()} at level {n} is not cyclic")
        if not verdict:
            return False
    return True
