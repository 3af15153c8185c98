"""Finitely presented Lambda-modules and their finite-level quotients.

A module is the cokernel of an ``r0 x c0`` matrix over Lambda.  Its quotient
``X/omega_n X`` is the cokernel of an integer matrix over ``Z_p`` obtained by
expanding every entry in the basis ``1, T, ..., T^(d-1)`` of ``Lambda/omega_n``
(``d = p^(n-1)``).  That matrix is reduced by a Smith normal form modulo
``p^K``; the rank over ``Q_p`` is certified exactly from minors of the small
Lambda-matrix, so zero pivots are never guessed.

Entries are handled as polynomials (their truncations below ``T^D``), lifted
to integers with symmetric residues.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .elementary import Cyclo, ElementaryModule, Generic, PPower
from .errors import InvalidInput, LevelTooDeep, NoIntegerFit, PrecisionError
from .ring import (
    PrecisionProfile,
    RingElem,
    _nu_coeffs,
    _omega_coeffs,
    make_omega,
    nu_degree,
    poly_divmod_monic,
    poly_mul,
    poly_pow,
    poly_sub,
    trim,
    weierstrass_divide,
)
from .snf import INT64_LIMIT, as_mod_array, matmul_mod, smith_form, subgroup_size_exponent

TRANSITIONS = {
    "G": "natural projections X/omega_(n+1) -> X/omega_n (inverse limit)",
    "F": "multiplication by omega_(n+1)/omega_n (direct limit, dual taken afterwards)",
    "norm": "norm maps X[omega_(n+m)] -> X[omega_n], i.e. reduction of coordinates",
}


@dataclass(frozen=True)
class PresentedModule:
    """``coker(Lambda^c0 -> Lambda^r0)`` given by ``entries``.

    ``syzygies`` optionally lists a ``c0 x c1`` matrix whose columns span the
    relations among the columns of ``entries``.  It is needed for the
    omega-torsion computations when ``entries`` has dependent columns.

    ``exact`` and ``exact_syzygies`` optionally keep integer polynomial
    lifts of the entries.  Rank certification uses them; without them the
    symmetric lifts of the residues mod ``p^M`` stand in.
    """

    prof: PrecisionProfile
    entries: tuple
    syzygies: Optional[tuple] = None
    exact: Optional[tuple] = field(default=None, compare=False, repr=False)
    exact_syzygies: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        if rows and len({len(r) for r in rows}) != 1:
            raise InvalidInput("ragged presentation matrix")
        for r in rows:
            for x in r:
                if not isinstance(x, RingElem) or x.prof != self.prof:
                    raise InvalidInput("entries must be RingElem over one precision profile")
        object.__setattr__(self, "entries", rows)
        if self.syzygies is not None:
            syz = tuple(tuple(r) for r in self.syzygies)
            if len(syz) != self.cols or (syz and len({len(r) for r in syz}) != 1):
                raise InvalidInput("syzygy matrix must have one row per column of entries")
            for r in syz:
                for x in r:
                    if not isinstance(x, RingElem) or x.prof != self.prof:
                        raise InvalidInput("syzygies must be RingElem over the same profile")
            object.__setattr__(self, "syzygies", syz)
        if self.exact is not None:
            object.__setattr__(self, "exact", _check_lifts(self.exact, self.entries, self.prof))
        if self.exact_syzygies is not None and self.syzygies is not None:
            object.__setattr__(self, "exact_syzygies",
                               _check_lifts(self.exact_syzygies, self.syzygies, self.prof))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def p(self) -> int:
        return self.prof.p

    @classmethod
    def from_polys(cls, prof, rows, syzygies=None):
        """Build from nested lists of integer coefficient lists."""
        ent = tuple(tuple(RingElem.from_poly(c, prof) for c in r) for r in rows)
        syz = None
        if syzygies is not None:
            syz = tuple(tuple(RingElem.from_poly(c, prof) for c in r) for r in syzygies)
        return cls(prof, ent, syz, rows, syzygies if syzygies is not None else None)

    def poly_matrix(self):
        if self.exact is not None:
            return [list(r) for r in self.exact]
        return [[_lift(x) for x in r] for r in self.entries]

    def syzygy_matrix(self):
        if self.syzygies is None:
            return None
        if self.exact_syzygies is not None:
            return [list(r) for r in self.exact_syzygies]
        return [[_lift(x) for x in r] for r in self.syzygies]


def _check_lifts(lifts, entries, prof):
    m = prof.modulus
    out = tuple(tuple(trim([int(c) for c in x]) for x in r) for r in lifts)
    if len(out) != len(entries) or any(len(a) != len(b) for a, b in zip(out, entries)):
        raise InvalidInput("exact lifts do not match the entry matrix shape")
    for a, b in zip(out, entries):
        for x, y in zip(a, b):
            if RingElem.from_poly(x, prof).coeffs != y.coeffs:
                raise InvalidInput("exact lift disagrees with its entry mod p^M")
    return out


@dataclass(frozen=True)
class FiniteWTModule:
    """``(+) W/p^c_i`` with a T-action in row convention.

    Row ``i`` of ``t_action`` holds the coordinates of ``T e_i``.  Entry
    ``(i, j)`` is a residue mod ``p^c_j`` and must be divisible by
    ``p^max(0, c_j - c_i)``.
    """

    p: int
    orders: tuple
    t_action: tuple = field(default_factory=tuple)

    def __post_init__(self):
        orders = tuple(int(c) for c in self.orders)
        if any(c < 1 for c in orders):
            raise InvalidInput("orders must be positive")
        if list(orders) != sorted(orders, reverse=True):
            raise InvalidInput("orders must be non-increasing")
        k = len(orders)
        t = tuple(tuple(int(x) for x in r) for r in self.t_action)
        if len(t) != k or any(len(r) != k for r in t):
            raise InvalidInput("t_action must be a square matrix matching orders")
        p = self.p
        fixed = []
        for i, r in enumerate(t):
            row = []
            for j, x in enumerate(r):
                x %= p ** orders[j]
                need = max(0, orders[j] - orders[i])
                if x % p ** need:
                    raise InvalidInput(f"t_action entry ({i},{j}) breaks well-definedness")
                row.append(x)
            fixed.append(tuple(row))
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "t_action", tuple(fixed))
        if k and not self._nilpotent():
            raise InvalidInput("T must act nilpotently on a finite Lambda-module")

    def _nilpotent(self):
        # T is topologically nilpotent iff it is nilpotent on M/pM
        Q = (np.array(self.t_action, dtype=object) % self.p).astype(np.float64)
        k = 1
        while k < len(self.orders):
            # entries stay below p, so float64 products are exact
            Q = np.mod(Q @ Q, self.p)
            k *= 2
        return not Q.any()

    @property
    def size_exponent(self) -> int:
        return sum(self.orders)

    @property
    def size(self) -> int:
        return self.p ** self.size_exponent

    def as_dict(self):
        return {"orders": list(self.orders), "t_action": [list(r) for r in self.t_action]}


def finite_direct_sum(*mods) -> FiniteWTModule:
    """Direct sum with summands re-sorted by decreasing order."""
    p = mods[0].p
    orders, blocks, off = [], [], 0
    for M in mods:
        if M.p != p:
            raise InvalidInput("direct sum of modules over different primes")
        orders.extend(M.orders)
        blocks.append((off, M))
        off += len(M.orders)
    k = len(orders)
    t = [[0] * k for _ in range(k)]
    for o, M in blocks:
        for i, r in enumerate(M.t_action):
            for j, x in enumerate(r):
                t[o + i][o + j] = x
    perm = sorted(range(k), key=lambda i: -orders[i])
    return FiniteWTModule(p, tuple(orders[i] for i in perm),
                          tuple(tuple(t[i][j] for j in perm) for i in perm))


def _rebase(p, orders, t_rows, relations):
    """Cokernel of ``(+) Z/p^orders`` by the columns of ``relations`` with its T-action."""
    k = len(orders)
    K = (max(orders) if orders else 0) + 1
    m = p ** K
    cols = [[p ** c if i == j else 0 for i in range(k)] for j, c in enumerate(orders)]
    rel = np.array(relations, dtype=object).reshape(k, -1) if k else np.zeros((0, 0))
    R = np.concatenate([np.array(cols, dtype=object).T.reshape(k, k), rel], axis=1)
    sf = smith_form(R, p, K)
    idx = [i for i, v in enumerate(sf.valuations) if 0 < v < K]
    idx.sort(key=lambda i: -sf.valuations[i])
    new_orders = [sf.valuations[i] for i in idx]
    if not idx:
        return FiniteWTModule(p, (), ())
    tT = as_mod_array(np.array(t_rows, dtype=object).T, m)
    Y = matmul_mod(tT, sf.Uinv[:, idx], m)
    Tc = matmul_mod(sf.U[idx], Y, m)
    n = len(idx)
    rows = [[int(Tc[j, i]) % p ** new_orders[j] for j in range(n)] for i in range(n)]
    return FiniteWTModule(p, tuple(new_orders), tuple(tuple(r) for r in rows))


def finite_apply(M: FiniteWTModule, x):
    """``T x`` for a coordinate vector ``x``."""
    k = len(M.orders)
    return [sum(x[i] * M.t_action[i][j] for i in range(k)) % M.p ** M.orders[j]
            for j in range(k)]


def finite_quotient(M: FiniteWTModule, x) -> FiniteWTModule:
    """``M`` modulo the Lambda-submodule generated by ``x``."""
    k = len(M.orders)
    kry, v = [], [int(a) % M.p ** c for a, c in zip(x, M.orders)]
    for _ in range(k + 1):
        kry.append(v)
        v = finite_apply(M, v)
    rel = [[kry[j][i] for j in range(len(kry))] for i in range(k)]
    return _rebase(M.p, list(M.orders), M.t_action, rel)


def socle_element(M: FiniteWTModule, x):
    """A nonzero element killed by p and T, reached from ``x`` by applying T and p."""
    k = len(M.orders)
    v = [int(a) % M.p ** c for a, c in zip(x, M.orders)]
    if not any(v):
        return None
    while True:
        w = finite_apply(M, v)
        if any(w):
            v = w
            continue
        w = [(a * M.p) % M.p ** c for a, c in zip(v, M.orders)]
        if any(w):
            v = w
            continue
        return v


@dataclass(frozen=True)
class QuotientSummary:
    free_corank: int
    torsion: FiniteWTModule

    def __iter__(self):
        return iter((self.free_corank, self.torsion))


@dataclass(frozen=True)
class GrowthFit:
    mu: int
    lam: int
    nu: int
    stable_from: int
    tail: int = 3

    def as_dict(self):
        return {"mu": self.mu, "lambda": self.lam, "nu": self.nu,
                "stable_from": self.stable_from, "tail_points": self.tail}


# --------------------------------------------------------------- helpers

def _lift(x: RingElem) -> tuple:
    m = x.prof.modulus
    return trim([c - m if c > m // 2 else c for c in x.coeffs])


def _poly_mod_monic(a, m):
    if len(a) < len(m):
        return trim(a)
    return poly_divmod_monic(a, m)[1]


def _det_mod(mat, modpoly):
    """Determinant of a small polynomial matrix, reduced mod a monic polynomial."""
    k = len(mat)
    if k == 0:
        return (1,)
    if k == 1:
        return _poly_mod_monic(mat[0][0], modpoly)
    out = ()
    for j in range(k):
        if not mat[0][j]:
            continue
        minor = [r[:j] + r[j + 1:] for r in mat[1:]]
        term = poly_mul(mat[0][j], _det_mod(minor, modpoly))
        out = poly_sub(out, term) if j % 2 else _padd(out, term)
        out = _poly_mod_monic(out, modpoly)
    return out


def _padd(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def rank_mod(polys, modpoly) -> int:
    """Rank of a polynomial matrix over ``Q[T]/(modpoly)`` for irreducible ``modpoly``."""
    R = len(polys)
    C = len(polys[0]) if R else 0
    red = [[_poly_mod_monic(x, modpoly) for x in r] for r in polys]
    for k in range(min(R, C), 0, -1):
        for rs in itertools.combinations(range(R), k):
            for cs in itertools.combinations(range(C), k):
                sub = [[red[i][j] for j in cs] for i in rs]
                if _det_mod(sub, modpoly):
                    return k
    return 0


def generic_rank(polys) -> int:
    """Rank over the fraction field Q(T)."""
    # a nonzero polynomial minor stays nonzero modulo a monic of larger degree
    R = len(polys)
    C = len(polys[0]) if R else 0
    if not R or not C:
        return 0
    bound = sum(max(len(x) for x in r) for r in polys) + 2
    big = tuple([3] + [0] * (bound - 1) + [1])  # T^bound + 3, degree above any minor
    return rank_mod(polys, big)


def exact_rank(polys, p: int, n: int) -> int:
    """``rank_Q`` of the W-matrix of ``polys`` at level ``n``.

    ``Q_p[T]/omega_n`` splits as a product over ``b < n`` of the fields
    ``Q_p[T]/nu_b`` and the rank adds up block by block.
    """
    total = 0
    for b in range(n):
        total += nu_degree(b, p) * rank_mod(polys, _nu_coeffs(p, b))
    return total


def _w_matrix(polys, p: int, n: int, modulus: int):
    """Integer matrix of ``X/omega_n X`` (rows ``r0*d``, columns ``c0*d``)."""
    om = _omega_coeffs(p, n)
    d = len(om) - 1
    R = len(polys)
    C = len(polys[0]) if R else 0
    dt = np.int64 if modulus < INT64_LIMIT else object
    B = np.zeros((R * d, C * d), dtype=dt)
    low = np.array([c % modulus for c in om[:d]], dtype=dt)
    for i in range(R):
        for j in range(C):
            a = polys[i][j]
            if not a:
                continue
            v = np.zeros(d, dtype=dt)
            r = _poly_mod_monic(a, om)
            for k, c in enumerate(r):
                v[k] = c % modulus
            for k in range(d):
                B[i * d:(i + 1) * d, j * d + k] = v
                top = v[d - 1]
                v = np.concatenate([np.zeros(1, dtype=dt), v[:-1]])
                if top:
                    v = (v - (low * top) % modulus) % modulus
    return B


def _t_matrix_apply(X, p: int, n: int, modulus: int):
    """Apply T (block companion matrix of omega_n) to the columns of ``X``."""
    om = _omega_coeffs(p, n)
    d = len(om) - 1
    blocks = X.shape[0] // d if d else 0
    out = np.zeros_like(X)
    low = np.array([c % modulus for c in om[:d]], dtype=X.dtype)
    for b in range(blocks):
        blk = X[b * d:(b + 1) * d]
        top = blk[d - 1]
        res = np.zeros_like(blk)
        res[1:] = blk[:-1]
        res = (res - (np.outer(low, top) % modulus)) % modulus
        out[b * d:(b + 1) * d] = res
    return out


def _fast_K(p: int, M: int) -> int:
    K = 1
    while p ** (K + 1) < INT64_LIMIT:
        K += 1
    return min(K, M)


@dataclass
class _Slice:
    n: int
    d: int
    K: int
    rank: int
    free_corank: int
    tors: list
    orders: list
    sf: object


@lru_cache(maxsize=256)
def components(X: PresentedModule) -> tuple:
    """Split a block-diagonal presentation into its connected blocks.

    Rows and columns are linked by nonzero entries.  Columns that vanish
    entirely are dropped together with the syzygies supported on them.  If a
    syzygy couples two blocks, ``X`` is returned whole.
    """
    R, C = X.rows, X.cols
    polys = X.poly_matrix()
    parent = list(range(R + C))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(R):
        for j in range(C):
            if polys[i][j]:
                parent[find(i)] = find(R + j)
    groups = {}
    for v in range(R + C):
        groups.setdefault(find(v), []).append(v)
    blocks = []
    for g in groups.values():
        rs = [v for v in g if v < R]
        cs = [v - R for v in g if v >= R]
        if rs:
            blocks.append((rs, cs))
    if len(blocks) <= 1 and all(any(polys[i][j] for i in range(R)) for j in range(C)):
        return (X,)
    syz = X.syzygy_matrix()
    col_block = {}
    for b, (rs, cs) in enumerate(blocks):
        for j in cs:
            col_block[j] = b
    syz_cols = [[] for _ in blocks]
    if syz is not None:
        for k in range(len(syz[0]) if syz else 0):
            owners = {col_block.get(j, -1) for j in range(C) if syz[j][k]}
            owners.discard(-1)
            if len(owners) > 1:
                return (X,)
            if owners:
                syz_cols[owners.pop()].append(k)
    out = []
    for b, (rs, cs) in enumerate(blocks):
        ent = [[X.entries[i][j] for j in cs] for i in rs]
        ex = [[polys[i][j] for j in cs] for i in rs]
        sz = ezs = None
        if syz is not None and cs:
            ks = syz_cols[b]
            sz = [[X.syzygies[j][k] for k in ks] for j in cs]
            ezs = [[syz[j][k] for k in ks] for j in cs]
        if not cs:
            # a free summand Lambda: one row and no relations
            ent = [[RingElem.zero(X.prof)] for _ in rs]
            ex = [[()] for _ in rs]
            sz, ezs = [[RingElem.one(X.prof)]], [[(1,)]]
        out.append(PresentedModule(X.prof, tuple(map(tuple, ent)),
                                   None if sz is None else tuple(map(tuple, sz)),
                                   tuple(map(tuple, ex)),
                                   None if ezs is None else tuple(map(tuple, ezs))))
    return tuple(out)


def _check_level(X: PresentedModule, n: int):
    if n < 1 or n > X.prof.n_max:
        raise LevelTooDeep(f"level {n} outside 1..{X.prof.n_max}")
    make_omega(n, X.prof)


@lru_cache(maxsize=256)
def _slice_at(X: PresentedModule, n: int, K: int) -> Optional[_Slice]:
    p = X.p
    polys = X.poly_matrix()
    rank = exact_rank(polys, p, n)
    m = p ** K
    B = _w_matrix(polys, p, n, m)
    sf = smith_form(B, p, K)
    if sf.nonzero_count < rank:
        return None
    if sf.nonzero_count > rank:  # pragma: no cover - would contradict the rank formula
        raise AssertionError("p-adic rank exceeds exact rank")
    d = p ** (n - 1)
    idx = [i for i, v in enumerate(sf.valuations) if 0 < v < K]
    idx.sort(key=lambda i: -sf.valuations[i])
    return _Slice(n, d, K, rank, X.rows * d - rank, idx,
                  [sf.valuations[i] for i in idx], sf)


def _working_K(X: PresentedModule, levels) -> int:
    """Smallest of (fast K, M) at which every requested level certifies."""
    M = X.prof.M
    for K in sorted({_fast_K(X.p, M), M}):
        if all(_slice_at(X, n, K) is not None for n in levels):
            return K
    raise PrecisionError("precision-exhausted",
                         f"a certified nonzero pivot has valuation >= M={M}")


def _slice(X, n, levels=None):
    _check_level(X, n)
    K = _working_K(X, levels or (n,))
    return _slice_at(X, n, K)


# --------------------------------------------------------------- public API

def present_elementary(E: ElementaryModule) -> PresentedModule:
    prof = E.prof
    diag = []
    for x in E.factors:
        if isinstance(x, PPower):
            diag.append((prof.p ** x.f,))
        elif isinstance(x, Generic):
            diag.append(poly_pow(x.g.coeffs, x.e))
        else:
            diag.append(poly_pow(_nu_coeffs(prof.p, x.a), x.e))
    r0 = E.free_rank + len(diag)
    c0 = max(len(diag), 1)
    rows = [[()] * c0 for _ in range(r0)]
    for k, c in enumerate(diag):
        rows[E.free_rank + k][k] = c
    # diagonal entries are nonzero, so the columns are independent
    syz = [[] for _ in range(c0)] if diag else [[()] for _ in range(c0)]
    if not diag:
        syz = [[(1,)]]
    return PresentedModule.from_polys(prof, rows, syz)


def quotient_module(X: PresentedModule, n: int) -> QuotientSummary:
    """``X/omega_n X`` as (free W-corank, finite torsion with its T-action)."""
    _check_level(X, n)
    free, parts = 0, []
    for Y in components(X):
        sl = _slice(Y, n)
        free += sl.free_corank
        T = _torsion_module(Y, sl)
        if T.orders:
            parts.append(T)
    tors = finite_direct_sum(*parts) if parts else FiniteWTModule(X.p, (), ())
    return QuotientSummary(free, tors)


def _torsion_module(X, sl) -> FiniteWTModule:
    p, m = X.p, X.p ** sl.K
    if not sl.tors:
        return FiniteWTModule(p, (), ())
    Uinv_t = sl.sf.Uinv[:, sl.tors]
    Y = _t_matrix_apply(Uinv_t, p, sl.n, m)
    Tc = matmul_mod(sl.sf.U[sl.tors], Y, m)  # column j = T applied to generator j
    k = len(sl.tors)
    rows = [[int(Tc[j, i]) % p ** sl.orders[j] for j in range(k)] for i in range(k)]
    return FiniteWTModule(p, tuple(sl.orders), tuple(tuple(r) for r in rows))


def torsion_size_seq(X: PresentedModule, N: int) -> list:
    for n in range(1, N + 1):
        _check_level(X, n)
    seqs = [_torsion_size_single(Y, N) for Y in components(X)]
    return [sum(col) for col in zip(*seqs)] if seqs else [0] * N


def _torsion_size_single(X: PresentedModule, N: int) -> list:
    levels = tuple(range(1, N + 1))
    for n in levels:
        _check_level(X, n)
    K = _working_K(X, levels)
    return [sum(_slice_at(X, n, K).orders) for n in levels]


def _law(mu, lam, nu, p, n):
    return mu * p ** (n - 1) + lam * n + nu


def fit_growth(seq, p: int, min_tail: int = 3) -> GrowthFit:
    """Fit ``e_n = mu*p^(n-1) + lambda*n + nu`` exactly on the tail of ``seq``.

    ``seq[0]`` is ``e_1``.  The last three points are solved first.  With
    ``min_tail=2`` a two-point tail is tried when the three-point solve
    fails; it takes ``lambda`` as the residue of the last increment modulo
    ``p^(N-1) - p^(N-2)``, so it is exact whenever ``lambda`` is below that.
    """
    seq = [int(x) for x in seq]
    N = len(seq)
    if N < 4:
        raise InvalidInput("growth fitting needs at least four levels")
    fit = _solve3(seq, p)
    tail = 3
    if fit is None and min_tail <= 2:
        fit = _solve2(seq, p)
        tail = 2
    if fit is None:
        raise NoIntegerFit(f"no integer growth law fits the tail of {seq}")
    mu, lam, nu = fit
    stable = N
    while stable > 1 and _law(mu, lam, nu, p, stable - 1) == seq[stable - 2]:
        stable -= 1
    return GrowthFit(mu, lam, nu, stable, tail)


def _solve3(seq, p):
    N = len(seq)
    e1, e2, e3 = seq[N - 3], seq[N - 2], seq[N - 1]
    second = (e3 - e2) - (e2 - e1)
    scale = p ** (N - 3) * (p - 1) ** 2
    if second % scale:
        return None
    mu = second // scale
    lam = (e3 - e2) - mu * (p ** (N - 1) - p ** (N - 2))
    if mu < 0 or lam < 0:
        return None
    return mu, lam, e3 - mu * p ** (N - 1) - lam * N


def _solve2(seq, p):
    N = len(seq)
    step = p ** (N - 1) - p ** (N - 2)
    delta = seq[N - 1] - seq[N - 2]
    if delta < 0:
        return None
    mu, lam = divmod(delta, step)
    return mu, lam, seq[N - 1] - mu * p ** (N - 1) - lam * N


def limit_G_invariants(X: PresentedModule, N: Optional[int] = None):
    """``(mu, lambda)`` of the inverse limit of ``X/omega_n X[p^inf]``."""
    N = N or X.prof.n_max
    if N < 4:
        raise InvalidInput("limit recovery needs N >= 4")
    fit = fit_growth(torsion_size_seq(X, N), X.p, min_tail=2)
    return fit.mu, fit.lam


def transition_matrix(X: PresentedModule, n: int, K: Optional[int] = None):
    """Matrix of ``x -> nu_n * x`` from torsion at level n to torsion at level n+1.

    Column ``j`` holds the image of the ``j``-th torsion generator of level n
    in the torsion coordinates of level n+1.
    """
    p = X.p
    K = K or _working_K(X, (n, n + 1))
    a, b = _slice_at(X, n, K), _slice_at(X, n + 1, K)
    m = p ** K
    if not a.tors or not b.tors:
        return np.zeros((len(b.tors), len(a.tors)), dtype=object)
    nu = _nu_coeffs(p, n)
    da, db = a.d, b.d
    Tz = np.zeros((db, da), dtype=np.int64 if m < INT64_LIMIT else object)
    for k in range(da):
        for i, c in enumerate(nu):
            Tz[k + i, k] = c % m
    gens = a.sf.Uinv[:, a.tors]
    img = np.zeros((X.rows * db, gens.shape[1]), dtype=gens.dtype)
    for r in range(X.rows):
        img[r * db:(r + 1) * db] = matmul_mod(Tz, gens[r * da:(r + 1) * da], m)
    return matmul_mod(b.sf.U[b.tors], img, m)


def image_size_seq(X: PresentedModule, N: int) -> list:
    """``log_p |im(A_n -> A_N)|`` for ``n = 1..N`` where ``A_n`` is level-n torsion."""
    for n in range(1, N + 1):
        _check_level(X, n)
    seqs = [_image_size_single(Y, N) for Y in components(X)]
    return [sum(col) for col in zip(*seqs)] if seqs else [0] * N


def _image_size_single(X: PresentedModule, N: int) -> list:
    levels = tuple(range(1, N + 1))
    for n in levels:
        _check_level(X, n)
    K = _working_K(X, levels)
    m = X.p ** K
    slices = [_slice_at(X, n, K) for n in levels]
    out = [sum(slices[-1].orders)]
    comp = None
    for n in range(N - 1, 0, -1):
        T = np.asarray(transition_matrix(X, n, K))
        if comp is None:
            comp = T
        elif comp.shape[1] and T.shape[1]:
            comp = matmul_mod(comp, T, m)
        else:
            comp = np.zeros((comp.shape[0], T.shape[1]), dtype=object)
        out.append(subgroup_size_exponent(comp, slices[-1].orders, X.p))
    return out[::-1]


def colimit_F_invariants(X: PresentedModule, N: Optional[int] = None):
    """``(mu, lambda)`` of the dual of the direct limit of level torsion.

    The direct limit is approximated at depth N by the images of each
    level's torsion in level N.
    """
    N = N or X.prof.n_max
    if N < 4:
        raise InvalidInput("limit recovery needs N >= 4")
    fit = fit_growth(image_size_seq(X, N), X.p, min_tail=2)
    return fit.mu, fit.lam


# --------------------------------------------------------------- omega-torsion

@dataclass
class _Tor:
    free_rank: int
    orders: list
    ker: np.ndarray      # kernel basis of B_n, one column per generator
    coords: np.ndarray   # rows mapping ker coordinates to H coordinates
    tors: list
    free: list
    K: int


def _syzygy_polys(X: PresentedModule):
    if X.syzygies is not None:
        return X.syzygy_matrix()
    polys = X.poly_matrix()
    if generic_rank(polys) == X.cols:
        return None
    raise InvalidInput("presentation has dependent columns; supply syzygies")


@lru_cache(maxsize=128)
def _omega_torsion(X: PresentedModule, n: int, K: int) -> Optional[_Tor]:
    """``X[omega_n] = ker(B_n)/im(B1_n)`` where B1 expands the syzygies."""
    p = X.p
    m = p ** K
    sl = _slice_at(X, n, K)
    if sl is None:
        return None
    sf = sl.sf
    C = X.cols * sl.d
    ker = sf.V[:, sl.rank:]
    kdim = C - sl.rank
    syz = _syzygy_polys(X)
    if syz is None or not syz or not syz[0] or kdim == 0:
        rel = np.zeros((kdim, 0), dtype=ker.dtype)
        rel_rank = 0
    else:
        B1 = _w_matrix(syz, p, n, m)
        rel = matmul_mod(sf.Vinv[sl.rank:], B1, m)
        rel_rank = exact_rank(syz, p, n)
    if kdim == 0:
        return _Tor(0, [], ker, np.zeros((0, 0), dtype=object), [], [], K)
    if rel.shape[1] == 0:
        return _Tor(kdim, [], ker, _eye_like(kdim, ker.dtype), [], list(range(kdim)), K)
    hf = smith_form(rel, p, K)
    if hf.nonzero_count < rel_rank:
        return None
    tors = [i for i, v in enumerate(hf.valuations) if 0 < v < K]
    tors.sort(key=lambda i: -hf.valuations[i])
    free = [i for i in range(kdim) if i >= len(hf.valuations) or hf.valuations[i] >= K]
    return _Tor(kdim - rel_rank, [hf.valuations[i] for i in tors], ker, hf.U, tors, free, K)


def _eye_like(k, dt):
    return np.eye(k, dtype=np.int64) if dt != object else np.array(np.eye(k, dtype=np.int64), dtype=object)


def _tor_at(X, n, levels):
    for n_ in levels:
        _check_level(X, n_)
    M = X.prof.M
    for K in sorted({_fast_K(X.p, M), M}):
        if all(_slice_at(X, k, K) is not None and _omega_torsion(X, k, K) is not None
               for k in levels):
            return _omega_torsion(X, n, K)
    raise PrecisionError("precision-exhausted", "omega-torsion not certified at precision M")


def omega_kernel_rank(X: PresentedModule, n: int) -> int:
    """W-rank of ``X[omega_n]``."""
    return omega_kernel(X, n)[0]


def omega_kernel(X: PresentedModule, n: int):
    """``(W-rank, torsion orders)`` of ``X[omega_n]``."""
    rank, orders = 0, []
    for Y in components(X):
        t = _tor_at(Y, n, (n,))
        rank += t.free_rank
        orders.extend(t.orders)
    return rank, sorted(orders, reverse=True)


def norm_image_size(X: PresentedModule, n: int, m: int) -> int:
    """Order of the torsion of ``N(X[omega_(n+m)])`` inside ``X[omega_n]``.

    The norm ``omega_(n+m)/omega_n`` carries ``X[omega_(n+m)]`` into
    ``X[omega_n]``; in the coordinates used here it is reduction modulo
    ``omega_n``.  The images are nested in ``m``.
    """
    if m < 0:
        raise InvalidInput("m must be >= 0")
    out = 1
    for Y in components(X):
        out *= _norm_image_single(Y, n, m)
    return out


def _norm_image_single(X: PresentedModule, n: int, m: int) -> int:
    L = n + m
    top = _tor_at(X, L, (n, L))
    low = _tor_at(X, n, (n, L))
    p, K = X.p, top.K
    mod = p ** K
    sl_n = _slice_at(X, n, K)
    if top.ker.shape[1] == 0 or low.coords.shape[0] == 0:
        return 1
    dL, dn = p ** (L - 1), p ** (n - 1)
    om = _omega_coeffs(p, n)
    red = np.zeros((dn, dL), dtype=top.ker.dtype)
    for k in range(dL):
        r = _poly_mod_monic(tuple([0] * k + [1]), om)
        for i, c in enumerate(r):
            red[i, k] = c % mod
    ker = top.ker
    img = np.zeros((X.cols * dn, ker.shape[1]), dtype=ker.dtype)
    for c in range(X.cols):
        img[c * dn:(c + 1) * dn] = matmul_mod(red, ker[c * dL:(c + 1) * dL], mod)
    kc = matmul_mod(sl_n.sf.Vinv[sl_n.rank:], img, mod)
    h = matmul_mod(low.coords, kc, mod)
    G_t = h[low.tors]
    G_f = h[low.free]
    if G_f.shape[0] and G_f.shape[1]:
        fs = smith_form(G_f, p, K)
        zero_cols = fs.V[:, [j for j in range(G_f.shape[1])
                              if j >= len(fs.valuations) or fs.valuations[j] >= K]]
        G_t = matmul_mod(G_t, zero_cols, mod) if zero_cols.shape[1] else G_t[:, :0]
    return p ** subgroup_size_exponent(G_t, low.orders, p)

