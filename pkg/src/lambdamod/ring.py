"""Arithmetic in the Iwasawa algebra Lambda = Z_p[[T]].

Two carriers are used side by side:

* :class:`RingElem` -- a power series truncated at ``T^D`` with coefficients
  in ``Z/p^M``.  Every coefficient is kept in the canonical range
  ``[0, p^M)``.
* :class:`DistPoly` -- a distinguished polynomial with exact integer
  coefficients (monic, non-leading coefficients divisible by ``p``).

Conversions between the two are explicit.  Polynomials outside these classes
are plain tuples of ints, low degree first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from .errors import InvalidInput, LevelTooDeep, PrecisionError

INFINITE = math.inf


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in range(2, math.isqrt(n) + 1):
        if n % q == 0:
            return False
    return True


def vp(x: int, p: int) -> float:
    """p-adic valuation of an integer (``INFINITE`` for 0)."""
    if x == 0:
        return INFINITE
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class PrecisionProfile:
    """Working precision: coefficients mod ``p^M``, series mod ``T^D``."""

    p: int = 5
    M: int = 16
    D: int = 128
    n_max: int = 4

    def __post_init__(self):
        if not is_prime(self.p) or self.p < 3:
            raise InvalidInput(f"p must be an odd prime, got {self.p}")
        if self.M < 1:
            raise InvalidInput(f"M must be >= 1, got {self.M}")
        if self.D < 2:
            raise InvalidInput(f"D must be >= 2, got {self.D}")
        if self.n_max < 1 or self.p ** (self.n_max - 1) >= self.D:
            raise InvalidInput(
                f"need p^(n_max-1) < D, got p={self.p}, n_max={self.n_max}, D={self.D}")

    @property
    def modulus(self) -> int:
        return self.p ** self.M

    def as_dict(self):
        return {"p": self.p, "M": self.M, "D": self.D, "n_max": self.n_max,
                "residue_degree": 1}


def profile_for(p: int, levels: int = 4, M: int = 16, D: Optional[int] = None):
    """Smallest-fuss profile able to reach ``levels``.

    ``D`` defaults to 128 and is raised to the next power of two above
    ``p^(levels-1)`` when 128 is too small.
    """
    if D is None:
        D = 128
        while p ** (levels - 1) >= D:
            D *= 2
    return PrecisionProfile(p=p, M=M, D=D, n_max=levels)


# ---------------------------------------------------------------------------
# exact integer polynomials (tuples, low degree first)

def trim(c: Sequence[int]) -> tuple:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_add(a, b):
    n = max(len(a), len(b))
    return trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                for i in range(n))


def poly_sub(a, b):
    n = max(len(a), len(b))
    return trim((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)
                for i in range(n))


def poly_mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def poly_pow(a, e: int):
    out = (1,)
    base = tuple(a)
    while e:
        if e & 1:
            out = poly_mul(out, base)
        e >>= 1
        if e:
            base = poly_mul(base, base)
    return out


def poly_divmod_monic(a, m):
    """Exact division of integer polynomial ``a`` by monic ``m``."""
    m = trim(m)
    d = len(m) - 1
    if d < 0 or m[-1] != 1:
        raise InvalidInput("divisor must be monic")
    r = list(trim(a))
    if len(r) <= d:
        return (), tuple(r)
    q = [0] * (len(r) - d)
    for i in range(len(r) - 1, d - 1, -1):
        t = r[i]
        if t:
            q[i - d] = t
            for j in range(d + 1):
                r[i - d + j] -= t * m[j]
    return trim(q), trim(r[:d])


def poly_mod_coeffs(a, modulus):
    return trim(x % modulus for x in a)


def poly_shift(a, k):
    return trim((0,) * k + tuple(a)) if a else ()


# ---------------------------------------------------------------------------
# truncated series

def _mul_trunc(a, b, D, m):
    """Product of two coefficient lists mod (T^D, m), via Kronecker packing."""
    a = trim(a)[:D]
    b = trim(b)[:D]
    if not a or not b:
        return [0] * D
    n = min(len(a), len(b))
    k = 2 * m.bit_length() + n.bit_length() + 1
    x = 0
    for c in reversed(a):
        x = (x << k) | c
    y = 0
    for c in reversed(b):
        y = (y << k) | c
    z = x * y
    mask = (1 << k) - 1
    out = []
    for _ in range(D):
        out.append((z & mask) % m)
        z >>= k
        if not z:
            break
    out.extend([0] * (D - len(out)))
    return out


@dataclass(frozen=True)
class RingElem:
    """Element of Lambda at precision ``(p^M, T^D)``."""

    coeffs: tuple
    prof: PrecisionProfile

    def __post_init__(self):
        m = self.prof.modulus
        if len(self.coeffs) != self.prof.D or any(not 0 <= c < m for c in self.coeffs):
            raise InvalidInput("RingElem coefficients must be D canonical residues")

    @classmethod
    def from_poly(cls, coeffs, prof, strict=True):
        """Reduce an integer coefficient list into a RingElem.

        With ``strict`` a nonzero coefficient at or beyond ``T^D`` raises
        instead of being dropped.
        """
        m, D = prof.modulus, prof.D
        c = [x % m for x in coeffs]
        if strict and any(c[D:]):
            raise PrecisionError("insufficient-T-precision",
                                 f"polynomial of degree {len(trim(c)) - 1} needs D > {D}")
        c = c[:D] + [0] * max(0, D - len(c))
        return cls(tuple(c), prof)

    @classmethod
    def zero(cls, prof):
        return cls((0,) * prof.D, prof)

    @classmethod
    def one(cls, prof):
        return cls.from_poly([1], prof)

    def _check(self, other):
        if not isinstance(other, RingElem):
            return RingElem.from_poly([other], self.prof)
        if other.prof != self.prof:
            raise InvalidInput("precision profiles differ")
        return other

    def __add__(self, other):
        other = self._check(other)
        m = self.prof.modulus
        return RingElem(tuple((a + b) % m for a, b in zip(self.coeffs, other.coeffs)), self.prof)

    __radd__ = __add__

    def __neg__(self):
        m = self.prof.modulus
        return RingElem(tuple((-a) % m for a in self.coeffs), self.prof)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        out = _mul_trunc(self.coeffs, other.coeffs, self.prof.D, self.prof.modulus)
        return RingElem(tuple(out), self.prof)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = RingElem.one(self.prof)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def polynomial(self) -> tuple:
        """Coefficients as a trimmed integer tuple (canonical lifts)."""
        return trim(self.coeffs)

    def valuation(self):
        """Minimal p-adic valuation over the coefficients."""
        return min(vp(c, self.prof.p) for c in self.coeffs)

    def is_unit(self) -> bool:
        return self.coeffs[0] % self.prof.p != 0

    def inverse(self):
        if not self.is_unit():
            raise InvalidInput("element is not a unit of Lambda")
        return RingElem(tuple(_series_inverse(self.coeffs, self.prof.D, self.prof.modulus)),
                        self.prof)

    def __repr__(self):
        c = self.polynomial()
        return f"RingElem({list(c)}, p={self.prof.p}, M={self.prof.M}, D={self.prof.D})"


def _series_inverse(c, L, m):
    inv0 = pow(c[0], -1, m)
    out = [0] * L
    out[0] = inv0
    for k in range(1, L):
        s = 0
        for j in range(1, min(k, len(c) - 1) + 1):
            s += c[j] * out[k - j]
        out[k] = (-s * inv0) % m
    return out


# ---------------------------------------------------------------------------
# distinguished polynomials

@dataclass(frozen=True)
class DistPoly:
    """Monic polynomial whose non-leading coefficients are divisible by p."""

    coeffs: tuple
    p: int

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if not c:
            raise InvalidInput("distinguished polynomial must be nonzero")
        if c[-1] != 1:
            raise InvalidInput(f"not monic: leading coefficient {c[-1]}")
        if any(x % self.p for x in c[:-1]):
            raise InvalidInput(f"not distinguished at p={self.p}: {list(c)}")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_ring(self, prof) -> RingElem:
        return RingElem.from_poly(self.coeffs, prof)

    def pow(self, e: int) -> tuple:
        return poly_pow(self.coeffs, e)

    def canonical(self, modulus) -> "DistPoly":
        """Same polynomial with coefficients reduced into ``[0, modulus)``."""
        c = [x % modulus for x in self.coeffs[:-1]] + [1]
        return DistPoly(tuple(c), self.p)

    def __call__(self, x: int) -> int:
        s = 0
        for c in reversed(self.coeffs):
            s = s * x + c
        return s


@lru_cache(maxsize=None)
def _omega_coeffs(p: int, n: int) -> tuple:
    q = p ** (n - 1)
    return (0,) + tuple(math.comb(q, k) for k in range(1, q + 1))


def make_omega(n: int, prof: PrecisionProfile) -> DistPoly:
    """``(1+T)^(p^(n-1)) - 1`` as an exact distinguished polynomial."""
    if n < 1:
        raise InvalidInput(f"level must be >= 1, got {n}")
    if prof.p ** (n - 1) >= prof.D:
        raise LevelTooDeep(f"omega_{n} has degree {prof.p ** (n - 1)} >= D={prof.D}")
    return DistPoly(_omega_coeffs(prof.p, n), prof.p)


@lru_cache(maxsize=None)
def _nu_coeffs(p: int, a: int) -> tuple:
    if a == 0:
        return (0, 1)
    q, r = poly_divmod_monic(_omega_coeffs(p, a + 1), _omega_coeffs(p, a))
    assert not r
    return q


def cyclo_nu(a: int, prof: PrecisionProfile) -> DistPoly:
    """``nu_a = omega_(a+1) / omega_a`` for ``a >= 1``; ``nu_0 = T``."""
    if a < 0:
        raise InvalidInput(f"level must be >= 0, got {a}")
    if prof.p ** a >= prof.D:
        raise LevelTooDeep(f"nu_{a} needs p^a < D")
    return DistPoly(_nu_coeffs(prof.p, a), prof.p)


def nu_degree(a: int, p: int) -> int:
    return 1 if a == 0 else p ** a - p ** (a - 1)


def weierstrass_divide(f: RingElem, P: DistPoly, prof: PrecisionProfile):
    """Return ``(q, r)`` with ``f = q*P + r`` mod ``(p^M, T^D)`` and ``deg r < deg P``.

    ``r`` is a tuple of length ``deg P`` of canonical residues.  When ``f``
    is a genuine power series (not a polynomial of degree < D) the dropped
    tail moves ``r`` only by multiples of ``p^(D // deg P)`` roughly, so
    ``r`` is the true remainder only to that p-adic precision.
    """
    d = P.degree
    if d >= prof.D:
        raise LevelTooDeep(f"divisor degree {d} >= D={prof.D}")
    m, D = prof.modulus, prof.D
    c = list(f.coeffs)
    pc = [x % m for x in P.coeffs]
    q = [0] * D
    for i in range(D - 1, d - 1, -1):
        t = c[i]
        if t:
            q[i - d] = t
            for j in range(d + 1):
                c[i - d + j] = (c[i - d + j] - t * pc[j]) % m
    return RingElem(tuple(q), prof), tuple(c[:d])


@dataclass(frozen=True)
class PrepResult:
    mu: int
    unit: RingElem
    dist: DistPoly


def weierstrass_prepare(f: RingElem, prof: PrecisionProfile) -> PrepResult:
    """Factor ``f = p^mu * unit * dist``.

    The unit is only determined modulo ``T^(D - deg dist)``; coefficients past
    that are returned as zero.
    """
    p, m, D = prof.p, prof.modulus, prof.D
    if f.is_zero():
        raise PrecisionError("insufficient-p-precision", "series vanishes mod p^M")
    mu = f.valuation()
    pm = p ** mu
    g = [c // pm for c in f.coeffs]
    d = next((i for i, c in enumerate(g) if c % p), None)
    if d is None:
        raise PrecisionError("insufficient-T-precision",
                             f"no unit coefficient below T^{D}")
    L = D - d
    low, high = g[:d], g[d:]
    binv = _series_inverse(high, L, m)
    # q solves  q*high + tau(q*low) = 1, tau = drop the first d coefficients
    q = binv[:]
    for _ in range(prof.M + 1):
        ql = _mul_trunc(q, low, D, m) if low else [0] * D
        rhs = [(-x) % m for x in ql[d:d + L]]
        rhs[0] = (rhs[0] + 1) % m
        new = _mul_trunc(binv, rhs, L, m)
        if new == q:
            break
        q = new
    qf = _mul_trunc(q, g, d + 1, m) if d else [1]
    dist = tuple(qf[:d]) + (1,)
    unit = _series_inverse(q, L, m) + [0] * d
    return PrepResult(mu, RingElem(tuple(unit), prof), DistPoly(dist, p))


def iota_series(f: RingElem, prof: PrecisionProfile) -> RingElem:
    """Substitute ``T -> 1/(1+T) - 1 = -T/(1+T)`` and expand to ``T^D``.

    Uses the coefficient formula: for ``k >= 1`` the ``T^k`` coefficient of
    the result is ``(-1)^k * sum_{i>=1} C(k-1, i-1) * c_i``.
    """
    m, D = prof.modulus, prof.D
    c = f.coeffs
    out = [c[0]]
    row = [1]  # C(k-1, .) for k = 1
    for k in range(1, D):
        s = sum(b * c[i + 1] for i, b in enumerate(row) if c[i + 1])
        out.append((-s if k % 2 else s) % m)
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
    return RingElem(tuple(out), prof)


def iota_poly_numerator(P: Sequence[int]) -> tuple:
    """Exact ``iota(P) * (1+T)^deg P`` for an integer polynomial ``P``."""
    d = len(P) - 1
    out = [0] * (d + 1)
    for i, c in enumerate(P):
        if not c:
            continue
        sgn = -1 if i % 2 else 1
        for j in range(d - i + 1):
            out[i + j] += sgn * c * math.comb(d - i, j)
    return tuple(out)


def iota_dist(P: DistPoly, prof: PrecisionProfile) -> DistPoly:
    """Distinguished generator of the ideal ``(iota(P))``, coefficients mod p^M."""
    if P.degree >= prof.D:
        raise LevelTooDeep(f"degree {P.degree} >= D={prof.D}")
    num = iota_poly_numerator(P.coeffs)
    prep = weierstrass_prepare(RingElem.from_poly(num, prof), prof)
    if prep.mu:
        raise PrecisionError("insufficient-p-precision", "iota(P) is divisible by p")
    return prep.dist


def _bareiss_det(a):
    a = [row[:] for row in a]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def sylvester_matrix(f, g):
    f, g = trim(f), trim(g)
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(reversed(f)) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(reversed(g)) + [0] * (size - n - 1 - i))
    return rows


def resultant(g, h) -> int:
    """Resultant of monic ``g`` and an integer polynomial ``h`` (up to sign).

    ``h`` is first reduced modulo ``g`` (exact, as ``g`` is monic); the
    resultant of ``g`` with the remainder is a small Sylvester determinant.
    """
    g = trim(g)
    _, r = poly_divmod_monic(h, g)
    if not r:
        return 0
    if len(r) == 1:
        return r[0] ** (len(g) - 1)
    return _bareiss_det(sylvester_matrix(g, r))


def _coeffs(x):
    return x.coeffs if isinstance(x, DistPoly) else tuple(x)


def resultant_valuation(g, h, p: Optional[int] = None):
    """``v_p(Res(g, h))``; ``INFINITE`` when the resultant vanishes."""
    if p is None:
        p = g.p if isinstance(g, DistPoly) else h.p
    gc, hc = _coeffs(g), _coeffs(h)
    if gc[-1] != 1:
        gc, hc = hc, gc
    return vp(resultant(gc, hc), p)


def divides_nu(P: DistPoly, a: int, prof: PrecisionProfile) -> bool:
    """True iff ``nu_a`` divides ``P`` (zero remainder mod ``p^M``)."""
    if P.degree < nu_degree(a, prof.p):
        return False
    nu = cyclo_nu(a, prof)
    _, r = weierstrass_divide(P.to_ring(prof), nu, prof)
    return not any(r)


def classify_cyclo(P: DistPoly, prof: PrecisionProfile) -> Optional[int]:
    """Level ``a`` if ``P`` equals ``nu_a`` exactly, else ``None``."""
    for a in range(prof.n_max + 1):
        if prof.p ** a >= prof.D:
            break
        if P.degree == nu_degree(a, prof.p) and P.coeffs == _nu_coeffs(prof.p, a):
            return a
    return None
