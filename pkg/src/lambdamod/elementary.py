"""Closed-form calculus on elementary Lambda-modules.

An elementary module is ``Lambda^r (+) (+) Lambda/p^f (+) (+) Lambda/g^e
(+) (+) Lambda/nu_a^e`` with ``g`` distinguished and coprime to every
``omega_n``.  The functors F and G, the iota-twist and the growth law are
all computed factor by factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import InvalidInput, LevelTooDeep
from .ring import (
    INFINITE,
    DistPoly,
    PrecisionProfile,
    _nu_coeffs,
    _omega_coeffs,
    divides_nu,
    iota_dist,
    nu_degree,
    poly_divmod_monic,
    resultant_valuation,
)

CONVENTIONS = {
    "growth_exponent": "e_n = mu*deg(omega_n) + lambda*n + nu with deg(omega_n) = p^(n-1); "
                       "written as mu'*p^n + lambda*n + nu the same data give mu' = mu/p",
    "nu0": "nu_0 := T extends omega_(a+1)/omega_a to a = 0",
    "corank_exponent": "free W-corank of Lambda^r/omega_n uses r*deg(omega_n), "
                       "not p^(n*r)",
    "functor_classes": "F and G results are elementary classes, valid up to "
                       "pseudo-isomorphism (finite error)",
    "residue_degree": "W = Z_p (residue degree 1)",
}


@dataclass(frozen=True, order=True)
class PPower:
    """``Lambda/p^f``."""

    f: int

    def __post_init__(self):
        if self.f < 1:
            raise InvalidInput(f"p-power exponent must be >= 1, got {self.f}")


@dataclass(frozen=True)
class Generic:
    """``Lambda/g^e`` with ``g`` coprime to every omega_n."""

    g: DistPoly
    e: int = 1

    def __post_init__(self):
        if self.e < 1:
            raise InvalidInput(f"generic exponent must be >= 1, got {self.e}")
        if self.g.degree < 1:
            raise InvalidInput("generic factor needs degree >= 1")

    def sort_key(self):
        return (self.g.degree, self.g.coeffs, self.e)


@dataclass(frozen=True, order=True)
class Cyclo:
    """``Lambda/nu_a^e``."""

    a: int
    e: int = 1

    def __post_init__(self):
        if self.a < 0 or self.e < 1:
            raise InvalidInput(f"bad cyclotomic factor level={self.a} exp={self.e}")


Factor = Union[PPower, Generic, Cyclo]


def _factor_key(x):
    if isinstance(x, PPower):
        return (0, (x.f,))
    if isinstance(x, Generic):
        return (1, x.sort_key())
    return (2, (x.a, x.e))


@dataclass(frozen=True)
class ElementaryModule:
    """Free rank plus a multiset of factors, stored in canonical order."""

    prof: PrecisionProfile
    free_rank: int = 0
    factors: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.free_rank < 0:
            raise InvalidInput("free rank must be >= 0")
        m = self.prof.modulus
        canon = []
        for x in self.factors:
            if isinstance(x, Generic):
                if x.g.p != self.prof.p:
                    raise InvalidInput("generic factor defined for a different prime")
                x = Generic(x.g.canonical(m), x.e)
                for a in range(self.prof.n_max + 1):
                    if self.prof.p ** a >= self.prof.D:
                        break
                    if divides_nu(x.g, a, self.prof):
                        raise InvalidInput(
                            f"generic factor {list(x.g.coeffs)} is divisible by nu_{a}")
            elif not isinstance(x, (PPower, Cyclo)):
                raise InvalidInput(f"unknown factor {x!r}")
            canon.append(x)
        object.__setattr__(self, "factors", tuple(sorted(canon, key=_factor_key)))

    @property
    def p(self):
        return self.prof.p

    def __add__(self, other):
        return direct_sum(self, other)

    def describe(self) -> str:
        parts = ["Lambda"] * self.free_rank
        for x in self.factors:
            if isinstance(x, PPower):
                parts.append(f"Lambda/p^{x.f}")
            elif isinstance(x, Generic):
                parts.append(f"Lambda/({poly_str(x.g.coeffs, self.prof.modulus)})^{x.e}")
            else:
                parts.append(f"Lambda/nu_{x.a}^{x.e}")
        return " + ".join(parts) if parts else "0"


def poly_str(c, modulus=None) -> str:
    if modulus:
        c = [x - modulus if x > modulus // 2 else x for x in c]
    out = ""
    for i in range(len(c) - 1, -1, -1):
        x = c[i]
        if not x:
            continue
        mono = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
        mag = abs(x)
        body = mono if (mono and mag == 1) else (f"{mag}*{mono}" if mono else str(mag))
        if not out:
            out = ("-" if x < 0 else "") + body
        else:
            out += (" - " if x < 0 else " + ") + body
    return out or "0"


def direct_sum(*mods) -> ElementaryModule:
    prof = mods[0].prof
    if any(x.prof != prof for x in mods):
        raise InvalidInput("direct sum of modules with different profiles")
    return ElementaryModule(prof, sum(x.free_rank for x in mods),
                            tuple(f for x in mods for f in x.factors))


@dataclass(frozen=True)
class InvariantReport:
    rank: int
    mu: int
    lam: int
    char_factors: tuple

    def as_dict(self):
        return {"rank": self.rank, "mu": self.mu, "lambda": self.lam,
                "char_factors": [list(x) for x in self.char_factors]}


def factor_lambda(x: Factor, p: int) -> int:
    if isinstance(x, Generic):
        return x.e * x.g.degree
    if isinstance(x, Cyclo):
        return x.e * nu_degree(x.a, p)
    return 0


def invariants(E: ElementaryModule) -> InvariantReport:
    mu = sum(x.f for x in E.factors if isinstance(x, PPower))
    lam = sum(factor_lambda(x, E.p) for x in E.factors)
    chars = []
    for x in E.factors:
        if isinstance(x, PPower):
            chars.append(("p", x.f))
        elif isinstance(x, Generic):
            m = E.prof.modulus
            chars.append(("g", [c - m if c > m // 2 else c for c in x.g.coeffs], x.e))
        else:
            chars.append(("nu", x.a, x.e))
    return InvariantReport(E.free_rank, mu, lam, tuple(chars))


def _lower_cyclo(x: Cyclo):
    return [Cyclo(x.a, x.e - 1)] if x.e >= 2 else []


def functor_G(E: ElementaryModule) -> ElementaryModule:
    """Elementary class of G(E): drop Lambda^r, lower every nu-exponent by one."""
    out = []
    for x in E.factors:
        out.extend(_lower_cyclo(x) if isinstance(x, Cyclo) else [x])
    return ElementaryModule(E.prof, 0, tuple(out))


def functor_F(E: ElementaryModule) -> ElementaryModule:
    """Elementary class of F(E): as G, with generic factors iota-twisted."""
    out = []
    for x in E.factors:
        if isinstance(x, Cyclo):
            out.extend(_lower_cyclo(x))
        elif isinstance(x, Generic):
            out.append(Generic(iota_dist(x.g, E.prof), x.e))
        else:
            out.append(x)
    return ElementaryModule(E.prof, 0, tuple(out))


def twist(E: ElementaryModule) -> ElementaryModule:
    out = [Generic(iota_dist(x.g, E.prof), x.e) if isinstance(x, Generic) else x
           for x in E.factors]
    return ElementaryModule(E.prof, E.free_rank, tuple(out))


def check_funceq(E1: ElementaryModule, E2: ElementaryModule) -> bool:
    """True iff ``E1`` and ``twist(E2)`` have the same canonical form."""
    return E1 == twist(E2)


def _cyclo_torsion(a: int, e: int, n: int, p: int) -> int:
    nu = _nu_coeffs(p, a)
    om = _omega_coeffs(p, n)
    if a >= n:
        v = resultant_valuation(nu, om, p)
        return e * v
    # Lambda/(nu^e, nu*u) has torsion nu*Lambda/(nu^e, nu*u) = Lambda/(nu^(e-1), u)
    u, r = poly_divmod_monic(om, nu)
    assert not r
    if e == 1:
        return 0
    return (e - 1) * resultant_valuation(nu, u, p)


def quotient_profile(E: ElementaryModule, n: int):
    """``(free W-corank, log_p |torsion|)`` of ``E/omega_n E`` in closed form."""
    p = E.p
    if n < 1 or n > E.prof.n_max:
        raise LevelTooDeep(f"level {n} outside 1..{E.prof.n_max}")
    d = p ** (n - 1)
    free = E.free_rank * d
    tors = 0
    for x in E.factors:
        if isinstance(x, PPower):
            tors += x.f * d
        elif isinstance(x, Generic):
            v = resultant_valuation(x.g.coeffs, _omega_coeffs(p, n), p)
            if v == INFINITE:
                raise InvalidInput("generic factor shares a root with omega_n")
            tors += x.e * v
        else:
            if x.a < n:
                free += nu_degree(x.a, p)
            tors += _cyclo_torsion(x.a, x.e, n, p)
    return free, int(tors)


@dataclass(frozen=True)
class GrowthLaw:
    mu: int
    lam: int
    valid: bool


def growth_law(E: ElementaryModule) -> GrowthLaw:
    mu = sum(x.f for x in E.factors if isinstance(x, PPower))
    lam = sum(x.e * x.g.degree for x in E.factors if isinstance(x, Generic))
    valid = E.free_rank == 0 and not any(isinstance(x, Cyclo) for x in E.factors)
    return GrowthLaw(mu, lam, valid)
