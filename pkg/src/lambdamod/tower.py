"""Synthetic towers of level data with bounded control defects.

Level ``n`` of a tower carries a divisible corank and a finite Lambda-module
standing for the finite part of level-n arithmetic data.  The finite part is
the torsion of ``E/omega_n E`` for a configured limit ``E``, enlarged by a
kernel defect of order ``p^defect_in`` and cut down by a cokernel defect of
order ``p^defect_out``.

Defects are drawn once per tower: each stays below the bound and becomes
constant from a seeded level ``s0 <= 2`` on, which is the regime where the
size formula holds exactly for large n.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .elementary import Cyclo, ElementaryModule, Generic, PPower, growth_law, quotient_profile
from .errors import InvalidInput, InvalidLimit, NoConsistentFit
from .presented import (
    FiniteWTModule,
    GrowthFit,
    finite_direct_sum,
    finite_quotient,
    present_elementary,
    quotient_module,
    socle_element,
    _solve3,
)
from .ring import DistPoly, profile_for


@dataclass(frozen=True)
class TowerLevel:
    n: int
    divisible_corank: int
    finite_part: FiniteWTModule
    defect_in: int = 0
    defect_out: int = 0

    def __post_init__(self):
        if self.divisible_corank < 0 or self.defect_in < 0 or self.defect_out < 0:
            raise InvalidInput("coranks and defects must be >= 0")

    @property
    def size_exponent(self) -> int:
        return self.finite_part.size_exponent


@dataclass(frozen=True)
class Tower:
    p: int
    levels: tuple
    bound: int = 0
    limit: Optional[ElementaryModule] = None
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        for lv in self.levels:
            if lv.defect_in > self.bound or lv.defect_out > self.bound:
                raise InvalidInput(f"level {lv.n} defect exceeds bound {self.bound}")

    def __iter__(self):
        return iter(self.levels)

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, i):
        return self.levels[i]

    def sizes(self):
        return [lv.size_exponent for lv in self.levels]

    def coranks(self):
        return [lv.divisible_corank for lv in self.levels]


@dataclass(frozen=True)
class TowerReport:
    fit: GrowthFit
    nu_interval: tuple
    max_deviation: int
    corank_stable_from: Optional[int]
    limit_G_class: ElementaryModule
    class_source: str
    ratio_bound_witness: Optional[int] = None

    def as_dict(self):
        return {
            "fit": self.fit.as_dict(),
            "nu_interval": list(self.nu_interval),
            "max_deviation": self.max_deviation,
            "corank_stable_from": self.corank_stable_from,
            "limit_G_class": self.limit_G_class.describe(),
            "limit_G_class_source": self.class_source,
            "ratio_bound_witness": self.ratio_bound_witness,
        }


def _deepen(E: ElementaryModule, N: int) -> ElementaryModule:
    if E.prof.n_max >= N and E.p ** (N - 1) < E.prof.D:
        return E
    return ElementaryModule(profile_for(E.p, N, M=E.prof.M), E.free_rank, E.factors)


@lru_cache(maxsize=512)
def _factor_slice(E: ElementaryModule, x, n: int) -> FiniteWTModule:
    sub = ElementaryModule(E.prof, 0, (x,))
    return quotient_module(present_elementary(sub), n).torsion


def _slice(E: ElementaryModule, n: int) -> FiniteWTModule:
    parts = [_factor_slice(E, x, n) for x in E.factors]
    parts = [M for M in parts if M.orders]
    if not parts:
        return FiniteWTModule(E.p, (), ())
    return finite_direct_sum(*parts)


def _defect_schedule(rng, B, N):
    """Per-level (k_in, k_out), constant from a seeded level s0 <= 2."""
    k_in, k_out = rng.randint(0, B), rng.randint(0, B)
    s0 = rng.randint(1, min(2, N))
    out = []
    for n in range(1, N + 1):
        if n >= s0:
            out.append((k_in, k_out))
        else:
            out.append((rng.randint(0, k_in), rng.randint(0, k_out)))
    return out


def _cut(M: FiniteWTModule, k: int, rng) -> tuple:
    """Quotient of ``M`` by a Lambda-submodule of order ``p^k`` built from socle elements."""
    done = 0
    while done < k and M.orders:
        x = [rng.randrange(M.p ** c) for c in M.orders]
        s = socle_element(M, x)
        if s is None:
            continue
        M = finite_quotient(M, s)
        done += 1
    return M, done


def simulate(limit: ElementaryModule, B: int = 0, N: int = 4, seed: int = 0) -> Tower:
    """Level data of a tower over ``limit`` with defects bounded by ``B``."""
    if B < 0:
        raise InvalidInput("defect bound must be >= 0")
    if N < 1:
        raise InvalidInput("depth must be >= 1")
    if any(isinstance(x, Cyclo) for x in limit.factors):
        raise InvalidLimit("cyclotomic torsion factors make a level finite part infinite")
    E = _deepen(limit, N)
    rng = random.Random(seed)
    schedule = _defect_schedule(rng, B, N)
    levels = []
    for n in range(1, N + 1):
        corank, _ = quotient_profile(E, n)
        M = _slice(E, n)
        k_in, k_out = schedule[n - 1]
        M, k_out = _cut(M, k_out, rng)
        if k_in:
            M = finite_direct_sum(M, FiniteWTModule(E.p, (k_in,), ((0,),))) if M.orders \
                else FiniteWTModule(E.p, (k_in,), ((0,),))
        levels.append(TowerLevel(n, corank, M, k_in, k_out))
    return Tower(E.p, tuple(levels), B, limit, seed)


def _law(mu, lam, nu, p, n):
    return mu * p ** (n - 1) + lam * n + nu


def _chebyshev(seq, p):
    """Integer (mu, lambda, nu) minimising the largest deviation, smallest first."""
    N = len(seq)
    best = None
    mu_max = max(seq[-1], 0) // p ** (N - 1) + 2
    lam_max = max(0, seq[-1] - seq[0]) + 2
    for mu in range(mu_max + 1):
        for lam in range(lam_max + 1):
            r = [e - _law(mu, lam, 0, p, n) for n, e in enumerate(seq, 1)]
            nu = (max(r) + min(r)) // 2
            dev = max(abs(x - nu) for x in r)
            key = (dev, mu, lam)
            if best is None or key < best[0]:
                best = (key, (mu, lam, nu))
    return best[1], best[0][0]


def analyze(tower) -> TowerReport:
    """Recover (mu, lambda, nu) and the corank behaviour of a tower."""
    levels = list(tower)
    N = len(levels)
    if N < 4:
        raise InvalidInput("analysis needs at least four levels")
    p = tower.p if isinstance(tower, Tower) else levels[0].finite_part.p
    B = tower.bound if isinstance(tower, Tower) else max(
        [max(lv.defect_in, lv.defect_out) for lv in levels] + [0])
    seq = [lv.size_exponent for lv in levels]
    slack = 2 * B
    sol = _solve3(seq, p)
    dev = None
    if sol is not None:
        dev = max(abs(e - _law(*sol, p, n)) for n, e in enumerate(seq, 1))
        if dev > slack:
            sol = None
    if sol is None:
        sol, dev = _chebyshev(seq, p)
        if dev > slack:
            raise NoConsistentFit(
                f"sizes {seq} deviate by {dev} from every growth law; slack is {slack}")
    mu, lam, nu = sol
    stable = N
    while stable > 1 and _law(mu, lam, nu, p, stable - 1) == seq[stable - 2]:
        stable -= 1
    fit = GrowthFit(mu, lam, nu, stable)
    coranks = [lv.divisible_corank for lv in levels]
    cs = None
    if len(set(coranks[-2:])) == 1:
        cs = N
        while cs > 1 and coranks[cs - 2] == coranks[-1]:
            cs -= 1
    limit = tower.limit if isinstance(tower, Tower) else None
    if limit is not None:
        from .elementary import functor_G
        cls, source = functor_G(limit), "configured limit"
    else:
        cls, source = _representative(p, mu, lam), "representative with the fitted invariants"
    return TowerReport(fit, (nu - slack, nu + slack), dev, cs, cls, source)


def _representative(p, mu, lam):
    prof = profile_for(p, 4)
    fs = []
    if mu:
        fs.append(PPower(mu))
    if lam:
        fs.append(Generic(DistPoly((-p, 1), p), lam))
    return ElementaryModule(prof, 0, tuple(fs))


def compare_towers(t1, t2):
    """``(bounded, witness)``: bounded iff the fitted mu and lambda agree."""
    if len(t1) != len(t2):
        raise InvalidInput("towers must have equal depth")
    a, b = analyze(t1), analyze(t2)
    s1 = [lv.size_exponent for lv in t1]
    s2 = [lv.size_exponent for lv in t2]
    witness = max(abs(x - y) for x, y in zip(s1, s2))
    bounded = (a.fit.mu, a.fit.lam) == (b.fit.mu, b.fit.lam)
    return bounded, witness
