"""Seeded corpus of elementary modules shared by the test-suite."""
from __future__ import annotations

import random

from lambdamod.elementary import Cyclo, ElementaryModule, Generic, PPower
from lambdamod.ring import DistPoly, profile_for

SEED = 20240611
PRIMES = (5, 7)


def random_distinguished(rng, p, max_degree=3, min_degree=1):
    """Distinguished polynomial with nonzero constant term (so T does not divide it)."""
    d = rng.randint(min_degree, max_degree)
    c = [p * rng.choice([x for x in range(-p, p + 1) if x])]
    c += [p * rng.randint(-p, p) for _ in range(d - 1)]
    return DistPoly(tuple(c + [1]), p)


def random_factor(rng, p):
    kind = rng.randrange(3)
    if kind == 0:
        return PPower(rng.randint(1, 3))
    if kind == 1:
        return Generic(random_distinguished(rng, p), rng.randint(1, 2))
    return Cyclo(rng.randint(0, 2), rng.randint(1, 3))


def random_module(rng, p, levels=4):
    prof = profile_for(p, levels)
    k = rng.randint(1, 3)
    return ElementaryModule(prof, rng.randint(0, 1),
                            tuple(random_factor(rng, p) for _ in range(k)))


def corpus(size=200, seed=SEED, levels=4):
    rng = random.Random(seed)
    out = []
    for i in range(size):
        out.append(random_module(rng, PRIMES[i % 2], levels))
    return out
