"""Shared builders: named small spaces, exhaustive and random space streams."""

import itertools
import random

import pytest

from limitspace.core import Carrier, LimitSpace, PointMap, RawConvergenceTable
from limitspace.documents import from_edges

NAMES = tuple(f"p{i}" for i in range(12))


def space(vmax_bits):
    """A LimitSpace from raw vmax bitmasks (self-bits added)."""
    n = len(vmax_bits)
    return LimitSpace(Carrier(NAMES[:n]),
                      tuple(v | (1 << i) for i, v in enumerate(vmax_bits)))


def all_spaces(n):
    """Every closed structure on an n-point carrier."""
    others = [[(1 << i) | extra
               for extra in _submasks(((1 << n) - 1) & ~(1 << i))]
              for i in range(n)]
    for combo in itertools.product(*others):
        yield LimitSpace(Carrier(NAMES[:n]), tuple(combo))


def _submasks(mask):
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def random_space(rng: random.Random, n: int) -> LimitSpace:
    full = (1 << n) - 1
    return LimitSpace(
        Carrier(NAMES[:n]),
        tuple((1 << i) | (rng.getrandbits(n) & full) for i in range(n)))


def random_map(rng: random.Random, dom: LimitSpace, cod: LimitSpace) -> PointMap:
    return PointMap(dom, cod,
                    tuple(rng.randrange(len(cod)) for _ in range(len(dom))))


def random_raw(rng: random.Random, n: int) -> RawConvergenceTable:
    full = (1 << n) - 1
    gens = []
    for _ in range(n):
        fam = tuple(rng.getrandbits(n) & full
                    for _ in range(rng.randrange(0, 3)))
        gens.append(tuple(g for g in fam if g))
    return RawConvergenceTable(Carrier(NAMES[:n]), tuple(gens))


def cycle_space(n, prefix="v"):
    return from_edges([(f"{prefix}{i}", f"{prefix}{(i + 1) % n}")
                       for i in range(n)], "symmetric")


def path_space_graph(n, prefix="l"):
    return from_edges([(f"{prefix}{i}", f"{prefix}{i + 1}")
                       for i in range(n - 1)], "symmetric")


def star_space():
    return from_edges([("c", "l1"), ("c", "l2"), ("c", "l3")], "symmetric")


def arrow_space():
    """Two points where the second's point filter also converges at the first."""
    return space([0b10, 0b00])


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture
def cyc8():
    return cycle_space(8)
