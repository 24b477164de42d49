"""Shared generators for exact test points."""

import itertools
import random
from fractions import Fraction as F

import pytest


def rational_simplex_point(rng, d, den=101):
    """Random rational point strictly inside the open unit-sum simplex."""
    while True:
        cuts = sorted(rng.randrange(1, den) for _ in range(d))
        if len(set(cuts)) != d or cuts[-1] == den:
            continue
        gaps = []
        prev = 0
        for c in cuts:
            gaps.append(F(c - prev, den))
            prev = c
        if all(g > 0 for g in gaps) and sum(gaps) < 1:
            return tuple(gaps)


def rational_fiber(rng, den=103):
    return F(rng.randrange(den), den)


def rational_IN_point(rng, n, den=101):
    """Random rational point with increasing coordinates spanning less than 1."""
    from ergobreak.reduction import phi_inverse

    return phi_inverse(rational_simplex_point(rng, n - 1, den), rational_fiber(rng))


def all_head_permutations(n):
    """Permutations of the first n-1 indices, extended by the fixed last."""
    for head in itertools.permutations(range(n - 1)):
        yield tuple(head) + (n - 1,)


@pytest.fixture
def rng():
    return random.Random(20260810)
