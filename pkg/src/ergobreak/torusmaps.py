"""Coupled expanding maps of the N-torus and their companions.

Implements the pairwise-coupled doubling map for an arbitrary weight
distribution, the coordinate-sign inversion, the diagonal/zero-sum
decomposition with its permutahedron representative, and the
three-branch Lorenz-type interval family. All functions in this module
run on exact rationals; the floating-point twins used for long orbits
live in the kernel backends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ratgeom import Rat, Vec, rat_to_str

HALF = Fraction(1, 2)


class LengthMismatch(ValueError):
    pass


class SearchExhausted(RuntimeError):
    pass


def mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


def reduce_torus(u: Sequence[Fraction]) -> Vec:
    """Canonical representative of a torus point, coordinatewise in [0,1)."""
    return tuple(mod1(Fraction(c)) for c in u)


@dataclass(frozen=True)
class Distribution:
    """Nonnegative rational weights summing to one."""

    weights: Vec

    def __post_init__(self):
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if sum(self.weights) != 1:
            raise ValueError("weights must sum to 1 exactly")

    def __len__(self) -> int:
        return len(self.weights)

    @staticmethod
    def uniform(n: int) -> "Distribution":
        return Distribution((Fraction(1, n),) * n)

    @staticmethod
    def clustered(d: int, varrho: Fraction) -> "Distribution":
        """First d weights equal to varrho, last weight the remainder."""
        varrho = Fraction(varrho)
        if not 0 < varrho < Fraction(1, d):
            raise ValueError(f"varrho must lie in (0, 1/{d})")
        return Distribution((varrho,) * d + (1 - d * varrho,))


def g_eval(u: Fraction) -> Fraction:
    """Sawtooth displacement: u - floor(u + 1/2), except +1/2 on the
    half-integer set where the map keeps the point fixed."""
    u = mod1(Fraction(u))
    if u == HALF:
        return HALF
    return u - math.floor(u + HALF)


def coupled_step(u: Sequence[Fraction], rho: Distribution, eps: Fraction) -> Vec:
    """One step of the coupled doubling map, exactly.

    Componentwise 2*(u_i + eps * sum_j rho_j * g(u_j - u_i)) mod 1.
    """
    eps = Fraction(eps)
    if not 0 <= eps < HALF:
        raise ValueError("eps must lie in [0, 1/2)")
    u = reduce_torus(u)
    if len(rho) != len(u):
        raise LengthMismatch(f"{len(rho)} weights for {len(u)} coordinates")
    out = []
    for i, ui in enumerate(u):
        drift = sum(
            (w * g_eval(uj - ui) for w, uj in zip(rho.weights, u)), Fraction(0)
        )
        out.append(mod1(2 * (ui + eps * drift)))
    return tuple(out)


def torus_inversion(u: Sequence[Fraction]) -> Vec:
    """Coordinatewise sign inversion mod 1."""
    return tuple(mod1(-Fraction(c)) for c in u)


def cyclic_shift(u: Sequence[Fraction]) -> Vec:
    """Left cyclic permutation of the torus coordinates."""
    u = reduce_torus(u)
    return u[1:] + u[:1]


def apply_permutation(perm: Sequence[int], u: Sequence) -> tuple:
    """Coordinate permutation: output position i holds input coordinate perm[i]."""
    return tuple(u[p] for p in perm)


def coupling_jacobian(rho: Distribution, eps: Fraction) -> tuple[Vec, ...]:
    """Linear part of the coupled step away from its discontinuity set:
    2(1-eps) I + 2 eps 1 rho^T."""
    eps = Fraction(eps)
    n = len(rho)
    return tuple(
        tuple(
            2 * (1 - eps) * (1 if i == j else 0) + 2 * eps * rho.weights[j]
            for j in range(n)
        )
        for i in range(n)
    )


# ---------------------------------------------------------------------------
# diagonal / zero-sum decomposition and the permutahedron chart
# ---------------------------------------------------------------------------


def diag_perp_decompose(u: Sequence[Fraction]) -> tuple[Fraction, Vec]:
    """Split off the diagonal: returns (sum of coordinates, u - mean * 1)."""
    u = tuple(Fraction(c) for c in u)
    total = sum(u, Fraction(0))
    mean = total / len(u)
    perp = tuple(c - mean for c in u)
    return total, perp


def permutahedron_bound(n: int, subset_size: int) -> Fraction:
    return Fraction(subset_size * (n - subset_size), 2 * n)


def in_permutahedron(y: Sequence[Fraction]) -> bool:
    """Membership in the scaled centred permutahedron.

    The subset constraints are monotone in the coordinate values, so only
    the sorted prefix sums need checking.
    """
    n = len(y)
    vals = sorted(y, reverse=True)
    acc = Fraction(0)
    for s in range(1, n):
        acc += vals[s - 1]
        if acc > permutahedron_bound(n, s):
            return False
    return True


def permutahedron_representative(perp: Sequence[Fraction], max_iter: int = 4096) -> Vec:
    """Translate a zero-sum vector into the permutahedron cell.

    Uses the lattice of (1/N)-scaled integer vectors whose entries agree
    modulo N and sum to zero: whenever the subset S of the s largest
    coordinates violates its constraint, the translation that subtracts
    (N-s)/N on S and adds s/N elsewhere strictly decreases the Euclidean
    norm, so the walk terminates on the discrete orbit of the input.
    """
    y = [Fraction(c) for c in perp]
    n = len(y)
    if sum(y) != 0:
        raise ValueError("input must have zero coordinate sum")
    for _ in range(max_iter):
        order = sorted(range(n), key=lambda i: y[i], reverse=True)
        violated = None
        acc = Fraction(0)
        for s in range(1, n):
            acc += y[order[s - 1]]
            if acc > permutahedron_bound(n, s):
                violated = s
                break
        if violated is None:
            return tuple(y)
        s = violated
        for idx in order[:s]:
            y[idx] -= Fraction(n - s, n)
        for idx in order[s:]:
            y[idx] += Fraction(s, n)
    raise SearchExhausted(f"no representative after {max_iter} corrections")


# ---------------------------------------------------------------------------
# Lorenz-type interval maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LorenzParams:
    """Slope and breakpoint of the symmetric three-branch interval map."""

    a: Fraction
    xd: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "xd", Fraction(self.xd))
        if not 1 < self.a < 2:
            raise ValueError("slope a must lie in (1, 2)")
        if not Fraction(1, 4) < self.xd < HALF:
            raise ValueError("breakpoint must lie in (1/4, 1/2)")


def lorenz_step(x, p: LorenzParams):
    """Three affine branches with slope a; fixes 0, 1/2 and 1.

    Left-continuous at the first breakpoint, right-continuous at the second;
    works on rationals and floats alike.
    """
    if x <= p.xd:
        return p.a * x
    if x < 1 - p.xd:
        return p.a * (x - HALF) + HALF
    return p.a * (x - 1) + 1


@dataclass(frozen=True)
class LorenzIntervals:
    """Invariant-interval report: regime is 'two', 'one' or 'degenerate'."""

    regime: str
    intervals: tuple[tuple[Fraction, Fraction], ...]
    transcripts: tuple


def _branch_pieces(lo: Fraction, hi: Fraction, p: LorenzParams):
    """Closed pieces of [lo,hi] clipped to each affine branch domain."""
    domains = (
        (Fraction(0), p.xd, lambda x: p.a * x),
        (p.xd, 1 - p.xd, lambda x: p.a * (x - HALF) + HALF),
        (1 - p.xd, Fraction(1), lambda x: p.a * (x - 1) + 1),
    )
    for dlo, dhi, f in domains:
        plo, phi = max(lo, dlo), min(hi, dhi)
        if plo < phi:
            yield (plo, phi, f(plo), f(phi))


def _interval_invariant(lo: Fraction, hi: Fraction, p: LorenzParams):
    """Exact branchwise invariance of the closed interval [lo, hi]."""
    transcript = []
    ok = True
    for plo, phi, ilo, ihi in _branch_pieces(lo, hi, p):
        good = lo <= ilo and ihi <= hi  # branches are increasing
        ok = ok and good
        transcript.append(
            {
                "piece": (rat_to_str(plo), rat_to_str(phi)),
                "image": (rat_to_str(ilo), rat_to_str(ihi)),
                "inside": good,
            }
        )
    return ok, tuple(transcript)


def lorenz_invariant_intervals(p: LorenzParams) -> LorenzIntervals:
    """Classify the invariant supports of the three-branch map.

    With f(xd) below 1/2 the two side intervals (one per symmetric half) are
    each invariant; with f(xd) above 1/2 a single symmetric interval remains;
    the borderline f(xd) = 1/2 is reported as degenerate. Every returned
    interval is re-verified invariant branch by branch, exactly.
    """
    a, xd = p.a, p.xd
    f_at_break = a * xd
    middle_lo = a * (xd - HALF) + HALF
    middle_hi = a * (HALF - xd) + HALF
    if f_at_break < HALF:
        intervals = [(middle_lo, f_at_break), (1 - f_at_break, middle_hi)]
        regime = "two"
    elif f_at_break > HALF:
        intervals = [(middle_lo, middle_hi)]
        regime = "one"
    else:
        intervals = [(middle_lo, middle_hi)]
        regime = "degenerate"
    transcripts = []
    for lo, hi in intervals:
        ok, transcript = _interval_invariant(lo, hi, p)
        if not ok:
            raise AssertionError(f"invariance verification failed on [{lo},{hi}]")
        transcripts.append(transcript)
    return LorenzIntervals(regime, tuple(intervals), tuple(transcripts))
