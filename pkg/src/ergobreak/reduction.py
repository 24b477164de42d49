"""Symmetry reduction of torus maps onto the simplex.

The pipeline conjugates a permutation-equivariant torus map to a fundamental
domain of lifted points, sorts it onto the cone of increasing coordinates,
and reads off gap coordinates to land on (open simplex) x (circle fiber).
Points with coinciding coordinates are rejected rather than tie-broken: the
ordering permutation is only unique on distinct coordinates.

Includes the transferred inversion symmetry on each stage, the proof that a
cyclic coordinate shift admits no such transfer (witness search), and the
two alternative reductions that anchor the fundamental domain on the first
coordinate or skip the next-to-last one.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .ratgeom import Vec
from .torusmaps import (
    Distribution,
    apply_permutation,
    coupled_step,
    cyclic_shift,
    mod1,
    reduce_torus,
    torus_inversion,
)


class DuplicateCoordinate(ValueError):
    pass


class ImageOutsideDomain(ValueError):
    pass


class NotInIN(ValueError):
    pass


class NotInVariantDomain(ValueError):
    pass


def _check_distinct_mod1(u: Sequence[Fraction]):
    reduced = [mod1(Fraction(c)) for c in u]
    if len(set(reduced)) != len(reduced):
        raise DuplicateCoordinate(f"coordinates collide mod 1: {u}")


def lift_P(u: Sequence[Fraction]) -> Vec:
    """Lift a torus point to the fundamental domain anchored on the last
    coordinate: (P u)_i = u_i + floor(u_N - u_i) - floor(u_N)."""
    u = tuple(Fraction(c) for c in u)
    _check_distinct_mod1(u)
    last = u[-1]
    shift = math.floor(last)
    return tuple(c + math.floor(last - c) - shift for c in u)


def in_Dstar(u: Sequence[Fraction]) -> bool:
    last = u[-1]
    if not 0 <= last < 1:
        return False
    for c in u[:-1]:
        if not 0 < last - c < 1:
            return False
    reduced = [mod1(Fraction(c)) for c in u]
    return len(set(reduced)) == len(reduced)


def in_IN(u: Sequence[Fraction]) -> bool:
    if not 0 <= u[-1] < 1:
        return False
    if any(a >= b for a, b in zip(u, u[1:])):
        return False
    return u[-1] < u[0] + 1


def ordering_permutation(u: Sequence[Fraction]) -> tuple[int, ...]:
    """The unique permutation of the first N-1 coordinates sorting a
    fundamental-domain point into increasing order (last index fixed)."""
    if not in_Dstar(u):
        raise DuplicateCoordinate(f"not a fundamental-domain point: {u}")
    head = list(range(len(u) - 1))
    head.sort(key=lambda i: u[i])
    return tuple(head) + (len(u) - 1,)


def projected_step(u: Sequence[Fraction], rho: Distribution, eps: Fraction) -> Vec:
    """One step of the projected map on increasing-coordinate points:
    conjugate the coupled step through the lift, then re-sort."""
    u = tuple(Fraction(c) for c in u)
    if not in_IN(u):
        raise NotInIN(f"not an increasing fundamental point: {u}")
    image = coupled_step(reduce_torus(u), rho, eps)
    try:
        lifted = lift_P(image)
    except DuplicateCoordinate as exc:
        raise ImageOutsideDomain(str(exc)) from exc
    return apply_permutation(ordering_permutation(lifted), lifted)


def phi_conjugate(u: Sequence[Fraction]) -> tuple[Vec, Fraction]:
    """Gap coordinates: x_i = u_{i+1} - u_i, fiber s = u_N."""
    u = tuple(Fraction(c) for c in u)
    if not in_IN(u):
        raise NotInIN(f"not an increasing fundamental point: {u}")
    gaps = tuple(b - a for a, b in zip(u, u[1:]))
    return gaps, u[-1]


def phi_inverse(x: Sequence[Fraction], s: Fraction) -> Vec:
    """Rebuild the increasing point with fiber s from simplex gaps."""
    x = tuple(Fraction(c) for c in x)
    s = Fraction(s)
    if any(c <= 0 for c in x) or sum(x) >= 1:
        raise NotInIN(f"gap vector outside the open simplex: {x}")
    if not 0 <= s < 1:
        raise NotInIN(f"fiber {s} outside [0,1)")
    out = [s]
    for gap in reversed(x):
        out.append(out[-1] - gap)
    return tuple(reversed(out))


def reduced_step(
    x: Sequence[Fraction], s: Fraction, rho: Distribution, eps: Fraction
) -> tuple[Vec, Fraction]:
    """Full skew-product step on (open simplex) x [0,1).

    The x-output is the base-map image and does not depend on s; tests assert
    this rather than assuming it.
    """
    u = phi_inverse(x, s)
    return phi_conjugate(projected_step(u, rho, eps))


def base_map(x: Sequence[Fraction], rho: Distribution, eps: Fraction, s=Fraction(9, 19)) -> Vec:
    """Base-map image of a simplex point via the pipeline, at a generic fiber."""
    return reduced_step(x, s, rho, eps)[0]


# ---------------------------------------------------------------------------
# transferred symmetries
# ---------------------------------------------------------------------------


def sigma_on_Dstar(u: Sequence[Fraction]) -> Vec:
    """Conjugated inversion on the fundamental domain:
    (Sigma u)_i = delta_{i,N} - delta_{u_N,0} - u_i."""
    u = tuple(Fraction(c) for c in u)
    n = len(u)
    delta0 = 1 if u[-1] == 0 else 0
    return tuple(
        (1 if i == n - 1 else 0) - delta0 - u[i] for i in range(n)
    )


def sigma_on_IN(u: Sequence[Fraction]) -> Vec:
    """Proper representation of the inversion on increasing points."""
    u = tuple(Fraction(c) for c in u)
    if not in_IN(u):
        raise NotInIN(f"not an increasing fundamental point: {u}")
    n = len(u)
    delta0 = 1 if u[-1] == 0 else 0
    out = [Fraction(0)] * n
    for i in range(1, n):
        out[i - 1] = -delta0 - u[n - 1 - i]
    out[n - 1] = 1 - delta0 - u[n - 1]
    return tuple(out)


def sigma_d(x: Sequence[Fraction]) -> Vec:
    """Inversion symmetry of the simplex: reverse the leading coordinates and
    complement the last one."""
    x = tuple(Fraction(c) for c in x)
    d = len(x)
    out = [Fraction(0)] * d
    for i in range(1, d):
        out[i - 1] = x[d - 1 - i]
    out[d - 1] = 1 - sum(x)
    return tuple(out)


def sigma_fiber(s: Fraction) -> Fraction:
    """Fiber component of the transferred inversion on [0,1)."""
    s = Fraction(s)
    return 1 - (1 if s == 0 else 0) - s


# ---------------------------------------------------------------------------
# the cyclic shift has no transferred representation
# ---------------------------------------------------------------------------


def kappa(u: Sequence[Fraction]) -> Vec:
    """Conjugate of the left cyclic shift through the lift."""
    u = tuple(Fraction(c) for c in u)
    n = len(u)
    first = u[0]
    shift = math.floor(first)
    out = [
        u[i + 1] + math.floor(first - u[i + 1]) - shift for i in range(n - 1)
    ]
    out.append(first - shift)
    return tuple(out)


def kappa_composition(u: Sequence[Fraction]) -> Vec:
    """Independent evaluation path: reduce, shift cyclically, lift."""
    return lift_P(cyclic_shift(reduce_torus(u)))


def kappa_witness(n: int):
    """Concrete obstruction to a proper representation of the cyclic shift.

    Returns (u, perm, lhs, rhs) where lhs and rhs are the two values any
    transferred map would have to take at the common sorted point of u and
    perm(u); their last coordinates differ (they read off u_1 and u_2).
    """
    if n < 3:
        raise ValueError("witness needs at least 3 coordinates")
    u = tuple(Fraction(2 * i + 1, 2 * n + 3) for i in range(n))
    for j in range(1, n - 1):
        perm = list(range(n))
        perm[0], perm[j] = perm[j], perm[0]
        perm = tuple(perm)
        pu = apply_permutation(perm, u)
        # same base point in the sorted cone, per the degeneracy of ordering
        lhs_src = kappa(u)
        rhs_src = kappa(pu)
        lhs = apply_permutation(ordering_permutation(lhs_src), lhs_src)
        rhs = apply_permutation(ordering_permutation(rhs_src), rhs_src)
        if lhs[-1] != rhs[-1]:
            return u, perm, lhs, rhs
    raise AssertionError("no witness found; cyclic conjugate looks proper")


# ---------------------------------------------------------------------------
# alternative reductions for other permutation groups
# ---------------------------------------------------------------------------

VARIANT_LAST = "last-(N-1)"
VARIANT_SKIP = "skip-(N-1)"


def alt_lift(variant: str, u: Sequence[Fraction]) -> Vec:
    """Lift for the alternative fundamental domains."""
    u = tuple(Fraction(c) for c in u)
    _check_distinct_mod1(u)
    n = len(u)
    if variant == VARIANT_LAST:
        anchor = u[0]
        shift = math.floor(anchor)
        return tuple(c + math.ceil(anchor - c) - shift for c in u)
    if variant == VARIANT_SKIP:
        anchor = u[n - 2]
        shift = math.floor(anchor)
        out = [u[i] + math.floor(anchor - u[i]) - shift for i in range(n - 1)]
        out.append(u[n - 1] + math.ceil(anchor - u[n - 1]) - shift)
        return tuple(out)
    raise ValueError(f"unknown variant {variant!r}")


def alt_in_IN(variant: str, u: Sequence[Fraction]) -> bool:
    n = len(u)
    increasing = all(a < b for a, b in zip(u, u[1:])) and u[-1] < u[0] + 1
    if variant == VARIANT_LAST:
        return increasing and 0 <= u[0] < 1
    if variant == VARIANT_SKIP:
        return increasing and 0 <= u[n - 2] < 1
    raise ValueError(f"unknown variant {variant!r}")


def alt_sigma(variant: str, u: Sequence[Fraction]) -> Vec:
    """Transferred inversion for the alternative reductions."""
    u = tuple(Fraction(c) for c in u)
    if not alt_in_IN(variant, u):
        raise NotInVariantDomain(f"not in the {variant} sorted cone: {u}")
    n = len(u)
    if variant == VARIANT_LAST:
        delta0 = 1 if u[0] == 0 else 0
        out = [Fraction(1) - delta0 - u[0]]
        for i in range(2, n + 1):
            out.append(2 - delta0 - u[n - i + 1])
        return tuple(out)
    delta0 = 1 if u[n - 2] == 0 else 0
    out = [Fraction(0)] * n
    for i in range(1, n - 2):
        out[i - 1] = -delta0 - u[n - 3 - i]
    out[n - 3] = 1 - delta0 - u[n - 1]
    out[n - 2] = 1 - delta0 - u[n - 2]
    out[n - 1] = 1 - delta0 - u[n - 3]
    return tuple(out)


def alt_ordering(variant: str, u: Sequence[Fraction]):
    """Sort a fundamental-domain point of the chosen variant into its cone.

    For the first-coordinate anchor this is a permutation of the last N-1
    coordinates. For the skipped anchor it is the two-step process: sort the
    first N-2 coordinates, then if the last coordinate overshoots the wrap
    bound, rotate it (minus one) into place and close the cone with u_1 + 1.
    Returns (point, description).
    """
    u = tuple(Fraction(c) for c in u)
    n = len(u)
    if variant == VARIANT_LAST:
        tail = sorted(range(1, n), key=lambda i: u[i])
        perm = (0, *tail)
        return apply_permutation(perm, u), {"perm": perm}
    if variant != VARIANT_SKIP:
        raise ValueError(f"unknown variant {variant!r}")
    head = sorted(range(n - 2), key=lambda i: u[i])
    pi1 = (*head, n - 2, n - 1)
    v = apply_permutation(pi1, u)
    if v[n - 1] < v[0] + 1:
        return v, {"pi1": pi1, "pi2": None}
    j = max(i for i in range(n - 2) if v[i] < v[n - 1] - 1)
    out = list(v)
    first = v[0]
    for i in range(j):
        out[i] = v[i + 1]
    out[j] = v[n - 1] - 1
    # indices j+1..n-2 keep their values
    out[n - 1] = first + 1
    return tuple(out), {"pi1": pi1, "pi2": {"j": j}}


def alt_base_symmetry(variant: str, x: Sequence[Fraction], fiber: Fraction) -> Vec:
    """Gap-coordinate action of the transferred inversion: rebuild the point
    with the variant's anchor as fiber, apply the symmetry, re-read gaps."""
    x = tuple(Fraction(c) for c in x)
    fiber = Fraction(fiber)
    n = len(x) + 1
    if variant == VARIANT_LAST:
        u = [fiber]
        for gap in x:
            u.append(u[-1] + gap)
    elif variant == VARIANT_SKIP:
        u = [fiber]
        for gap in reversed(x[: n - 2]):
            u.insert(0, u[0] - gap)
        u.append(fiber + x[n - 2])
    else:
        raise ValueError(f"unknown variant {variant!r}")
    image = alt_sigma(variant, tuple(u))
    return tuple(b - a for a, b in zip(image, image[1:]))
