"""Closed-form geometry and dynamics of the reduced simplex maps.

The unit-sum simplex splits into outer corner atoms (one per vertex, cut off
by the 1/2-level of one defining functional) and adjacent middle atoms
sharing a facet with them. On the corner atoms the reduced coupled map is a
homothety toward the far face; on the middle atoms, for d in {2,3} and
admissible weights, it is the affine map displayed below. Everything here is
exact; the reduction pipeline is the independent oracle for every formula.

Index convention: atom k of kind "A" is the corner at vertex v_k (v_0 the
origin), and kind "B" with the same k is its neighbour across the shared
facet. For d = 2 the three middle labels describe one and the same triangle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .ratgeom import (
    AffineMapExact,
    Halfspace,
    Polytope,
    SimplexT,
    Vec,
    enumerate_vertices,
    hull_halfspaces,
    mat_inverse,
    mat_vec,
    unit_vec,
    vec_add,
    vec_dot,
    vec_scale,
    vec_sub,
    zero_vec,
)

HALF = Fraction(1, 2)


class OutsideSimplex(ValueError):
    pass


class InvalidAtom(ValueError):
    pass


class AtomNotValid(ValueError):
    pass


class UnsupportedDimension(ValueError):
    pass


class FixedPointOutsideB(RuntimeError):
    pass


@dataclass(frozen=True)
class AtomId:
    kind: str  # "A" or "B"
    k: int

    def __post_init__(self):
        if self.kind not in ("A", "B"):
            raise InvalidAtom(f"unknown atom kind {self.kind!r}")


@dataclass(frozen=True)
class SimplexMapParams:
    """Dimension, common weight of the first d units, expansion parameter."""

    d: int
    varrho: Fraction
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "varrho", Fraction(self.varrho))
        object.__setattr__(self, "eps", Fraction(self.eps))
        if self.d < 1:
            raise ValueError("dimension must be at least 1")
        if not 0 < self.varrho < Fraction(1, self.d):
            raise ValueError(f"varrho must lie in (0, 1/{self.d})")
        if not 0 < self.eps < HALF:
            raise ValueError("eps must lie in (0, 1/2)")

    @staticmethod
    def uniform(d: int, eps: Fraction) -> "SimplexMapParams":
        return SimplexMapParams(d, Fraction(1, d + 1), eps)

    @property
    def beta(self) -> Fraction:
        """Common contraction/expansion factor 2(1-eps)."""
        return 2 * (1 - self.eps)


def simplex_vertex(d: int, k: int) -> Vec:
    if not 0 <= k <= d:
        raise InvalidAtom(f"vertex index {k} out of range for dimension {d}")
    return zero_vec(d) if k == 0 else unit_vec(d, k - 1)


def full_simplex(d: int) -> SimplexT:
    return SimplexT(tuple(simplex_vertex(d, k) for k in range(d + 1)))


def in_open_simplex(x: Sequence[Fraction]) -> bool:
    return all(c > 0 for c in x) and sum(x) < 1


def _sum_range(x, lo, hi):
    """x_lo + ... + x_hi with 1-based inclusive indices."""
    return sum(x[lo - 1 : hi], Fraction(0))


def atom_halfspaces(atom: AtomId, d: int) -> tuple[Halfspace, ...]:
    """Closed facet list of an atom; open membership is strict satisfaction."""
    ones = tuple(Fraction(1) for _ in range(d))
    neg = lambda i: vec_scale(Fraction(-1), unit_vec(d, i))
    k = atom.k
    if not 0 <= k <= d:
        raise InvalidAtom(f"atom index {k} out of range for dimension {d}")
    if atom.kind == "A":
        if k == 0:
            return tuple((neg(i), Fraction(0)) for i in range(d)) + ((ones, HALF),)
        rows = [(neg(i), Fraction(0)) for i in range(d) if i != k - 1]
        rows.append((ones, Fraction(1)))
        rows.append((neg(k - 1), -HALF))
        return tuple(rows)
    if d < 2:
        raise InvalidAtom("middle atoms need dimension at least 2")
    sum_vec = lambda lo, hi: tuple(
        Fraction(1) if lo - 1 <= i <= hi - 1 else Fraction(0) for i in range(d)
    )
    if k == 0:
        rows = [(neg(i), Fraction(0)) for i in range(1, d - 1)]
        rows.append((sum_vec(1, d - 1), HALF))
        rows.append((sum_vec(2, d), HALF))
        rows.append((vec_scale(Fraction(-1), ones), -HALF))
        return tuple(rows)
    if k == 1:
        rows = [(neg(i), Fraction(0)) for i in range(2, d)]
        rows.append((unit_vec(d, 0), HALF))
        rows.append((sum_vec(2, d), HALF))
        rows.append((vec_scale(Fraction(-1), sum_vec(1, 2)), -HALF))
        return tuple(rows)
    if k == d:
        rows = [(neg(i), Fraction(0)) for i in range(d - 2)]
        rows.append((sum_vec(1, d - 1), HALF))
        rows.append((unit_vec(d, d - 1), HALF))
        rows.append((vec_scale(Fraction(-1), sum_vec(d - 1, d)), -HALF))
        return tuple(rows)
    rows = [(neg(i), Fraction(0)) for i in range(d) if not k - 2 <= i <= k]
    rows.append((unit_vec(d, k - 1), HALF))
    rows.append((vec_scale(Fraction(-1), sum_vec(k - 1, k)), -HALF))
    rows.append((vec_scale(Fraction(-1), sum_vec(k, k + 1)), -HALF))
    rows.append((ones, Fraction(1)))
    return tuple(rows)


def atom_vertices(atom: AtomId, d: int) -> SimplexT:
    """Exact vertex simplex of an atom.

    Corner atoms have closed form (the vertex and the edge midpoints issued
    from it); middle atoms are solved from their facet systems.
    """
    if atom.kind == "A":
        vk = simplex_vertex(d, atom.k)
        verts = [vk] + [
            vec_scale(HALF, vec_add(vk, simplex_vertex(d, j)))
            for j in range(d + 1)
            if j != atom.k
        ]
        return SimplexT(tuple(verts))
    verts = sorted(enumerate_vertices(atom_halfspaces(atom, d), d))
    if len(verts) != d + 1:
        raise InvalidAtom(f"{atom} facets solve to {len(verts)} vertices")
    return SimplexT(tuple(verts))


def atom_polytope(atom: AtomId, d: int) -> Polytope:
    return Polytope(d, atom_vertices(atom, d).vertices, atom_halfspaces(atom, d))


def atom_of(x: Sequence[Fraction], d: int) -> Optional[AtomId]:
    """Unique atom containing an open-simplex point, or None on the
    zero-measure boundary set / the residual set present for d >= 4."""
    x = tuple(Fraction(c) for c in x)
    if len(x) != d or not in_open_simplex(x):
        raise OutsideSimplex(f"{x} is not interior to the {d}-simplex")
    if sum(x) < HALF:
        return AtomId("A", 0)
    for k in range(1, d + 1):
        if x[k - 1] > HALF:
            return AtomId("A", k)
    if d == 1:
        return None
    b_range = (1,) if d == 2 else range(d + 1)
    for k in b_range:
        if all(vec_dot(n, x) < c for n, c in atom_halfspaces(AtomId("B", k), d)):
            return AtomId("B", k)
    return None


def bipyramid_polytope(k: int, d: int) -> Polytope:
    """Convex closure of the corner atom and its middle neighbour."""
    verts = list(atom_vertices(AtomId("A", k), d).vertices)
    for v in atom_vertices(AtomId("B", k), d).vertices:
        if v not in verts:
            verts.append(v)
    return Polytope(d, tuple(verts), hull_halfspaces(verts, d))


def shared_facet_vertices(k: int, d: int) -> tuple[Vec, ...]:
    """Vertices of the facet common to the corner atom and its neighbour:
    the corner simplex minus its apex."""
    return atom_vertices(AtomId("A", k), d).vertices[1:]


def shared_facet_halfspace(k: int, d: int) -> Halfspace:
    """The common facet as a half-space containing the corner atom."""
    if k == 0:
        return tuple(Fraction(1) for _ in range(d)), HALF
    return vec_scale(Fraction(-1), unit_vec(d, k - 1)), -HALF


def b_atom_validity(d: int, varrho: Fraction) -> dict[int, bool]:
    """Which middle sets are genuine atoms of the reduced map."""
    varrho = Fraction(varrho)
    if d < 2:
        return {}
    interior_ok = d in (2, 3) and varrho >= Fraction(1, 4)
    outer_ok = Fraction(1, 2 * d) <= varrho <= Fraction(1, 2 * (d - 1))
    table = {}
    for k in range(d + 1):
        table[k] = outer_ok if k in (0, d) else interior_ok
    return table


def sigma_affine(d: int) -> AffineMapExact:
    """The simplex inversion as an exact affine map."""
    rows = []
    for i in range(d - 1):
        rows.append(unit_vec(d, d - 2 - i))
    rows.append(tuple(Fraction(-1) for _ in range(d)))
    offset = zero_vec(d - 1) + (Fraction(1),)
    return AffineMapExact(tuple(rows), offset)


def restriction_A(params: SimplexMapParams, k: int) -> AffineMapExact:
    """Corner-atom restriction: homothety by 2(1-eps) with offset pulling
    toward vertex k; weight-independent."""
    d = params.d
    if not 0 <= k <= d:
        raise InvalidAtom(f"atom index {k} out of range for dimension {d}")
    beta = params.beta
    linear = tuple(vec_scale(beta, unit_vec(d, i)) for i in range(d))
    offset = zero_vec(d)
    if k > 0:
        offset = vec_scale(2 * params.eps - 1, unit_vec(d, k - 1))
    return AffineMapExact(linear, offset)


def restriction_B(params: SimplexMapParams, k: int) -> AffineMapExact:
    """Middle-atom restriction for d in {2,3}.

    The k=1 map is written directly; k=d-1 is its conjugate under the
    simplex inversion, and for d=3 the outer middle atoms use the displayed
    four-unit form and its conjugate. Validity of the atom (it is one only
    for admissible weights) is enforced first.
    """
    d, eps, varrho = params.d, params.eps, params.varrho
    beta = params.beta
    if d >= 4:
        raise UnsupportedDimension("middle atoms carry no closed form for d >= 4")
    if d < 2:
        raise InvalidAtom("middle atoms need dimension at least 2")
    validity = b_atom_validity(d, varrho)
    if not validity.get(k, False):
        raise AtomNotValid(f"B_{k} is not an atom at d={d}, varrho={varrho}")
    if d == 2:
        linear = ((-beta, Fraction(0)), (beta, beta))
        offset = (1 - 2 * eps * (1 - 2 * varrho), 2 * eps * (1 - varrho) - 1)
        return AffineMapExact(linear, offset)
    sigma = sigma_affine(d)
    if k == 1:
        linear = (
            (-beta, Fraction(0), Fraction(0)),
            (beta, beta, Fraction(0)),
            (Fraction(0), Fraction(0), beta),
        )
        offset = (1 - 2 * eps * (1 - 2 * varrho), 2 * eps * (1 - varrho) - 1, Fraction(0))
        return AffineMapExact(linear, offset)
    if k == 2:
        return sigma.compose(restriction_B(params, 1)).compose(sigma)
    if k == 0:
        linear = (
            (Fraction(0), beta, Fraction(0)),
            (-beta, -beta, Fraction(0)),
            (beta, beta, beta),
        )
        offset = (Fraction(0), 1 - 2 * eps * (1 - 3 * varrho), 2 * eps * (1 - 2 * varrho) - 1)
        return AffineMapExact(linear, offset)
    return sigma.compose(restriction_B(params, 0)).compose(sigma)


def closed_form_step(params: SimplexMapParams, x: Sequence[Fraction]) -> Optional[Vec]:
    """Evaluate the reduced map by closed form where one exists.

    Returns None on atom boundaries, on the residual set, and on middle
    atoms without a closed form; callers fall back to the reduction
    pipeline there.
    """
    atom = atom_of(x, params.d)
    if atom is None:
        return None
    if atom.kind == "A":
        return restriction_A(params, atom.k)(tuple(Fraction(c) for c in x))
    try:
        rest = restriction_B(params, atom.k)
    except (AtomNotValid, UnsupportedDimension):
        return None
    return rest(tuple(Fraction(c) for c in x))


# ---------------------------------------------------------------------------
# the planar middle-atom frame
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlanarFrame:
    """Fixed point and swap basis of the planar middle-atom map.

    ``matrix_in_basis`` uses the row convention: row n holds the coordinates
    of the image of basis vector n in the basis (p0->p1, p0->p2). Its square
    is (2(1-eps))^2 times the identity.
    """

    p0: Vec
    p1: Vec
    p2: Vec
    alpha: Fraction
    matrix_in_basis: tuple[Vec, ...]
    map_on_B: AffineMapExact


def feat2d_data(params: SimplexMapParams) -> PlanarFrame:
    """Exact fixed-point frame of the d=2 middle atom.

    p1 cuts the segment from the fixed point to the top vertex at the shared
    facet; p2 continues the image ray of that segment back to the facet. In
    the resulting basis the linear part is antidiagonal with ratio alpha
    (alpha = 2 for uniform weights).
    """
    if params.d != 2:
        raise UnsupportedDimension("planar frame is specific to d = 2")
    rest = restriction_B(params, 1)
    p0 = rest.fixed_point()
    assert p0 is not None
    expected = (
        (1 - 2 * params.eps * (1 - 2 * params.varrho)) / (3 - 2 * params.eps),
        (1 - 2 * params.eps * params.varrho) / (3 - 2 * params.eps),
    )
    if p0 != expected:
        raise AssertionError(f"fixed point {p0} differs from closed form {expected}")
    if not all(vec_dot(n, p0) < c for n, c in atom_halfspaces(AtomId("B", 1), 2)):
        raise FixedPointOutsideB(f"fixed point {p0} left the middle atom")
    v2 = simplex_vertex(2, 2)
    # p1: segment [p0, v2] meets the facet x_2 = 1/2
    t1 = (HALF - p0[1]) / (v2[1] - p0[1])
    p1 = vec_add(p0, vec_scale(t1, vec_sub(v2, p0)))
    # p2: the image ray of [p0, p1] meets the facet again
    direction = mat_vec(rest.linear, vec_sub(p1, p0))
    if direction[1] <= 0:
        raise FixedPointOutsideB("image ray does not climb back to the facet")
    t2 = (HALF - p0[1]) / direction[1]
    p2 = vec_add(p0, vec_scale(t2, direction))
    if not 0 <= p2[0] <= HALF:
        raise FixedPointOutsideB(f"ray exits outside the shared facet at {p2}")
    alpha = t2 * params.beta  # p0->p2 = alpha * M(p0->p1) with L = beta * M
    matrix = (
        (Fraction(0), params.beta / alpha),
        (params.beta * alpha, Fraction(0)),
    )
    # defensive replay: the matrix must reproduce L on the frame basis
    b1, b2 = vec_sub(p1, p0), vec_sub(p2, p0)
    lhs1 = mat_vec(rest.linear, b1)
    rhs1 = vec_add(vec_scale(matrix[0][0], b1), vec_scale(matrix[0][1], b2))
    lhs2 = mat_vec(rest.linear, b2)
    rhs2 = vec_add(vec_scale(matrix[1][0], b1), vec_scale(matrix[1][1], b2))
    if lhs1 != rhs1 or lhs2 != rhs2:
        raise AssertionError("basis matrix fails to reproduce the linear part")
    return PlanarFrame(p0, p1, p2, alpha, matrix, rest)
