"""Exact rational linear algebra and small-dimension polytope geometry.

Everything in this module computes over ``fractions.Fraction``; there are no
tolerances anywhere. Polytopes are stored closed; callers that need open-set
semantics test strict inequalities on the returned barycentric/facet values.

Conventions:

* a half-space is a pair ``(normal, offset)`` meaning ``normal . x <= offset``;
* rationals serialize as the string ``"p/q"`` with ``q > 0`` and gcd(p,q)=1.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable, Optional, Sequence

log = logging.getLogger(__name__)

Rat = Fraction
Vec = tuple[Fraction, ...]
Halfspace = tuple[Vec, Fraction]

MAX_DECIMAL_DENOMINATOR = 10**12


class GeometryError(ValueError):
    """Base class for exact-geometry failures."""


class DegenerateSimplex(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


# ---------------------------------------------------------------------------
# rational parsing / formatting
# ---------------------------------------------------------------------------


def rat_from_str(text: str) -> Fraction:
    """Parse ``"p/q"``, an integer literal, or a decimal.

    Decimals are converted exactly as written; conversions whose denominator
    would exceed 10^12 are rejected so that config files cannot smuggle in
    unintended precision. Every decimal conversion is logged.
    """
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        d = int(den)
        if d <= 0:
            raise ValueError(f"denominator must be positive in {text!r}")
        return Fraction(int(num), d)
    if "." in text or "e" in text.lower():
        value = Fraction(text)
        if value.denominator > MAX_DECIMAL_DENOMINATOR:
            raise ValueError(
                f"decimal {text!r} needs denominator {value.denominator} > 10^12; "
                "pass an explicit p/q instead"
            )
        log.info("converted decimal %s to exact rational %s", text, rat_to_str(value))
        return value
    return Fraction(int(text))


def rat_to_str(value: Fraction) -> str:
    """Canonical ``"p/q"`` form, always with an explicit denominator."""
    return f"{value.numerator}/{value.denominator}"


def vec_from_strs(parts: Iterable[str]) -> Vec:
    return tuple(rat_from_str(p) for p in parts)


def vec_to_strs(v: Vec) -> list[str]:
    return [rat_to_str(c) for c in v]


# ---------------------------------------------------------------------------
# vector / matrix helpers
# ---------------------------------------------------------------------------


def as_vec(coords: Sequence) -> Vec:
    return tuple(Fraction(c) for c in coords)


def vec_add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vec_sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vec_scale(c: Fraction, a: Vec) -> Vec:
    return tuple(c * x for x in a)


def vec_dot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), Fraction(0))


def vec_norm_sq(a: Vec) -> Fraction:
    return vec_dot(a, a)


def zero_vec(dim: int) -> Vec:
    return (Fraction(0),) * dim


def unit_vec(dim: int, i: int) -> Vec:
    return tuple(Fraction(1 if j == i else 0) for j in range(dim))


def solve_linear_system(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Optional[Vec]:
    """Solve a square system exactly; ``None`` if the matrix is singular."""
    n = len(rows)
    aug = [list(map(Fraction, rows[i])) + [Fraction(rhs[i])] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col] / pv
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return tuple(aug[i][n] / aug[i][i] for i in range(n))


def mat_vec(rows: Sequence[Vec], x: Vec) -> Vec:
    return tuple(vec_dot(r, x) for r in rows)


def mat_mul(a: Sequence[Vec], b: Sequence[Vec]) -> tuple[Vec, ...]:
    bt = list(zip(*b))
    return tuple(tuple(vec_dot(row, col) for col in bt) for row in a)


def identity_matrix(n: int) -> tuple[Vec, ...]:
    return tuple(unit_vec(n, i) for i in range(n))


def mat_inverse(rows: Sequence[Vec]) -> Optional[tuple[Vec, ...]]:
    n = len(rows)
    cols = []
    for i in range(n):
        col = solve_linear_system(rows, unit_vec(n, i))
        if col is None:
            return None
        cols.append(col)
    return tuple(zip(*cols))


@dataclass(frozen=True)
class AffineMapExact:
    """Exact affine map ``x -> linear . x + offset`` with square linear part."""

    linear: tuple[Vec, ...]
    offset: Vec

    def __post_init__(self):
        n = len(self.offset)
        if len(self.linear) != n or any(len(r) != n for r in self.linear):
            raise DimensionMismatch("linear part must be square and match the offset")

    @property
    def dim(self) -> int:
        return len(self.offset)

    def __call__(self, x: Vec) -> Vec:
        if len(x) != self.dim:
            raise DimensionMismatch(f"expected dim {self.dim}, got {len(x)}")
        return vec_add(mat_vec(self.linear, x), self.offset)

    def compose(self, inner: "AffineMapExact") -> "AffineMapExact":
        """Returns ``self o inner``."""
        lin = mat_mul(self.linear, inner.linear)
        off = vec_add(mat_vec(self.linear, inner.offset), self.offset)
        return AffineMapExact(lin, off)

    def linear_power(self, k: int) -> tuple[Vec, ...]:
        out = identity_matrix(self.dim)
        for _ in range(k):
            out = mat_mul(out, self.linear)
        return out

    def fixed_point(self) -> Optional[Vec]:
        rows = [
            tuple(self.linear[i][j] - (1 if i == j else 0) for j in range(self.dim))
            for i in range(self.dim)
        ]
        rhs = tuple(-c for c in self.offset)
        return solve_linear_system(rows, rhs)


# ---------------------------------------------------------------------------
# simplices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimplexT:
    """A d-simplex in R^d given by its d+1 affinely independent vertices."""

    vertices: tuple[Vec, ...]

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def edge_matrix(self) -> tuple[Vec, ...]:
        v0 = self.vertices[0]
        return tuple(vec_sub(v, v0) for v in self.vertices[1:])


def barycentric(s: SimplexT, x: Vec) -> tuple[Fraction, ...]:
    """Exact barycentric coordinates of ``x`` with respect to ``s``.

    Raises DegenerateSimplex when the vertices are affinely dependent.
    """
    d = s.dim
    if len(x) != d:
        raise DimensionMismatch(f"point has dim {len(x)}, simplex has dim {d}")
    rows = [tuple(Fraction(1) for _ in range(d + 1))]
    for i in range(d):
        rows.append(tuple(v[i] for v in s.vertices))
    rhs = (Fraction(1),) + tuple(x)
    lam = solve_linear_system(rows, rhs)
    if lam is None:
        raise DegenerateSimplex("simplex vertices are affinely dependent")
    return lam


def contains_closed(s: SimplexT, x: Vec) -> bool:
    """Closed containment: all barycentric coordinates nonnegative."""
    return all(c >= 0 for c in barycentric(s, x))


def contains_open(s: SimplexT, x: Vec) -> bool:
    return all(c > 0 for c in barycentric(s, x))


def simplex_halfspaces(s: SimplexT) -> tuple[Halfspace, ...]:
    """The d+1 facet half-spaces of a nondegenerate simplex."""
    facets = []
    for skip in range(len(s.vertices)):
        pts = [v for i, v in enumerate(s.vertices) if i != skip]
        hs = hyperplane_through(pts, inside=s.vertices[skip])
        if hs is None:
            raise DegenerateSimplex("simplex vertices are affinely dependent")
        facets.append(hs)
    return tuple(facets)


def hyperplane_through(points: Sequence[Vec], inside: Vec) -> Optional[Halfspace]:
    """Half-space whose boundary contains ``points`` and whose interior side
    contains ``inside``; ``None`` if the points do not span a hyperplane."""
    d = len(points[0])
    if len(points) != d:
        return None
    base = points[0]
    rows = [vec_sub(p, base) for p in points[1:]]
    normal = _nullspace_vector(rows, d)
    if normal is None:
        return None
    offset = vec_dot(normal, base)
    side = vec_dot(normal, inside)
    if side == offset:
        return None
    if side > offset:
        normal = vec_scale(Fraction(-1), normal)
        offset = -offset
    return normal, offset


def _nullspace_vector(rows: list[Vec], dim: int) -> Optional[Vec]:
    """A nonzero vector orthogonal to d-1 row vectors, or None if they are
    linearly dependent."""
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(dim):
        pivot = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        pv = mat[r][col]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                f = mat[i][col] / pv
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    if r != dim - 1:
        return None
    free = next(c for c in range(dim) if c not in pivots)
    sol = [Fraction(0)] * dim
    sol[free] = Fraction(1)
    for i, col in enumerate(pivots):
        sol[col] = -mat[i][free] / mat[i][col]
    return tuple(sol)


# ---------------------------------------------------------------------------
# polytopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polytope:
    """A closed convex polytope with optional V- and H-representations."""

    dim: int
    vrep: Optional[tuple[Vec, ...]] = None
    hrep: Optional[tuple[Halfspace, ...]] = None

    def with_vrep(self) -> "Polytope":
        if self.vrep is not None:
            return self
        if self.hrep is None:
            raise GeometryError("polytope has neither representation")
        return Polytope(self.dim, enumerate_vertices(self.hrep, self.dim), self.hrep)

    def with_hrep(self) -> "Polytope":
        if self.hrep is not None:
            return self
        if self.vrep is None:
            raise GeometryError("polytope has neither representation")
        return Polytope(self.dim, self.vrep, hull_halfspaces(self.vrep, self.dim))

    def contains(self, x: Vec) -> bool:
        if self.hrep is not None:
            return all(vec_dot(n, x) <= c for n, c in self.hrep)
        return self.with_hrep().contains(x)


def polytope_from_vertices(vertices: Sequence[Vec], dim: Optional[int] = None) -> Polytope:
    vs = dedupe_points(vertices)
    d = dim if dim is not None else len(vs[0])
    return Polytope(d, tuple(vs), hull_halfspaces(vs, d))


def polytope_from_halfspaces(halfspaces: Sequence[Halfspace], dim: int) -> Polytope:
    return Polytope(dim, enumerate_vertices(tuple(halfspaces), dim), tuple(halfspaces))


def simplex_polytope(s: SimplexT) -> Polytope:
    return Polytope(s.dim, tuple(s.vertices), simplex_halfspaces(s))


def dedupe_points(points: Iterable[Vec]) -> list[Vec]:
    seen: list[Vec] = []
    for p in points:
        if p not in seen:
            seen.append(p)
    return seen


def affine_dim(points: Sequence[Vec]) -> int:
    """Dimension of the affine hull of a point set (-1 for the empty set)."""
    if not points:
        return -1
    base = points[0]
    rows = [list(vec_sub(p, base)) for p in points[1:]]
    rank = 0
    for col in range(len(base)):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][col]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / pv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _integer_rows(halfspaces: Sequence[Halfspace]) -> list[tuple[tuple[int, ...], int]]:
    """Clear denominators per constraint so vertex solves stay in integers."""
    out = []
    for normal, offset in halfspaces:
        denlcm = 1
        for c in (*normal, offset):
            denlcm = denlcm * c.denominator // _gcd(denlcm, c.denominator)
        row = tuple(int(c * denlcm) for c in normal)
        out.append((row, int(offset * denlcm)))
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _bareiss_solve(rows: list[tuple[int, ...]], rhs: list[int]) -> Optional[Vec]:
    """Fraction-free Gaussian elimination for square integer systems."""
    n = len(rows)
    m = [list(rows[i]) + [rhs[i]] for i in range(n)]
    prev = 1
    for k in range(n):
        pivot = next((r for r in range(k, n) if m[r][k] != 0), None)
        if pivot is None:
            return None
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    sol = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(m[i][n])
        for j in range(i + 1, n):
            acc -= m[i][j] * sol[j]
        sol[i] = acc / m[i][i]
    return tuple(sol)


def enumerate_vertices(halfspaces: Sequence[Halfspace], dim: int) -> tuple[Vec, ...]:
    """Vertices of a bounded H-polytope by facet-subset enumeration.

    Solves every ``dim``-subset of the constraint list as an equality system
    and keeps the feasible solutions. Intended for desk-scale dimensions
    (dim <= 8); the subset count is combinatorial.
    """
    if dim > 8:
        raise GeometryError("vertex enumeration is limited to dim <= 8")
    irows = _integer_rows(halfspaces)
    verts: list[Vec] = []
    for subset in itertools.combinations(range(len(irows)), dim):
        rows = [irows[i][0] for i in subset]
        rhs = [irows[i][1] for i in subset]
        x = _bareiss_solve(rows, rhs)
        if x is None:
            continue
        if all(sum(r * c for r, c in zip(row, x)) <= b for row, b in irows):
            if x not in verts:
                verts.append(x)
    return tuple(verts)


def hull_halfspaces(vertices: Sequence[Vec], dim: int) -> tuple[Halfspace, ...]:
    """Facet half-spaces of the convex hull of full-dimensional ``vertices``."""
    vs = dedupe_points(vertices)
    if affine_dim(vs) != dim:
        raise GeometryError("vertex set is not full-dimensional")
    facets: list[Halfspace] = []
    for subset in itertools.combinations(vs, dim):
        others = [v for v in vs if v not in subset]
        base = subset[0]
        normal = _nullspace_vector([vec_sub(p, base) for p in subset[1:]], dim)
        if normal is None:
            continue
        offset = vec_dot(normal, base)
        sides = [vec_dot(normal, v) - offset for v in others]
        if all(s <= 0 for s in sides):
            pass
        elif all(s >= 0 for s in sides):
            normal, offset = vec_scale(Fraction(-1), normal), -offset
        else:
            continue
        normal, offset = normalize_halfspace(normal, offset)
        if (normal, offset) not in facets:
            facets.append((normal, offset))
    return tuple(facets)


def normalize_halfspace(normal: Vec, offset: Fraction) -> Halfspace:
    lead = next((c for c in normal if c != 0), None)
    if lead is None:
        return normal, offset
    scale = 1 / abs(lead)
    return vec_scale(scale, normal), offset * scale


def intersect_vertices(a: Polytope, b: Polytope) -> list[Vec]:
    """Exact vertex set of the intersection of two H-polytopes.

    An empty list signals an empty intersection; it is not an error.
    """
    if a.dim != b.dim:
        raise DimensionMismatch("polytopes live in different dimensions")
    ah = a.with_hrep().hrep or ()
    bh = b.with_hrep().hrep or ()
    return list(enumerate_vertices(ah + bh, a.dim))


@dataclass(frozen=True)
class SeparationCertificate:
    """Outcome of a disjointness test, re-checkable from its fields alone.

    ``kind`` is one of:

    * ``"facet"``: ``halfspace`` is a facet of one body and every vertex of
      the other violates it;
    * ``"farkas"``: ``combination`` are nonnegative multipliers over the
      combined facet list of both bodies proving 0 <= -1;
    * ``"witness"``: the bodies meet and ``witness`` is a common point.
    """

    disjoint: bool
    kind: str
    halfspace: Optional[Halfspace] = None
    combination: Optional[tuple[Fraction, ...]] = None
    witness: Optional[Vec] = None


def disjoint_closed(a: Polytope, b: Polytope) -> SeparationCertificate:
    """Decide whether two bounded closed polytopes are disjoint.

    Disjoint pairs come with a separating facet when one exists, and with an
    exact Farkas infeasibility certificate otherwise; intersecting pairs come
    with a common point.
    """
    if a.dim != b.dim:
        raise DimensionMismatch("polytopes live in different dimensions")
    a = a.with_hrep().with_vrep()
    b = b.with_hrep().with_vrep()
    for body, other in ((a, b), (b, a)):
        for normal, offset in body.hrep or ():
            if all(vec_dot(normal, v) > offset for v in other.vrep or ()):
                return SeparationCertificate(True, "facet", halfspace=(normal, offset))
    common = intersect_vertices(a, b)
    if common:
        return SeparationCertificate(False, "witness", witness=common[0])
    combined = (a.hrep or ()) + (b.hrep or ())
    feasible, payload = lp_feasibility(combined, a.dim)
    if feasible:
        # Enumeration found nothing but the LP found a point: impossible for
        # bounded bodies, so treat as an internal inconsistency.
        raise GeometryError(f"inconsistent separation state at {payload}")
    return SeparationCertificate(True, "farkas", combination=payload)


# ---------------------------------------------------------------------------
# exact feasibility (phase-1 simplex with Bland's rule)
# ---------------------------------------------------------------------------


def lp_feasibility(halfspaces: Sequence[Halfspace], dim: int):
    """Decide feasibility of a ``normal . x <= offset`` system exactly.

    Returns ``(True, point)`` or ``(False, multipliers)``; the multipliers
    are a nonnegative Farkas combination of the input rows whose normal sums
    to zero and whose offset sums to a negative number. Phase-1 simplex over
    Fractions: free variables split as x = u - w, rows with negative offset
    negated and given artificial variables, Bland's rule for termination.
    """
    m = len(halfspaces)
    sign = [Fraction(-1) if Fraction(c) < 0 else Fraction(1) for _, c in halfspaces]
    n_art = sum(1 for s in sign if s < 0)
    ncols = 2 * dim + m + n_art
    rhs_col = ncols
    table: list[list[Fraction]] = []
    basis: list[int] = []
    ident_col: list[int] = []  # column that is e_i in the initial tableau
    next_art = 2 * dim + m
    for i, (normal, offset) in enumerate(halfspaces):
        row = [Fraction(0)] * (ncols + 1)
        for j in range(dim):
            row[j] = sign[i] * normal[j]
            row[dim + j] = -sign[i] * normal[j]
        row[2 * dim + i] = sign[i]
        if sign[i] < 0:
            row[next_art] = Fraction(1)
            basis.append(next_art)
            ident_col.append(next_art)
            next_art += 1
        else:
            basis.append(2 * dim + i)
            ident_col.append(2 * dim + i)
        row[rhs_col] = sign[i] * Fraction(offset)
        table.append(row)
    cost = [Fraction(0)] * ncols + [Fraction(0)]
    for j in range(2 * dim + m, ncols):
        cost[j] = Fraction(1)
    # zc holds z_j - c_j; its rhs entry is the current objective value
    zc = [Fraction(0)] * (ncols + 1)
    for i, b in enumerate(basis):
        if cost[b]:
            for j in range(ncols + 1):
                zc[j] += table[i][j]
    for j in range(ncols):
        zc[j] -= cost[j]
    while True:
        enter = next((j for j in range(ncols) if zc[j] > 0), None)
        if enter is None:
            break
        ratios = [
            (table[i][rhs_col] / table[i][enter], basis[i], i)
            for i in range(m)
            if table[i][enter] > 0
        ]
        if not ratios:
            raise GeometryError("phase-1 objective unbounded; inconsistent setup")
        _, _, leave = min(ratios)
        pv = table[leave][enter]
        table[leave] = [v / pv for v in table[leave]]
        factor = zc[enter]
        if factor:
            zc = [a - factor * b for a, b in zip(zc, table[leave])]
        for i in range(m):
            if i != leave and table[i][enter] != 0:
                f = table[i][enter]
                table[i] = [a - f * b for a, b in zip(table[i], table[leave])]
        basis[leave] = enter
    if zc[rhs_col] == 0:
        x = [Fraction(0)] * dim
        for i, b in enumerate(basis):
            if b < dim:
                x[b] += table[i][rhs_col]
            elif b < 2 * dim:
                x[b - dim] -= table[i][rhs_col]
        return True, tuple(x)
    # infeasible: duals read off the initial identity columns give Farkas
    lam = []
    for i in range(m):
        y_i = zc[ident_col[i]] + cost[ident_col[i]]
        lam.append(-sign[i] * y_i)
    return False, tuple(lam)


def affine_coordinates(points: Sequence[Vec], x: Vec) -> Optional[tuple[Fraction, ...]]:
    """Weights summing to 1 expressing ``x`` over affinely independent
    ``points`` (possibly fewer than dim+1, e.g. a facet's vertices).

    Returns None when the points are affinely dependent or ``x`` lies
    outside their affine hull.
    """
    m = len(points)
    dim = len(x)
    rows = [[Fraction(1)] * m + [Fraction(1)]]
    for i in range(dim):
        rows.append([p[i] for p in points] + [Fraction(x[i])])
    rank = 0
    for col in range(m):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            return None
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][col]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / pv
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    for r in range(rank, len(rows)):
        if rows[r][m] != 0:
            return None
    weights = [Fraction(0)] * m
    for r in range(rank):
        col = next(c for c in range(m) if rows[r][c] != 0)
        weights[col] = rows[r][m] / rows[r][col]
    return tuple(weights)


# ---------------------------------------------------------------------------
# exact square-root brackets
# ---------------------------------------------------------------------------


def rational_sqrt_floor(value: Fraction, refine: int = 0) -> Fraction:
    """Largest rational of the form ``k / (q * 2^refine)`` not exceeding
    ``sqrt(value)``; exact when ``value`` is a perfect rational square."""
    if value < 0:
        raise ValueError("negative radicand")
    p, q = value.numerator, value.denominator
    scale = q << refine
    root = isqrt(p * q << (2 * refine))
    return Fraction(root, scale)


def is_perfect_square(value: Fraction) -> bool:
    p, q = value.numerator, value.denominator
    return p >= 0 and isqrt(p) ** 2 == p and isqrt(q) ** 2 == q
