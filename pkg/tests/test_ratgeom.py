"""Exact-geometry kernel tests: barycentric coordinates, vertex enumeration,
separation certificates and the Fourier-Motzkin feasibility oracle."""

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergobreak.ratgeom import (
    DegenerateSimplex,
    Polytope,
    SimplexT,
    affine_dim,
    barycentric,
    contains_closed,
    disjoint_closed,
    enumerate_vertices,
    lp_feasibility,
    hull_halfspaces,
    intersect_vertices,
    polytope_from_halfspaces,
    polytope_from_vertices,
    rat_from_str,
    rat_to_str,
    rational_sqrt_floor,
    simplex_polytope,
    solve_linear_system,
    unit_vec,
    vec_add,
    vec_dot,
    vec_scale,
    zero_vec,
)

UNIT2 = SimplexT(((F(0), F(0)), (F(1), F(0)), (F(0), F(1))))


def rvec(rng, dim, den=60):
    return tuple(F(rng.randint(-2 * den, 2 * den), den) for _ in range(dim))


def random_simplex(rng, dim):
    while True:
        s = SimplexT(tuple(rvec(rng, dim) for _ in range(dim + 1)))
        if affine_dim(s.vertices) == dim:
            return s


def test_rat_roundtrip_and_decimal_parse():
    assert rat_to_str(F(-3, 7)) == "-3/7"
    assert rat_from_str("-3/7") == F(-3, 7)
    assert rat_from_str("5") == 5
    assert rat_from_str("0.25") == F(1, 4)
    with pytest.raises(ValueError):
        rat_from_str("1/0")


def test_barycentric_vertex_and_center():
    assert barycentric(UNIT2, (F(0), F(0))) == (1, 0, 0)
    assert barycentric(UNIT2, (F(1, 3), F(1, 3))) == (F(1, 3), F(1, 3), F(1, 3))


def test_barycentric_hand_solved_case():
    # 3x3 system solved by hand: lambda = (1 - x1 - x2, x1, x2).
    assert barycentric(UNIT2, (F(1, 2), F(1, 4))) == (F(1, 4), F(1, 2), F(1, 4))


def test_barycentric_degenerate_simplex():
    flat = SimplexT(((F(0), F(0)), (F(1), F(1)), (F(2), F(2))))
    with pytest.raises(DegenerateSimplex):
        barycentric(flat, (F(0), F(0)))


def test_contains_closed_interior_exterior_boundary():
    assert contains_closed(UNIT2, (F(1, 3), F(1, 3)))
    assert not contains_closed(UNIT2, (F(1), F(1)))
    assert contains_closed(UNIT2, (F(1, 2), F(1, 2)))


def test_barycentric_recombination_roundtrip():
    rng = random.Random(7)
    for dim in range(2, 9):
        s = random_simplex(rng, dim)
        for _ in range(1000 // (dim * dim)):
            lam_raw = [F(rng.randint(1, 9)) for _ in range(dim + 1)]
            total = sum(lam_raw)
            x = zero_vec(dim)
            for w, v in zip(lam_raw, s.vertices):
                x = vec_add(x, vec_scale(w / total, v))
            lam = barycentric(s, x)
            assert sum(lam) == 1
            recon = zero_vec(dim)
            for w, v in zip(lam, s.vertices):
                recon = vec_add(recon, vec_scale(w, v))
            assert recon == x


@settings(max_examples=60, deadline=None)
@given(st.integers(-40, 40), st.integers(-40, 40), st.integers(1, 17))
def test_barycentric_matches_halfspace_containment(p, q, den):
    x = (F(p, den), F(q, den))
    inside_h = all(vec_dot(n, x) <= c for n, c in simplex_polytope(UNIT2).hrep)
    assert contains_closed(UNIT2, x) == inside_h


def square(x0, y0):
    return polytope_from_vertices(
        [(F(x0), F(y0)), (F(x0 + 1), F(y0)), (F(x0), F(y0 + 1)), (F(x0 + 1), F(y0 + 1))]
    )


def test_intersect_square_with_halfplane():
    sq = square(0, 0)
    half = Polytope(2, hrep=(((F(1), F(0)), F(1, 2)),))
    combined = polytope_from_halfspaces((sq.hrep or ()) + (half.hrep or ()), 2)
    got = set(combined.vrep)
    assert got == {(0, 0), (F(1, 2), 0), (F(1, 2), 1), (0, 1)}


def test_intersect_idempotent_on_simplex():
    p = simplex_polytope(UNIT2)
    assert set(intersect_vertices(p, p)) == set(p.vrep)


def test_intersect_disjoint_squares_empty():
    assert intersect_vertices(square(0, 0), square(2, 2)) == []


def test_intersection_points_satisfy_both_hreps():
    rng = random.Random(11)
    for _ in range(25):
        a = simplex_polytope(random_simplex(rng, 3))
        b = simplex_polytope(random_simplex(rng, 3))
        for v in intersect_vertices(a, b):
            assert all(vec_dot(n, v) <= c for n, c in a.hrep)
            assert all(vec_dot(n, v) <= c for n, c in b.hrep)


def test_disjoint_squares_with_facet_separator():
    cert = disjoint_closed(square(0, 0), square(2, 2))
    assert cert.disjoint and cert.kind == "facet"
    n, c = cert.halfspace
    for v in square(0, 0).vrep:
        assert vec_dot(n, v) > c or all(vec_dot(n, w) > c for w in square(2, 2).vrep)


def test_touching_squares_report_witness():
    cert = disjoint_closed(square(0, 0), square(1, 1))
    assert not cert.disjoint
    assert cert.witness == (1, 1)


def test_open_atoms_in_unit_simplex_touch_only_on_midline():
    # closures of {x1 > 1/2} and {x2 > 1/2} inside the closed unit simplex
    a1 = polytope_from_halfspaces(
        (((F(-1), F(0)), F(-1, 2)), ((F(0), F(-1)), F(0)), ((F(1), F(1)), F(1))), 2
    )
    a2 = polytope_from_halfspaces(
        (((F(0), F(-1)), F(-1, 2)), ((F(-1), F(0)), F(0)), ((F(1), F(1)), F(1))), 2
    )
    cert = disjoint_closed(a1, a2)
    assert not cert.disjoint
    common = intersect_vertices(a1, a2)
    assert common == [(F(1, 2), F(1, 2))]


def test_disjoint_consistent_with_enumeration_and_symmetric():
    rng = random.Random(23)
    for _ in range(200):
        dim = rng.randint(2, 4)
        a = simplex_polytope(random_simplex(rng, dim))
        b = simplex_polytope(random_simplex(rng, dim))
        ab = disjoint_closed(a, b)
        ba = disjoint_closed(b, a)
        assert ab.disjoint == ba.disjoint
        assert ab.disjoint == (intersect_vertices(a, b) == [])
        if ab.kind == "farkas":
            combined = (a.hrep or ()) + (b.hrep or ())
            normal = zero_vec(dim)
            offset = F(0)
            for w, (n, c) in zip(ab.combination, combined):
                assert w >= 0
                normal = vec_add(normal, vec_scale(w, n))
                offset += w * c
            assert normal == zero_vec(dim) and offset < 0


def test_contains_closed_agrees_with_lp_oracle():
    rng = random.Random(5)
    for _ in range(100):
        dim = rng.randint(2, 5)
        s = random_simplex(rng, dim)
        x = rvec(rng, dim)
        # LP: exists lambda >= 0, sum lambda = 1, V lambda = x
        nv = dim + 1
        rows = []
        for i in range(nv):
            rows.append((vec_scale(F(-1), unit_vec(nv, i)), F(0)))
        ones = tuple(F(1) for _ in range(nv))
        rows.append((ones, F(1)))
        rows.append((vec_scale(F(-1), ones), F(-1)))
        for coord in range(dim):
            row = tuple(v[coord] for v in s.vertices)
            rows.append((row, x[coord]))
            rows.append((vec_scale(F(-1), row), -x[coord]))
        feasible, _ = lp_feasibility(rows, nv)
        assert feasible == contains_closed(s, x)


def test_enumerate_vertices_of_cube():
    faces = []
    for i in range(3):
        faces.append((unit_vec(3, i), F(1)))
        faces.append((vec_scale(F(-1), unit_vec(3, i)), F(0)))
    vs = enumerate_vertices(tuple(faces), 3)
    assert len(vs) == 8


def test_hull_halfspaces_roundtrip():
    p = simplex_polytope(UNIT2)
    again = hull_halfspaces(p.vrep, 2)
    got = set(enumerate_vertices(again, 2))
    assert got == set(p.vrep)


def test_solve_linear_system_singular_returns_none():
    assert solve_linear_system(((F(1), F(2)), (F(2), F(4))), (F(1), F(2))) is None


def test_rational_sqrt_floor_exact_and_bracket():
    assert rational_sqrt_floor(F(36, 25)) == F(6, 5)
    approx = rational_sqrt_floor(F(2), refine=20)
    assert approx * approx <= 2 < (approx + F(1, 1 << 20)) ** 2
