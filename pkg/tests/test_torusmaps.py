"""Coupled torus map tests: exact step values, symmetry commutation,
decomposition, permutahedron chart and the Lorenz interval family."""

import itertools
import random
from fractions import Fraction as F

import pytest

from ergobreak.torusmaps import (
    Distribution,
    LengthMismatch,
    LorenzParams,
    apply_permutation,
    coupled_step,
    coupling_jacobian,
    diag_perp_decompose,
    g_eval,
    in_permutahedron,
    lorenz_invariant_intervals,
    lorenz_step,
    mod1,
    permutahedron_representative,
    torus_inversion,
)


def random_torus_point(rng, n, den=61):
    # odd denominator keeps pairwise differences off the half-integer set
    return tuple(F(rng.randrange(den), den) for _ in range(n))


def transpositions(n):
    for i, j in itertools.combinations(range(n), 2):
        perm = list(range(n))
        perm[i], perm[j] = perm[j], perm[i]
        yield tuple(perm)


def test_g_fixed_point_of_inversion():
    assert g_eval(F(0)) == 0


def test_g_half_branch():
    assert g_eval(F(1, 2)) == F(1, 2)


def test_g_hand_value():
    assert g_eval(F(3, 4)) == F(-1, 4)


def test_uncoupled_limit_is_doubling():
    rng = random.Random(0)
    for n in (2, 4):
        u = random_torus_point(rng, n)
        assert coupled_step(u, Distribution.uniform(n), F(0)) == tuple(
            mod1(2 * c) for c in u
        )


def test_coupled_step_exceptional_branch_hand_value():
    u = (F(1, 4), F(3, 4))
    got = coupled_step(u, Distribution.uniform(2), F(1, 4))
    assert got == (F(5, 8), F(5, 8))


def test_diagonal_points_stay_diagonal():
    u = (F(3, 7),) * 5
    got = coupled_step(u, Distribution.uniform(5), F(1, 3))
    assert got == (mod1(F(6, 7)),) * 5


def test_length_mismatch_raises():
    with pytest.raises(LengthMismatch):
        coupled_step((F(0), F(1, 3)), Distribution.uniform(3), F(1, 4))


def test_inversion_values_and_involution():
    assert torus_inversion((F(0), F(0), F(0))) == (0, 0, 0)
    assert torus_inversion((F(1, 4), F(1, 2))) == (F(3, 4), F(1, 2))
    rng = random.Random(1)
    for _ in range(100):
        u = random_torus_point(rng, 4)
        assert torus_inversion(torus_inversion(u)) == u


def test_permutation_equivariance_exact():
    rng = random.Random(2)
    for n in range(2, 7):
        uni = Distribution.uniform(n)
        for _ in range(100 // n):
            u = random_torus_point(rng, n)
            for perm in transpositions(n):
                lhs = coupled_step(apply_permutation(perm, u), uni, F(1, 3))
                rhs = apply_permutation(perm, coupled_step(u, uni, F(1, 3)))
                assert lhs == rhs


def test_cluster_distribution_equivariance_first_coords_only():
    rng = random.Random(3)
    for n in (3, 5):
        rho = Distribution.clustered(n - 1, F(27, 100)) if n == 3 else Distribution.clustered(
            n - 1, F(1, 5)
        )
        u = random_torus_point(rng, n)
        for perm in transpositions(n - 1):
            full = perm + (n - 1,)
            lhs = coupled_step(apply_permutation(full, u), rho, F(2, 5))
            rhs = apply_permutation(full, coupled_step(u, rho, F(2, 5)))
            assert lhs == rhs


def test_inversion_equivariance_exact():
    rng = random.Random(4)
    for n in range(2, 7):
        rho = Distribution.uniform(n)
        for _ in range(100 // n):
            u = random_torus_point(rng, n)
            assert coupled_step(torus_inversion(u), rho, F(2, 5)) == torus_inversion(
                coupled_step(u, rho, F(2, 5))
            )


def test_jacobian_eigenstructure_symbolic():
    for n, eps in ((3, F(1, 4)), (5, F(2, 5))):
        rho = Distribution.uniform(n)
        jac = coupling_jacobian(rho, eps)
        ones = (F(1),) * n
        assert tuple(sum(r[j] for j in range(n)) for r in jac) == tuple(2 for _ in ones)
        for k in range(n - 1):
            v = [F(0)] * n
            v[k], v[k + 1] = F(1), F(-1)
            image = tuple(sum(jac[i][j] * v[j] for j in range(n)) for i in range(n))
            assert image == tuple(2 * (1 - eps) * c for c in v)


def test_jacobian_nonuniform_eigenvalues():
    rho = Distribution.clustered(3, F(27, 100))
    eps = F(2, 5)
    jac = coupling_jacobian(rho, eps)
    n = 4
    # rho-orthogonal vectors contract by 2(1-eps); the diagonal doubles
    for k in range(n - 1):
        v = [F(0)] * n
        v[k] = rho.weights[k + 1]
        v[k + 1] = -rho.weights[k]
        image = tuple(sum(jac[i][j] * v[j] for j in range(n)) for i in range(n))
        assert image == tuple(2 * (1 - eps) * c for c in v)
    image = tuple(sum(jac[i][j] for j in range(n)) for i in range(n))
    assert image == (2, 2, 2, 2)


def test_diagonal_part_doubles_for_uniform_coupling():
    rng = random.Random(5)
    for _ in range(20):
        u = random_torus_point(rng, 4)
        total, _ = diag_perp_decompose(u)
        total_next, _ = diag_perp_decompose(coupled_step(u, Distribution.uniform(4), F(1, 3)))
        assert mod1(total_next) == mod1(2 * total)


def test_diag_perp_decompose_values():
    total, perp = diag_perp_decompose((F(1, 5), F(1, 2), F(4, 5)))
    assert perp == (F(-3, 10), F(0), F(3, 10))
    assert total == F(3, 2)
    n = 3
    rebuilt = tuple(p + total / n for p in perp)
    assert rebuilt == (F(1, 5), F(1, 2), F(4, 5))
    assert diag_perp_decompose((F(2, 7),) * 4)[1] == (0, 0, 0, 0)


def test_permutahedron_center_and_known_translation():
    assert permutahedron_representative((F(0), F(0), F(0))) == (0, 0, 0)
    got = permutahedron_representative((F(2, 5), F(-1, 5), F(-1, 5)))
    assert got == (F(-4, 15), F(2, 15), F(2, 15))
    assert in_permutahedron(got)


def test_permutahedron_representative_random_points_in_range():
    rng = random.Random(6)
    for _ in range(50):
        _, perp = diag_perp_decompose(random_torus_point(rng, 3))
        rep = permutahedron_representative(perp)
        assert in_permutahedron(rep)
        assert all(-F(1, 3) <= c <= F(1, 3) for c in rep)
        assert sum(rep) == 0


def test_permutahedron_commutes_with_symmetries():
    rng = random.Random(7)
    for _ in range(20):
        _, perp = diag_perp_decompose(random_torus_point(rng, 4))
        rep = permutahedron_representative(perp)
        perm = (2, 0, 3, 1)
        assert permutahedron_representative(apply_permutation(perm, perp)) == (
            apply_permutation(perm, rep)
        )
        assert permutahedron_representative(tuple(-c for c in perp)) == tuple(
            -c for c in rep
        )


def test_lorenz_fixed_points_and_hand_value():
    p = LorenzParams(F(11, 10), F(3, 10))
    assert lorenz_step(F(0), p) == 0
    assert lorenz_step(F(1, 2), p) == F(1, 2)
    assert lorenz_step(F(1), p) == 1
    assert lorenz_step(F(3, 10), p) == F(33, 100)


def test_lorenz_reflection_symmetry():
    p = LorenzParams(F(3, 2), F(2, 5))
    rng = random.Random(8)
    for _ in range(100):
        x = F(rng.randrange(1001), 1000)
        assert lorenz_step(1 - x, p) == 1 - lorenz_step(x, p)


def test_lorenz_two_interval_regime():
    report = lorenz_invariant_intervals(LorenzParams(F(11, 10), F(3, 10)))
    assert report.regime == "two"
    assert report.intervals[0] == (F(7, 25), F(33, 100))
    assert report.intervals[1] == (F(67, 100), F(18, 25))
    for transcript in report.transcripts:
        assert all(step["inside"] for step in transcript)


def test_lorenz_one_interval_regime():
    report = lorenz_invariant_intervals(LorenzParams(F(19, 10), F(3, 10)))
    assert report.regime == "one"
    assert report.intervals == ((F(3, 25), F(22, 25)),)


def test_lorenz_degenerate_boundary():
    report = lorenz_invariant_intervals(LorenzParams(F(5, 3), F(3, 10)))
    assert report.regime == "degenerate"
