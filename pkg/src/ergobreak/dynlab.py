"""Floating-point experimentation lab.

Long orbits of the coupled torus maps, the interval family and the simplex
maps; permutahedron polar-plot data; occupancy-based orbit symmetry
classification; and barycentric-grid density estimates. Nothing here proves
anything — exact claims live in the certificate path — but orbits are
deterministic given (parameters, seed) and are used as cross-checks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .asiup import HMapSpec
from .ratgeom import Vec
from .torusmaps import Distribution

BURN_IN_DEFAULT = 500
SECTORS_DEFAULT = 64
THRESHOLD_DEFAULT = 0.9


class ParameterOutOfRange(ValueError):
    pass


class InsufficientSamples(ValueError):
    pass


@dataclass
class Orbit:
    """Deterministic float trajectory with provenance."""

    space: str
    params: dict
    seed: int
    burn_in: int
    samples: np.ndarray  # (steps+1, dim) or (steps+1,) for interval orbits
    events: int = 0

    @property
    def tail(self) -> np.ndarray:
        """Samples after the burn-in: indices burn_in+1 .. steps."""
        return self.samples[self.burn_in + 1 :]


def _as_float_weights(rho: Optional[Distribution], n: int) -> np.ndarray:
    if rho is None:
        rho = Distribution.uniform(n)
    if len(rho) != n:
        raise ParameterOutOfRange(f"{len(rho)} weights for {n} coordinates")
    return np.array([float(w) for w in rho.weights], dtype=np.float64)


def run_orbit(
    system: str,
    params: dict,
    steps: int,
    burn_in: int = BURN_IN_DEFAULT,
    seed: int = 0,
) -> Orbit:
    """Generate a deterministic orbit of the requested system.

    The initial condition is drawn uniformly on the phase space from the
    seeded generator. Supported systems: "torus" (n, eps, optional rho),
    "lorenz" (a, xd), "simplex-g" (d, eps, optional rho), "simplex-h"
    (spec: a certified map candidate).
    """
    if not steps > burn_in >= 0:
        raise ParameterOutOfRange("need steps > burn_in >= 0")
    rng = np.random.default_rng(seed)
    if system == "torus":
        n = int(params["n"])
        if not 2 <= n <= 32:
            raise ParameterOutOfRange("torus orbits support 2 <= n <= 32")
        eps = float(params["eps"])
        if not 0 <= eps < 0.5:
            raise ParameterOutOfRange("eps must lie in [0, 1/2)")
        rho = _as_float_weights(params.get("rho"), n)
        u0 = rng.random(n)
        out = np.empty((steps + 1, n), dtype=np.float64)
        events = kernels.torus_orbit(u0, rho, eps, steps, out)
        return Orbit("torus", dict(params), seed, burn_in, out, events)
    if system == "lorenz":
        a, xd = float(params["a"]), float(params["xd"])
        if not (1 < a < 2 and 0.25 < xd < 0.5):
            raise ParameterOutOfRange("need a in (1,2), xd in (1/4,1/2)")
        out = np.empty(steps + 1, dtype=np.float64)
        kernels.lorenz_orbit(float(rng.random()), a, xd, steps, out)
        return Orbit("interval", dict(params), seed, burn_in, out)
    if system == "simplex-g":
        d = int(params["d"])
        if not 1 <= d <= 31:
            raise ParameterOutOfRange("simplex orbits support 1 <= d <= 31")
        eps = float(params["eps"])
        rho = _as_float_weights(params.get("rho"), d + 1)
        x0 = rng.dirichlet(np.ones(d + 1))[:d]
        s0 = float(rng.random())
        if "start" in params:
            x0 = np.asarray(params["start"], dtype=np.float64)
        if "fiber" in params:
            s0 = float(params["fiber"])
        out = np.empty((steps + 1, d), dtype=np.float64)
        events = kernels.simplex_g_orbit(
            np.ascontiguousarray(x0), s0, rho, eps, steps, out
        )
        return Orbit("simplex", dict(params), seed, burn_in, out, events)
    if system == "simplex-h":
        spec = params["spec"]
        x0 = rng.dirichlet(np.ones(spec.d + 1))[: spec.d]
        if "start" in params:
            x0 = np.asarray(params["start"], dtype=np.float64)
        return _run_h_orbit(spec, x0, steps, burn_in, seed, dict(params))
    raise ParameterOutOfRange(f"unknown system {system!r}")


# ---------------------------------------------------------------------------
# float evaluation of a certified map candidate
# ---------------------------------------------------------------------------


def _float_affine(m) -> tuple[np.ndarray, np.ndarray]:
    lin = np.array([[float(c) for c in row] for row in m.linear])
    off = np.array([float(c) for c in m.offset])
    return lin, off


def _run_h_orbit(spec: HMapSpec, x0, steps, burn_in, seed, params) -> Orbit:
    d, k = spec.d, spec.k
    c_lin, c_off = _float_affine(spec.map_on_C)
    frame = np.array([[float(c) for c in p] for p in spec.frame_points])
    base = frame[0]
    lam = float(spec.lam)
    eps_a = float(spec.eps_a)
    a = float(spec.a)
    rho = np.full(d + 1, 1.0 / (d + 1))
    # barycentric solver for membership in the frame simplex
    bmat = np.vstack([np.ones(d + 1), frame.T])
    binv = np.linalg.inv(bmat)

    def sigma(x):
        out = np.empty(d)
        out[: d - 1] = x[: d - 1][::-1]
        out[d - 1] = 1.0 - x.sum()
        return out

    def in_c(x):
        lamb = binv @ np.concatenate(([1.0], x))
        return np.all(lamb >= -1e-12)

    def in_atom_b(x, kk):
        from .simplexmaps import AtomId, atom_halfspaces

        for normal, offset in atom_halfspaces(AtomId("B", kk), d):
            if sum(float(n) * xi for n, xi in zip(normal, x)) >= float(offset):
                return False
        return True

    def step(x):
        if in_c(x):
            return c_lin @ x + c_off
        sx = sigma(x)
        if in_c(sx):
            return sigma(c_lin @ sx + c_off)
        total = x.sum()
        if total < 0.5:
            return a * x
        for idx in range(d):
            if x[idx] > 0.5:
                out = a * x
                out[idx] += 1.0 - a
                return out
        if in_atom_b(x, k):
            return base + lam * (x - base)
        if k != d - k and in_atom_b(x, d - k):
            sbase = sigma(base)
            return sbase + lam * (x - sbase)
        # residual region: the reduced coupled map via one pipeline step
        out = np.empty((2, d))
        kernels.simplex_g_orbit(np.ascontiguousarray(x), 0.37, rho, eps_a, 1, out)
        return out[1]

    samples = np.empty((steps + 1, d))
    samples[0] = x0
    x = x0.astype(np.float64)
    for t in range(1, steps + 1):
        x = step(x)
        samples[t] = x
    return Orbit("simplex", params, seed, burn_in, samples)


# ---------------------------------------------------------------------------
# permutahedron chart and polar-plot data
# ---------------------------------------------------------------------------


def perp_components(samples: np.ndarray) -> np.ndarray:
    return samples - samples.mean(axis=1, keepdims=True)


def permutahedron_batch(perp: np.ndarray, max_iter: int = 128) -> np.ndarray:
    """Float twin of the exact representative: translate each zero-sum row
    into the permutahedron cell by correcting violated sorted-prefix sums."""
    y = perp.copy()
    m, n = y.shape
    bounds = np.array([s * (n - s) / (2.0 * n) for s in range(1, n)])
    for _ in range(max_iter):
        order = np.argsort(-y, axis=1)
        sorted_y = np.take_along_axis(y, order, axis=1)
        prefix = np.cumsum(sorted_y[:, :-1], axis=1)
        violated = prefix > bounds + 1e-15
        rows = violated.any(axis=1)
        if not rows.any():
            return y
        first = np.argmax(violated, axis=1)
        for r in np.nonzero(rows)[0]:
            s = first[r] + 1
            idx = order[r, :s]
            y[r] += s / float(n)
            y[r, idx] -= 1.0
    raise RuntimeError("permutahedron correction failed to settle")


def polar_plot_data(orbit: Orbit) -> np.ndarray:
    """Rows (t, i, angle, radius) for the post-burn-in iterates.

    Angle rescales the representative coordinate from its cell range
    [-(N-1)/2N, (N-1)/2N] to (-pi, pi]; radius is the iterate index starting
    at 1 after the burn-in.
    """
    if orbit.space != "torus":
        raise ParameterOutOfRange("polar data needs a torus orbit")
    tail = orbit.tail
    n = tail.shape[1]
    reps = permutahedron_batch(perp_components(tail))
    half_range = (n - 1) / (2.0 * n)
    rows = np.empty((reps.shape[0] * n, 4))
    for i in range(n):
        block = rows[i * reps.shape[0] : (i + 1) * reps.shape[0]]
        block[:, 0] = np.arange(1, reps.shape[0] + 1)
        block[:, 1] = i + 1
        block[:, 2] = reps[:, i] / half_range * math.pi
        block[:, 3] = np.arange(1, reps.shape[0] + 1)
    return rows


# ---------------------------------------------------------------------------
# symmetry classification
# ---------------------------------------------------------------------------


@dataclass
class SymmetryVerdict:
    """Best-scoring candidate subgroup with its occupancy evidence."""

    label: str
    score: float
    inversion_symmetric: bool
    inversion_score: float
    occupancy: tuple = ()
    candidate_scores: dict = field(default_factory=dict)

    @property
    def inversion_asymmetric(self) -> bool:
        return not self.inversion_symmetric


def _occupancy_sets(reps: np.ndarray, sectors: int, min_share: float) -> list[frozenset]:
    n = reps.shape[1]
    half_range = (n - 1) / (2.0 * n)
    scaled = (reps + half_range) / (2 * half_range)
    idx = np.clip((scaled * sectors).astype(int), 0, sectors - 1)
    floor_count = max(1, int(min_share * reps.shape[0] / sectors))
    occ = []
    for i in range(n):
        counts = np.bincount(idx[:, i], minlength=sectors)
        occ.append(frozenset(np.nonzero(counts > floor_count)[0].tolist()))
    return occ


def _jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def _candidate_groups(n: int):
    """The finite candidate list: all coordinate permutations, the subgroups
    fixing one coordinate, and the two-block product subgroups."""
    full = [(i, j) for i, j in itertools.combinations(range(n), 2)]
    yield "full", full, n
    for fixed in range(n):
        gens = [(i, j) for i, j in full if fixed not in (i, j)]
        idx = [i + 1 for i in range(n) if i != fixed]
        label = "perm(" + ",".join(map(str, idx)) + ")"
        yield label, gens, n - 1
    for size in range(2, n - 1):
        for block in itertools.combinations(range(n), size):
            rest = tuple(i for i in range(n) if i not in block)
            if len(rest) < 2 or block > rest:
                continue
            gens = [(i, j) for i, j in itertools.combinations(block, 2)]
            gens += [(i, j) for i, j in itertools.combinations(rest, 2)]
            label = (
                "perm("
                + ",".join(str(i + 1) for i in block)
                + ")x perm("
                + ",".join(str(i + 1) for i in rest)
                + ")"
            )
            yield label, gens, len(block)


def classify_symmetry(
    orbit: Orbit,
    sectors: int = SECTORS_DEFAULT,
    threshold: float = THRESHOLD_DEFAULT,
    min_share: float = 0.05,
) -> SymmetryVerdict:
    """Score candidate residual symmetry groups on sector occupancy.

    Each coordinate's visited sector set is compared with its image under
    the candidate generators (Jaccard overlap, worst generator counts);
    inversion symmetry compares against the mirrored sectors. The verdict is
    the largest candidate clearing the threshold.
    """
    if orbit.space != "torus":
        raise ParameterOutOfRange("classification needs a torus orbit")
    tail = orbit.tail
    if tail.shape[0] < 8 * sectors:
        raise InsufficientSamples(f"need at least {8 * sectors} retained samples")
    reps = permutahedron_batch(perp_components(tail))
    occ = _occupancy_sets(reps, sectors, min_share)
    n = len(occ)

    def gen_score(i, j):
        return min(_jaccard(occ[i], occ[j]), 1.0)

    scores = {}
    for label, gens, _size in _candidate_groups(n):
        scores[label] = min((gen_score(i, j) for i, j in gens), default=1.0)
    mirrored = [frozenset(sectors - 1 - s for s in o) for o in occ]
    inv_score = sum(_jaccard(a, b) for a, b in zip(occ, mirrored)) / n
    inversion = inv_score >= threshold

    # candidates are generated largest group first, so the first one to
    # clear the threshold is the most symmetric consistent verdict
    best_label, best_score = "inconclusive", 0.0
    for label, _gens, _size in _candidate_groups(n):
        s = scores[label]
        if s >= threshold:
            best_label, best_score = label, s
            break
    if best_label == "full" and inversion:
        best_label = "full+inversion"
    return SymmetryVerdict(
        label=best_label,
        score=best_score,
        inversion_symmetric=inversion,
        inversion_score=inv_score,
        occupancy=tuple(tuple(sorted(o)) for o in occ),
        candidate_scores=scores,
    )


# ---------------------------------------------------------------------------
# density estimation
# ---------------------------------------------------------------------------


def histogram_density(orbit: Orbit, bins: int = 32) -> dict[tuple, float]:
    """Normalized occupancy over the regular barycentric grid."""
    if orbit.space != "simplex":
        raise ParameterOutOfRange("density needs a simplex orbit")
    tail = orbit.tail
    idx = np.clip((tail * bins).astype(int), 0, bins - 1)
    weights: dict[tuple, float] = {}
    unit = 1.0 / idx.shape[0]
    for row in idx:
        key = tuple(int(c) for c in row)
        weights[key] = weights.get(key, 0.0) + unit
    return weights


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def _header_lines(orbit: Orbit) -> list[str]:
    from . import __version__

    params = {key: str(val) for key, val in orbit.params.items() if key != "spec"}
    return [
        f"# ergobreak {__version__}",
        f"# space={orbit.space} seed={orbit.seed} burn_in={orbit.burn_in} "
        f"events={orbit.events} params={params}",
    ]


def write_orbit_csv(path, orbit: Orbit) -> None:
    """Wide-form trajectory: t,u1..uN (or t,x for interval orbits)."""
    samples = orbit.samples
    if samples.ndim == 1:
        samples = samples[:, None]
    with open(path, "w") as fh:
        for line in _header_lines(orbit):
            fh.write(line + "\n")
        fh.write("t," + ",".join(f"u{i+1}" for i in range(samples.shape[1])) + "\n")
        for t, row in enumerate(samples):
            fh.write(str(t) + "," + ",".join(repr(v) for v in row) + "\n")


def write_polar_csv(path, orbit: Orbit) -> None:
    rows = polar_plot_data(orbit)
    with open(path, "w") as fh:
        for line in _header_lines(orbit):
            fh.write(line + "\n")
        fh.write("t,i,angle,radius\n")
        for t, i, angle, radius in rows:
            fh.write(f"{int(t)},{int(i)},{angle!r},{radius!r}\n")
