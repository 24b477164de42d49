"""Construction and exact certification of asymmetric invariant polytope
unions.

The mechanism: pick a frame of d+1 rational points spanning a small simplex
C wedged between a corner atom and its middle neighbour, with strictly
increasing (and rationally related) distances from the frame's fixed point;
define an affine map on C that cycles the frame directions while stretching
by a rate just above 1. For small enough rate, C together with its image is
invariant and disjoint from its mirror under the simplex inversion. Every
claim is emitted as an exact transcript that a separate verifier replays.

Two map routes share the certification path: the "cyclic" route builds the
map from the frame (any d >= 2), and the "planar" route (d = 2 only) uses
the reduced coupled map itself on the middle triangle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .ratgeom import (
    AffineMapExact,
    Polytope,
    SimplexT,
    Vec,
    affine_coordinates,
    affine_dim,
    barycentric,
    disjoint_closed,
    hull_halfspaces,
    intersect_vertices,
    is_perfect_square,
    mat_inverse,
    mat_mul,
    mat_vec,
    rat_to_str,
    rational_sqrt_floor,
    vec_add,
    vec_dot,
    vec_norm_sq,
    vec_scale,
    vec_sub,
)
from .simplexmaps import (
    AtomId,
    SimplexMapParams,
    atom_halfspaces,
    atom_of,
    atom_polytope,
    atom_vertices,
    bipyramid_polytope,
    feat2d_data,
    restriction_A,
    shared_facet_vertices,
    sigma_affine,
    simplex_vertex,
)

log = logging.getLogger(__name__)


class ConstructionFailed(RuntimeError):
    pass


class RateAboveBound(ValueError):
    pass


class NotAsymmetric(ValueError):
    pass


class NoPassingA(RuntimeError):
    pass


@dataclass(frozen=True)
class PointFrame:
    """Frame points p_0..p_d with rational squared-length data.

    ``ratios[n]`` is |p0->p_{n+1}| / |p0->p_1| (so ratios[0] = 1); all are
    rational by construction, which keeps the cyclic map's matrix rational.
    """

    d: int
    k: int
    points: tuple[Vec, ...]
    ratios: tuple[Fraction, ...]
    lengths_sq: tuple[Fraction, ...]
    vk_len_sq: Fraction


def verify_frame(frame: PointFrame) -> None:
    """Exact recheck of every frame invariant; raises on violation."""
    d, k = frame.d, frame.k
    pts = frame.points
    if len(pts) != d + 1:
        raise ConstructionFailed("frame must have d+1 points")
    p0 = pts[0]
    if not all(vec_dot(n, p0) < c for n, c in atom_halfspaces(AtomId("B", k), d)):
        raise ConstructionFailed("base point is not interior to the middle atom")
    facet = shared_facet_vertices(k, d)
    for p in pts[1:]:
        coords = affine_coordinates(facet, p)
        if coords is None or any(c <= 0 for c in coords):
            raise ConstructionFailed(f"{p} is not interior to the shared facet")
    vk = simplex_vertex(d, k)
    line = affine_coordinates((p0, vk), pts[1])
    if line is None or not (0 < line[1] < 1):
        raise ConstructionFailed("second point must lie between base and corner")
    lsq = [vec_norm_sq(vec_sub(p, p0)) for p in pts[1:]]
    if tuple(lsq) != frame.lengths_sq:
        raise ConstructionFailed("stored squared lengths are stale")
    if frame.vk_len_sq != vec_norm_sq(vec_sub(vk, p0)):
        raise ConstructionFailed("stored corner distance is stale")
    chain = list(lsq) + [frame.vk_len_sq]
    if any(a >= b for a, b in zip(chain, chain[1:])):
        raise ConstructionFailed("squared-length chain is not strictly increasing")
    if frame.ratios[0] != 1 or len(frame.ratios) != d:
        raise ConstructionFailed("ratios must start at 1 and have length d")
    for t, sq in zip(frame.ratios, lsq):
        if t * t * lsq[0] != sq:
            raise ConstructionFailed("length ratios are not exactly rational")
    if affine_dim(pts) != d:
        raise ConstructionFailed("frame points are affinely dependent")


def _exit_parameter(origin: Vec, direction: Vec, hrep) -> Fraction:
    """Largest t with origin + t*direction inside the closed H-polytope."""
    bound = None
    for normal, offset in hrep:
        slope = vec_dot(normal, direction)
        if slope > 0:
            t = (offset - vec_dot(normal, origin)) / slope
            bound = t if bound is None else min(bound, t)
    if bound is None:
        raise ConstructionFailed("ray never exits the atom; geometry corrupt")
    return bound


def _ratio_point(p0: Vec, p1: Vec, chord: Vec, window, facet):
    """Rational point p1 + s*w whose distance ratio to |p0 p1| is a rational
    number inside ``window``, staying interior to the facet.

    Sweeps the rational-chord parametrization of the conic
    |p1 + s w - p0|^2 = (t |p0 p1|)^2 through its known point (s,t) = (0,1):
    for slope m, s(m) = (2 m L1 - 2 B)/(C - m^2 L1) with B = <p1-p0, w>,
    C = |w|^2, L1 = |p1-p0|^2 and t = 1 + m s, all rational. Moving m from
    B/L1 toward the matching pole sqrt(C/L1), t grows monotonically from 1,
    so bisection lands in any window; both chord orientations are tried in
    case the window lies past the facet boundary on one side.
    """
    lo, hi = window
    l1 = vec_norm_sq(vec_sub(p1, p0))
    b = vec_dot(vec_sub(p1, p0), chord)
    c = vec_norm_sq(chord)
    m0 = b / l1
    for side in (1, -1):
        # the ratio equals 1 at the sweep start and grows monotonically
        # toward the pole of the chord parametrization on this side
        start = max(m0, Fraction(0)) if side > 0 else min(m0, Fraction(0))

        def candidate(mu: Fraction):
            m = start + side * mu
            den = c - m * m * l1
            if den <= 0:
                return None
            s = (2 * m * l1 - 2 * b) / den
            point = vec_add(p1, vec_scale(s, chord))
            return 1 + m * s, point

        mu_hi = Fraction(1, 16)
        for _ in range(80):
            got = candidate(mu_hi)
            if got is None or got[0] > hi:
                break
            mu_hi *= 2
        mu_lo = Fraction(0)
        found = None
        for _ in range(200):
            mu = (mu_lo + mu_hi) / 2
            got = candidate(mu)
            if got is None:
                mu_hi = mu
                continue
            t, point = got
            if t <= lo:
                mu_lo = mu
                continue
            if t > hi:
                mu_hi = mu
                continue
            coords = affine_coordinates(facet, point)
            if coords is not None and all(w > 0 for w in coords):
                found = (t, point)
                break
            # interiority fails further out along the chord; back off
            mu_hi = mu
        if found is not None:
            return found
    raise ConstructionFailed("no rational-ratio point found in the window")


def select_points(d: int, k: int) -> PointFrame:
    """Deterministic rational frame inside the middle atom.

    The first facet point is the shared facet's barycenter; the base point is
    the midpoint of the open parameter interval where the corner-to-barycenter
    ray crosses the middle atom. The remaining facet points sit on chords
    toward the facet's vertices, placed so that the distance ratios to the
    base point are exact rationals forming a strictly increasing chain below
    the corner distance.
    """
    if d < 2:
        raise ConstructionFailed("the construction needs dimension at least 2")
    if not 0 <= k <= d:
        raise ConstructionFailed(f"atom index {k} out of range for dimension {d}")
    facet = shared_facet_vertices(k, d)
    p1 = vec_scale(Fraction(1, d), facet[0])
    for w in facet[1:]:
        p1 = vec_add(p1, vec_scale(Fraction(1, d), w))
    vk = simplex_vertex(d, k)
    ray = vec_sub(p1, vk)
    t_exit = _exit_parameter(vk, ray, atom_halfspaces(AtomId("B", k), d))
    if t_exit <= 1:
        raise ConstructionFailed("corner ray does not enter the middle atom")
    p0 = vec_add(vk, vec_scale((1 + t_exit) / 2, ray))
    l1sq = vec_norm_sq(vec_sub(p1, p0))
    vksq = vec_norm_sq(vec_sub(vk, p0))
    # disjoint ratio windows below the corner-distance bound
    gamma = Fraction(1, 8)
    while (1 + (2 * d - 2) * gamma) ** 2 * l1sq >= vksq:
        gamma /= 2
    points = [p0, p1]
    ratios = [Fraction(1)]
    lengths_sq = [l1sq]
    for n in range(2, d + 1):
        direction = vec_sub(facet[n - 2], p1)
        window = (1 + (2 * n - 3) * gamma, 1 + (2 * n - 2) * gamma)
        t, point = _ratio_point(p0, p1, direction, window, facet)
        points.append(point)
        ratios.append(t)
        lengths_sq.append(t * t * l1sq)
    frame = PointFrame(d, k, tuple(points), tuple(ratios), tuple(lengths_sq), vksq)
    verify_frame(frame)
    return frame


def a_prime_bound(frame: PointFrame) -> Fraction:
    """Largest certified stretch rate: its square is the minimum of the
    successive squared-length ratios (corner distance included). Exact when
    that minimum is a perfect square, else a tight rational floor."""
    chain = list(frame.lengths_sq) + [frame.vk_len_sq]
    min_ratio = min(b / a for a, b in zip(chain, chain[1:]))
    refine = 0
    while True:
        root = rational_sqrt_floor(min_ratio, refine)
        if root > 1:
            break
        refine += 8
        if refine > 512:
            raise ConstructionFailed("length chain is not strictly expanding")
    assert root * root <= min_ratio
    if is_perfect_square(min_ratio):
        assert root * root == min_ratio
    return root


@dataclass(frozen=True)
class HMapSpec:
    """A certified-map candidate: the simplex C, its affine rule, and the
    corner rule, with the off-C contraction factor for global evaluation."""

    d: int
    k: int
    a: Fraction
    frame_points: tuple[Vec, ...]
    map_on_C: AffineMapExact
    map_on_A: AffineMapExact
    lam: Fraction
    kind: str  # "cyclic" or "planar"
    a_prime: Optional[Fraction] = None

    @property
    def eps_a(self) -> Fraction:
        """Expansion parameter making the corner rate equal a."""
        return 1 - self.a / 2


def build_H(frame: PointFrame, a: Fraction, lam: Fraction = Fraction(1, 4)) -> HMapSpec:
    """Affine map on the frame simplex cycling p0->p_n onto p0->p_{n+1}
    scaled by a times the (rational) length ratio; the last direction wraps
    onto the first. Linear part satisfies L^d = a^d Id exactly."""
    a = Fraction(a)
    bound = a_prime_bound(frame)
    if not 1 < a <= bound:
        raise RateAboveBound(f"a={a} outside (1, {bound}]")
    d = frame.d
    p0 = frame.points[0]
    edges = [vec_sub(p, p0) for p in frame.points[1:]]
    images = []
    for n in range(1, d):
        scale = a * frame.ratios[n - 1] / frame.ratios[n]
        images.append(vec_scale(scale, edges[n]))
    images.append(vec_scale(a * frame.ratios[d - 1], edges[0]))
    basis = tuple(tuple(edges[j][i] for j in range(d)) for i in range(d))
    image_mat = tuple(tuple(images[j][i] for j in range(d)) for i in range(d))
    inv = mat_inverse(basis)
    if inv is None:
        raise ConstructionFailed("frame directions are linearly dependent")
    linear = mat_mul(image_mat, inv)
    offset = vec_sub(p0, mat_vec(linear, p0))
    map_on_C = AffineMapExact(linear, offset)
    eps_a = 1 - a / 2
    params = SimplexMapParams.uniform(d, eps_a)
    return HMapSpec(
        d=d,
        k=frame.k,
        a=a,
        frame_points=frame.points,
        map_on_C=map_on_C,
        map_on_A=restriction_A(params, frame.k),
        lam=Fraction(lam),
        kind="cyclic",
        a_prime=bound,
    )


def g2_spec(params: SimplexMapParams) -> HMapSpec:
    """The planar route: certify the reduced coupled map itself on the d=2
    middle triangle, using the fixed-point frame of the swap basis."""
    frame = feat2d_data(params)
    return HMapSpec(
        d=2,
        k=2,
        a=params.beta,
        frame_points=(frame.p0, frame.p1, frame.p2),
        map_on_C=frame.map_on_B,
        map_on_A=restriction_A(params, 2),
        lam=Fraction(1, 4),
        kind="planar",
    )


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------


@dataclass
class IupCertificate:
    """Exact, re-checkable transcript of the invariance and asymmetry checks.

    Transcript values are stored as "p/q" strings so the independent
    verifier can compare its replay bit-for-bit.
    """

    d: int
    k: int
    a: Fraction
    kind: str
    frame: tuple[Vec, ...]
    maps: dict
    hc_vertices: tuple[Vec, ...]
    transcripts: dict = field(default_factory=dict)
    verdict: str = "pass"
    failure: Optional[dict] = None


def _bary_transcript(simplex: SimplexT, pts, strict=False):
    rows = []
    ok = True
    for p in pts:
        lam = barycentric(simplex, p)
        good = all(c > 0 for c in lam) if strict else all(c >= 0 for c in lam)
        ok = ok and good
        rows.append(
            {
                "point": [rat_to_str(c) for c in p],
                "weights": [rat_to_str(c) for c in lam],
                "inside": good,
            }
        )
    return ok, rows


def _facet_transcript(hrep, pts):
    rows = []
    ok = True
    for p in pts:
        vals = [rat_to_str(offset - vec_dot(normal, p)) for normal, offset in hrep]
        good = all(vec_dot(normal, p) <= offset for normal, offset in hrep)
        ok = ok and good
        rows.append({"point": [rat_to_str(c) for c in p], "slacks": vals, "inside": good})
    return ok, rows


def verify_prop2(spec: HMapSpec) -> IupCertificate:
    """Exact invariance check of C together with its image.

    Steps: image-vertex location, containment of the image in the corner/
    middle bipyramid, pullback of the middle part into C, the exact vertex
    set of the corner part, and containment of its image in the closed image
    simplex. A failed step is a result (recorded with its witness), not an
    exception.
    """
    d, k = spec.d, spec.k
    c_simplex = SimplexT(spec.frame_points)
    hc_vertices = tuple(spec.map_on_C(p) for p in spec.frame_points)
    hc_simplex = SimplexT(hc_vertices)
    cert = IupCertificate(
        d=d,
        k=k,
        a=spec.a,
        kind=spec.kind,
        frame=spec.frame_points,
        maps={
            "on_C": {
                "linear": [[rat_to_str(v) for v in row] for row in spec.map_on_C.linear],
                "offset": [rat_to_str(v) for v in spec.map_on_C.offset],
            },
            "on_A": {
                "linear": [[rat_to_str(v) for v in row] for row in spec.map_on_A.linear],
                "offset": [rat_to_str(v) for v in spec.map_on_A.offset],
            },
            "lam": rat_to_str(spec.lam),
        },
        hc_vertices=hc_vertices,
    )

    def fail(step, detail):
        cert.verdict = "fail"
        cert.failure = {"step": step, **detail}
        return cert

    b_poly = atom_polytope(AtomId("B", k), d)
    a_poly = atom_polytope(AtomId("A", k), d)

    ok, rows = _facet_transcript(b_poly.hrep, spec.frame_points)
    cert.transcripts["frame_in_middle_atom"] = rows
    if not ok:
        return fail("frame_in_middle_atom", {"detail": "frame leaves the middle atom"})

    ok, rows = _facet_transcript(b_poly.hrep, hc_vertices[:d])
    cert.transcripts["image_heads_in_middle_atom"] = rows
    if not ok:
        return fail("image_heads_in_middle_atom", {"detail": "early image vertices leave"})

    ok, rows = _facet_transcript(a_poly.hrep, hc_vertices[d:])
    cert.transcripts["image_tail_in_corner_atom"] = rows
    if not ok:
        return fail("image_tail_in_corner_atom", {"detail": "last image vertex leaves"})

    bipyr = bipyramid_polytope(k, d)
    ok, rows = _facet_transcript(bipyr.hrep, hc_vertices)
    cert.transcripts["image_in_bipyramid"] = rows
    if not ok:
        return fail("image_in_bipyramid", {"detail": "image escapes the convex closure"})

    hc_poly = Polytope(d, hc_vertices, hull_halfspaces(hc_vertices, d))
    middle_part = intersect_vertices(hc_poly, b_poly)
    ok, rows = _bary_transcript(c_simplex, middle_part)
    cert.transcripts["middle_part_in_C"] = {
        "vertices": [[rat_to_str(c) for c in v] for v in middle_part],
        "weights": rows,
    }
    if not ok:
        return fail("middle_part_in_C", {"detail": "image's middle part leaves C"})

    corner_part = intersect_vertices(hc_poly, a_poly)
    mapped = [spec.map_on_A(v) for v in corner_part]
    ok, rows = _bary_transcript(hc_simplex, mapped)
    cert.transcripts["corner_part_maps_into_image"] = {
        "vertices": [[rat_to_str(c) for c in v] for v in corner_part],
        "images": rows,
    }
    if not ok:
        bad = next(r for r in rows if not r["inside"])
        return fail(
            "corner_part_maps_into_image",
            {"detail": "corner-part image vertex escapes the image simplex", "vertex": bad["point"]},
        )
    return cert


def verify_asymmetry(spec: HMapSpec, cert: IupCertificate) -> IupCertificate:
    """Exact disjointness of {C, image} from their mirror images.

    Pairs whose closures merely touch along a lower-dimensional face are
    reported as touching with the shared face listed; the open unions are
    then still disjoint, which is what the asymmetric-invariance notion
    requires. A full-dimensional overlap fails the certificate.
    """
    d, k = spec.d, spec.k
    if k == d - k:
        raise NotAsymmetric(f"atom {k} is fixed by the inversion for d={d}")
    sigma = sigma_affine(d)
    bodies = {
        "C": Polytope(d, spec.frame_points, hull_halfspaces(spec.frame_points, d)),
        "HC": Polytope(d, cert.hc_vertices, hull_halfspaces(cert.hc_vertices, d)),
    }
    mirrors = {
        name: Polytope(
            d,
            tuple(sigma(v) for v in body.vrep),
            hull_halfspaces([sigma(v) for v in body.vrep], d),
        )
        for name, body in bodies.items()
    }
    rows = {}
    for name, body in bodies.items():
        for mname, mirror in mirrors.items():
            key = f"{name}|sigma({mname})"
            sep = disjoint_closed(body, mirror)
            if sep.disjoint:
                rows[key] = {
                    "status": "disjoint",
                    "certificate": sep.kind,
                    "halfspace": None
                    if sep.halfspace is None
                    else {
                        "normal": [rat_to_str(c) for c in sep.halfspace[0]],
                        "offset": rat_to_str(sep.halfspace[1]),
                    },
                    "farkas": None
                    if sep.combination is None
                    else [rat_to_str(c) for c in sep.combination],
                }
                continue
            common = intersect_vertices(body, mirror)
            if affine_dim(common) < d:
                rows[key] = {
                    "status": "touching",
                    "shared_face": [[rat_to_str(c) for c in v] for v in common],
                }
                continue
            rows[key] = {
                "status": "overlap",
                "witness": [rat_to_str(c) for c in common[0]],
            }
            cert.transcripts["asymmetry"] = rows
            cert.verdict = "fail"
            cert.failure = {"step": "asymmetry", "pair": key, "witness": rows[key]["witness"]}
            return cert
    cert.transcripts["asymmetry"] = rows
    return cert


def linear_power_check(spec: HMapSpec) -> bool:
    """L^d equals a^d times the identity, as an exact matrix identity."""
    power = spec.map_on_C.linear_power(spec.d)
    scale = spec.a**spec.d
    expected = tuple(
        tuple(scale if i == j else Fraction(0) for j in range(spec.d))
        for i in range(spec.d)
    )
    return power == expected


def certify(spec: HMapSpec) -> IupCertificate:
    """Full certificate: invariance, asymmetry, and the cycling-power law."""
    cert = verify_prop2(spec)
    cert.transcripts["linear_power"] = {"holds": linear_power_check(spec)}
    if not cert.transcripts["linear_power"]["holds"]:
        cert.verdict = "fail"
        cert.failure = cert.failure or {"step": "linear_power"}
        return cert
    if cert.verdict != "pass":
        return cert
    return verify_asymmetry(spec, cert)


def search_max_a(
    frame: PointFrame, precision: Fraction = Fraction(1, 64), lam: Fraction = Fraction(1, 4)
):
    """Largest sampled rate whose full certificate passes.

    Bisects (1, a'] on the certificate outcome; monotonicity is not assumed,
    so the result is the best passing sample with bracket width below
    ``precision``, together with its certificate.
    """
    precision = Fraction(precision)
    bound = a_prime_bound(frame)
    best = None

    def probe(a):
        nonlocal best
        cert = certify(build_H(frame, a, lam))
        if cert.verdict == "pass" and (best is None or a > best[0]):
            best = (a, cert)
        return cert.verdict == "pass"

    def snapped_mid(lo, hi):
        mid = (lo + hi) / 2
        for bits in (10, 14, 18, 24, 32, 48, 64, 96):
            cand = mid.limit_denominator(1 << bits)
            if lo < cand < hi:
                return cand
        return mid

    if probe(bound):
        return best
    lo, hi = Fraction(1), bound
    while hi - lo > precision:
        mid = snapped_mid(lo, hi)
        if probe(mid):
            lo = mid
        else:
            hi = mid
    if best is None:
        tiny = 1 + precision
        if tiny < bound and probe(tiny):
            return best
        raise NoPassingA(f"no certified rate above 1 within precision {precision}")
    return best


# ---------------------------------------------------------------------------
# global evaluation (for orbits and sampling)
# ---------------------------------------------------------------------------


def h_global_step(spec: HMapSpec, x: Vec, pipeline_step) -> Vec:
    """Evaluate the certified map anywhere on the simplex.

    On C and its mirror: the cyclic rule (conjugated by the inversion); on
    the corner atoms: the corner rule of the matching index; on the rest of
    the two middle atoms: contraction toward the frame base point; elsewhere
    the map coincides with the reduced coupled map at the matching
    expansion parameter, evaluated by ``pipeline_step(x)``.
    """
    d, k = spec.d, spec.k
    sigma = sigma_affine(d)
    c_simplex = SimplexT(spec.frame_points)
    lam = barycentric(c_simplex, x)
    if all(c >= 0 for c in lam):
        return spec.map_on_C(x)
    sx = sigma(x)
    lam = barycentric(c_simplex, sx)
    if all(c >= 0 for c in lam):
        return sigma(spec.map_on_C(sx))
    atom = atom_of(x, d)
    params = SimplexMapParams.uniform(d, spec.eps_a)
    if atom is not None and atom.kind == "A":
        return restriction_A(params, atom.k)(x)
    if atom is not None and atom.kind == "B" and atom.k in (k, d - k):
        # contract toward the frame base (or its mirror) to keep the
        # leftover middle region inside the simplex, equivariantly
        center = spec.frame_points[0] if atom.k == k else sigma(spec.frame_points[0])
        return vec_add(center, vec_scale(spec.lam, vec_sub(x, center)))
    return pipeline_step(x)
