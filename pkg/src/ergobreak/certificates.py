"""Certificate files and their independent verification.

A certificate file carries everything needed to replay the invariance and
asymmetry checks: the frame, the two affine rules, the image vertices and
per-step transcripts with exact "p/q" values. The verifier below is a
separate code path from the builder: it re-derives atom geometry from the
atom definitions, recomputes every weight and slack with the base rational
primitives, and compares against the stored strings bit for bit. A single
tampered byte flips the verdict.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .ratgeom import (
    AffineMapExact,
    SimplexT,
    Vec,
    affine_dim,
    barycentric,
    enumerate_vertices,
    hull_halfspaces,
    rat_from_str,
    rat_to_str,
    unit_vec,
    vec_add,
    vec_dot,
    vec_scale,
    zero_vec,
)
from .simplexmaps import AtomId, atom_halfspaces, bipyramid_polytope
from .asiup import IupCertificate

SCHEMA_FIELDS = ("d", "k", "a", "kind", "frame", "maps", "hc_vertices", "transcripts", "verdict")


def certificate_to_dict(cert: IupCertificate, parameters: Optional[dict] = None) -> dict:
    data = {
        "d": cert.d,
        "k": cert.k,
        "a": rat_to_str(cert.a),
        "kind": cert.kind,
        "frame": [[rat_to_str(c) for c in p] for p in cert.frame],
        "maps": cert.maps,
        "hc_vertices": [[rat_to_str(c) for c in p] for p in cert.hc_vertices],
        "transcripts": cert.transcripts,
        "verdict": cert.verdict,
    }
    if cert.failure is not None:
        data["failure"] = cert.failure
    data["meta"] = {"tool": "ergobreak", "version": __version__, "parameters": parameters or {}}
    return data


def write_certificate(path, cert: IupCertificate, parameters: Optional[dict] = None) -> None:
    with open(path, "w") as fh:
        json.dump(certificate_to_dict(cert, parameters), fh, indent=1)
        fh.write("\n")


def _vec(strs: Sequence[str]) -> Vec:
    return tuple(rat_from_str(s) for s in strs)


def _map_from_json(obj) -> AffineMapExact:
    linear = tuple(tuple(rat_from_str(v) for v in row) for row in obj["linear"])
    offset = tuple(rat_from_str(v) for v in obj["offset"])
    return AffineMapExact(linear, offset)


def _sigma_point(x: Vec) -> Vec:
    d = len(x)
    out = [Fraction(0)] * d
    for i in range(1, d):
        out[i - 1] = x[d - 1 - i]
    out[d - 1] = 1 - sum(x)
    return tuple(out)


class ReplayMismatch(Exception):
    """First divergence between the file and its exact replay."""


def _require(cond: bool, reason: str):
    if not cond:
        raise ReplayMismatch(reason)


def _replay_facet_rows(rows, expected_points, hrep, label):
    _require(len(rows) == len(expected_points), f"{label}: row count differs")
    ok = True
    for row, point in zip(rows, expected_points):
        _require(_vec(row["point"]) == point, f"{label}: stored point differs")
        slacks = [rat_to_str(offset - vec_dot(normal, point)) for normal, offset in hrep]
        _require(slacks == row["slacks"], f"{label}: slack values differ")
        inside = all(offset - vec_dot(normal, point) >= 0 for normal, offset in hrep)
        _require(inside == row["inside"], f"{label}: inside flag differs")
        ok = ok and inside
    return ok


def _replay_bary_rows(rows, expected_points, simplex, label):
    _require(len(rows) == len(expected_points), f"{label}: row count differs")
    ok = True
    for row, point in zip(rows, expected_points):
        _require(_vec(row["point"]) == point, f"{label}: stored point differs")
        weights = barycentric(simplex, point)
        _require(
            [rat_to_str(w) for w in weights] == row["weights"],
            f"{label}: barycentric weights differ",
        )
        inside = all(w >= 0 for w in weights)
        _require(inside == row["inside"], f"{label}: inside flag differs")
        ok = ok and inside
    return ok


def verify_certificate(data: dict) -> tuple[bool, str]:
    """Re-check a certificate dictionary from scratch.

    Returns (True, "verified") only if every transcript replays bit for bit
    and the stored verdict matches the recomputed one. The first divergence
    is reported in the reason string.
    """
    try:
        return _verify(data)
    except ReplayMismatch as exc:
        return False, str(exc)
    except Exception as exc:  # malformed files land here
        return False, f"malformed certificate: {exc!r}"


def _verify(data: dict) -> tuple[bool, str]:
    d = int(data["d"])
    k = int(data["k"])
    a = rat_from_str(data["a"])
    kind = data["kind"]
    frame = tuple(_vec(p) for p in data["frame"])
    hc = tuple(_vec(p) for p in data["hc_vertices"])
    on_c = _map_from_json(data["maps"]["on_C"])
    on_a = _map_from_json(data["maps"]["on_A"])
    transcripts = data["transcripts"]
    _require(len(frame) == d + 1, "frame must hold d+1 points")
    _require(a > 1, "stretch rate must exceed 1")
    # corner rule must be the homothety of rate a fixing the corner vertex
    expected_lin = tuple(vec_scale(a, unit_vec(d, i)) for i in range(d))
    expected_off = zero_vec(d) if k == 0 else vec_scale(1 - a, unit_vec(d, k - 1))
    _require(on_a.linear == expected_lin, "corner rule has wrong linear part")
    _require(on_a.offset == expected_off, "corner rule has wrong offset")
    _require(tuple(on_c(p) for p in frame) == hc, "image vertices do not match the map")

    b_hrep = atom_halfspaces(AtomId("B", k), d)
    a_hrep = atom_halfspaces(AtomId("A", k), d)
    flags = {}
    flags["frame_in_middle_atom"] = _replay_facet_rows(
        transcripts["frame_in_middle_atom"], frame, b_hrep, "frame_in_middle_atom"
    )
    flags["image_heads_in_middle_atom"] = _replay_facet_rows(
        transcripts["image_heads_in_middle_atom"], hc[:d], b_hrep, "image_heads_in_middle_atom"
    )
    flags["image_tail_in_corner_atom"] = _replay_facet_rows(
        transcripts["image_tail_in_corner_atom"], hc[d:], a_hrep, "image_tail_in_corner_atom"
    )
    bipyr = bipyramid_polytope(k, d)
    flags["image_in_bipyramid"] = _replay_facet_rows(
        transcripts["image_in_bipyramid"], hc, bipyr.hrep, "image_in_bipyramid"
    )

    c_simplex = SimplexT(frame)
    hc_simplex = SimplexT(hc)
    hc_hrep = hull_halfspaces(hc, d)
    # a passing certificate must carry the complete transcript chain; failed
    # ones stop at their first violated step
    if data["verdict"] == "pass":
        for name in ("middle_part_in_C", "corner_part_maps_into_image", "linear_power", "asymmetry"):
            _require(name in transcripts, f"passing certificate lacks {name}")
    if "middle_part_in_C" in transcripts:
        block = transcripts["middle_part_in_C"]
        stored = [_vec(v) for v in block["vertices"]]
        recomputed = enumerate_vertices(hc_hrep + b_hrep, d)
        _require(set(stored) == set(recomputed), "middle_part_in_C: vertex set differs")
        flags["middle_part_in_C"] = _replay_bary_rows(
            block["weights"], stored, c_simplex, "middle_part_in_C"
        )
    if "corner_part_maps_into_image" in transcripts:
        block = transcripts["corner_part_maps_into_image"]
        stored = [_vec(v) for v in block["vertices"]]
        recomputed = enumerate_vertices(hc_hrep + a_hrep, d)
        _require(set(stored) == set(recomputed), "corner_part: vertex set differs")
        mapped = [on_a(v) for v in stored]
        flags["corner_part_maps_into_image"] = _replay_bary_rows(
            block["images"], mapped, hc_simplex, "corner_part_maps_into_image"
        )
    if "linear_power" in transcripts:
        power = on_c.linear_power(d)
        scale = a**d
        holds = power == tuple(
            tuple(scale if i == j else Fraction(0) for j in range(d)) for i in range(d)
        )
        _require(
            bool(transcripts["linear_power"]["holds"]) == holds,
            "linear_power: stored flag differs from replay",
        )
        flags["linear_power"] = holds

    asym_ok = True
    if "asymmetry" in transcripts:
        bodies = {"C": frame, "HC": hc}
        hreps = {"C": hull_halfspaces(frame, d), "HC": hc_hrep}
        for name, verts in bodies.items():
            for mname, mverts in bodies.items():
                key = f"{name}|sigma({mname})"
                row = transcripts["asymmetry"].get(key)
                _require(row is not None, f"asymmetry: missing pair {key}")
                mirror = [_sigma_point(v) for v in mverts]
                mirror_hrep = hull_halfspaces(mirror, d)
                common = enumerate_vertices(hreps[name] + mirror_hrep, d)
                if row["status"] == "disjoint":
                    _require(not common, f"asymmetry {key}: bodies actually meet")
                    if row.get("halfspace"):
                        normal = _vec(row["halfspace"]["normal"])
                        offset = rat_from_str(row["halfspace"]["offset"])
                        inside_one = all(vec_dot(normal, v) <= offset for v in verts)
                        inside_mirror = all(vec_dot(normal, v) <= offset for v in mirror)
                        outside_one = all(vec_dot(normal, v) > offset for v in verts)
                        outside_mirror = all(vec_dot(normal, v) > offset for v in mirror)
                        _require(
                            (inside_one and outside_mirror) or (inside_mirror and outside_one),
                            f"asymmetry {key}: stored half-space does not separate",
                        )
                    elif row.get("farkas"):
                        combined = hreps[name] + mirror_hrep
                        weights = [rat_from_str(w) for w in row["farkas"]]
                        _require(
                            len(weights) == len(combined) and all(w >= 0 for w in weights),
                            f"asymmetry {key}: malformed multipliers",
                        )
                        normal = zero_vec(d)
                        offset = Fraction(0)
                        for w, (n, c) in zip(weights, combined):
                            normal = vec_add(normal, vec_scale(w, n))
                            offset += w * c
                        _require(
                            normal == zero_vec(d) and offset < 0,
                            f"asymmetry {key}: multipliers are not a contradiction",
                        )
                    else:
                        raise ReplayMismatch(f"asymmetry {key}: no certificate recorded")
                elif row["status"] == "touching":
                    stored_face = [_vec(v) for v in row["shared_face"]]
                    _require(
                        set(stored_face) == set(common),
                        f"asymmetry {key}: shared face differs",
                    )
                    _require(
                        affine_dim(common) < d,
                        f"asymmetry {key}: claimed touching is full-dimensional",
                    )
                elif row["status"] == "overlap":
                    _require(
                        affine_dim(common) == d,
                        f"asymmetry {key}: claimed overlap is not full-dimensional",
                    )
                    asym_ok = False
                else:
                    raise ReplayMismatch(f"asymmetry {key}: unknown status")

    replayed_verdict = "pass" if all(flags.values()) and asym_ok else "fail"
    _require(
        data["verdict"] == replayed_verdict,
        f"stored verdict {data['verdict']!r} but replay says {replayed_verdict!r}",
    )
    return True, f"verified: verdict {replayed_verdict}"


def load_certificate(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
