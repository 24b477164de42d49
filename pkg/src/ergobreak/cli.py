"""Command-line interface.

One executable with a verb per subsystem: orbit simulation, interval-map
classification, reduction-pipeline debugging, atom tables, certificate
construction/search, independent certificate verification, and plot-data
emission. Exit codes: 0 success or verified pass, 2 verification failure
(with transcript pointer), 1 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .asiup import (
    NoPassingA,
    RateAboveBound,
    build_H,
    certify,
    g2_spec,
    search_max_a,
    select_points,
)
from .certificates import (
    certificate_to_dict,
    load_certificate,
    verify_certificate,
    write_certificate,
)
from .dynlab import (
    classify_symmetry,
    histogram_density,
    run_orbit,
    write_orbit_csv,
    write_polar_csv,
)
from .ratgeom import rat_from_str, rat_to_str
from .reduction import (
    base_map,
    lift_P,
    ordering_permutation,
    phi_conjugate,
    projected_step,
)
from .simplexmaps import (
    AtomId,
    SimplexMapParams,
    atom_vertices,
    b_atom_validity,
    restriction_A,
    restriction_B,
)
from .torusmaps import (
    Distribution,
    LorenzParams,
    apply_permutation,
    coupled_step,
    lorenz_invariant_intervals,
    reduce_torus,
)

USAGE_ERROR, VERIFY_FAILURE = 1, 2


class CliParser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _rat(text: str) -> Fraction:
    try:
        return rat_from_str(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r} ({exc})")


def _point(text: str):
    return tuple(_rat(part) for part in text.split(","))


def _weights(n, text):
    if text is None:
        return Distribution.uniform(n)
    return Distribution(_point(text))


def _meta(args: argparse.Namespace) -> dict:
    echo = {k: str(v) for k, v in vars(args).items() if k != "func" and v is not None}
    return {"tool": "ergobreak", "version": __version__, "parameters": echo}


def _emit_json(payload: dict, out):
    text = json.dumps(payload, indent=1)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_simulate_torus(args):
    rho = _weights(args.n, args.rho)
    orbit = run_orbit(
        "torus",
        {"n": args.n, "eps": float(args.eps), "rho": rho},
        steps=args.steps,
        burn_in=args.burn_in,
        seed=args.seed,
    )
    write_orbit_csv(args.out, orbit)
    print(f"wrote {args.steps + 1} torus samples to {args.out} (events={orbit.events})")
    return 0


def cmd_lorenz(args):
    params = LorenzParams(args.a, args.xd)
    if args.invariant_intervals:
        report = lorenz_invariant_intervals(params)
        payload = {
            "regime": report.regime,
            "intervals": [[rat_to_str(lo), rat_to_str(hi)] for lo, hi in report.intervals],
            "transcripts": report.transcripts,
            "meta": _meta(args),
        }
        _emit_json(payload, args.out)
        return 0
    orbit = run_orbit(
        "lorenz",
        {"a": float(args.a), "xd": float(args.xd)},
        steps=args.steps,
        burn_in=args.burn_in,
        seed=args.seed,
    )
    write_orbit_csv(args.out or "lorenz.csv", orbit)
    print(f"wrote {args.steps + 1} interval samples to {args.out or 'lorenz.csv'}")
    return 0


def cmd_reduce_eval(args):
    u = args.point
    if len(u) != args.n:
        raise SystemExit(f"need {args.n} coordinates, got {len(u)}")
    rho = _weights(args.n, args.rho)
    eps = args.eps
    lifted = lift_P(reduce_torus(u))
    stage = args.stage
    payload = {"stage": stage, "meta": _meta(args)}
    if stage == "P":
        payload["value"] = [rat_to_str(c) for c in lifted]
    elif stage == "pi":
        perm = ordering_permutation(lifted)
        payload["perm"] = [p + 1 for p in perm]
        payload["value"] = [rat_to_str(c) for c in apply_permutation(perm, lifted)]
    elif stage == "F":
        image = lift_P(coupled_step(reduce_torus(lifted), rho, eps))
        payload["value"] = [rat_to_str(c) for c in image]
    elif stage == "proj":
        sorted_pt = apply_permutation(ordering_permutation(lifted), lifted)
        payload["value"] = [rat_to_str(c) for c in projected_step(sorted_pt, rho, eps)]
    elif stage == "phi":
        sorted_pt = apply_permutation(ordering_permutation(lifted), lifted)
        x, s = phi_conjugate(sorted_pt)
        payload["value"] = [rat_to_str(c) for c in x]
        payload["fiber"] = rat_to_str(s)
    elif stage == "G":
        sorted_pt = apply_permutation(ordering_permutation(lifted), lifted)
        image, fiber = phi_conjugate(projected_step(sorted_pt, rho, eps))
        payload["value"] = [rat_to_str(c) for c in image]
        payload["fiber"] = rat_to_str(fiber)
    _emit_json(payload, args.out)
    return 0


def cmd_atoms(args):
    d = args.d
    varrho = args.varrho if args.varrho is not None else Fraction(1, d + 1)
    eps = args.eps if args.eps is not None else Fraction(1, 4)
    params = SimplexMapParams(d, varrho, eps)
    validity = b_atom_validity(d, varrho)
    payload = {"d": d, "varrho": rat_to_str(varrho), "eps": rat_to_str(eps), "atoms": []}
    for k in range(d + 1):
        rest = restriction_A(params, k)
        payload["atoms"].append(
            {
                "atom": f"A{k}",
                "vertices": [[rat_to_str(c) for c in v] for v in atom_vertices(AtomId("A", k), d).vertices],
                "linear": [[rat_to_str(c) for c in row] for row in rest.linear],
                "offset": [rat_to_str(c) for c in rest.offset],
            }
        )
    b_range = [1] if d == 2 else range(d + 1)
    for k in b_range:
        if d < 2:
            break
        entry = {
            "atom": f"B{k}",
            "valid": bool(validity.get(k, False)),
            "vertices": [[rat_to_str(c) for c in v] for v in atom_vertices(AtomId("B", k), d).vertices],
        }
        if validity.get(k, False) and d in (2, 3):
            rest = restriction_B(params, k)
            entry["linear"] = [[rat_to_str(c) for c in row] for row in rest.linear]
            entry["offset"] = [rat_to_str(c) for c in rest.offset]
        payload["atoms"].append(entry)
    payload["meta"] = _meta(args)
    _emit_json(payload, args.out)
    return 0


def _build_spec(args):
    if args.planar:
        if args.d != 2 or args.eps is None:
            raise SystemExit("planar route needs --d 2 and --eps")
        varrho = args.varrho if args.varrho is not None else Fraction(1, 3)
        return g2_spec(SimplexMapParams(2, varrho, args.eps))
    if args.a is None:
        raise SystemExit("cyclic route needs --a (or use --planar)")
    frame = select_points(args.d, args.k)
    return build_H(frame, args.a, args.lam)


def cmd_build_asiup(args):
    try:
        spec = _build_spec(args)
    except RateAboveBound as exc:
        print(f"rate rejected: {exc}", file=sys.stderr)
        return VERIFY_FAILURE
    cert = certify(spec)
    write_certificate(args.out, cert, _meta(args)["parameters"])
    if cert.verdict == "pass":
        print(f"certificate PASS -> {args.out}")
        return 0
    print(f"certificate FAIL at step {cert.failure.get('step')} -> {args.out}")
    return VERIFY_FAILURE


def cmd_verify_cert(args):
    data = load_certificate(args.certificate)
    ok, reason = verify_certificate(data)
    if ok and data.get("verdict") == "pass":
        print(f"{args.certificate}: {reason}")
        return 0
    print(f"{args.certificate}: {'replay diverged' if not ok else 'verdict fail'}: {reason}")
    return VERIFY_FAILURE


def _search_one(task):
    d, k, precision, lam = task
    frame = select_points(d, k)
    a, cert = search_max_a(frame, precision=precision, lam=lam)
    return d, k, a, cert


def cmd_search_a(args):
    pairs = [(args.d, args.k)] if not args.pair else [tuple(map(int, p.split(","))) for p in args.pair]
    tasks = [(d, k, args.precision, args.lam) for d, k in pairs]
    results = []
    if args.jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_search_one, tasks))
    else:
        results = [_search_one(t) for t in tasks]
    failures = 0
    for d, k, a, cert in results:
        out = args.out
        if out and len(results) > 1:
            out = out.replace(".json", f".d{d}k{k}.json")
        if out:
            write_certificate(out, cert, {"d": str(d), "k": str(k), "a": rat_to_str(a)})
        print(f"d={d} k={k}: certified a = {rat_to_str(a)} ({float(a):.6f})" + (f" -> {out}" if out else ""))
        if cert.verdict != "pass":
            failures += 1
    return VERIFY_FAILURE if failures else 0


def cmd_polar(args):
    rho = _weights(args.n, args.rho)
    orbit = run_orbit(
        "torus",
        {"n": args.n, "eps": float(args.eps), "rho": rho},
        steps=args.steps,
        burn_in=args.burn_in,
        seed=args.seed,
    )
    write_polar_csv(args.out, orbit)
    print(f"wrote polar rows to {args.out}")
    return 0


def cmd_classify(args):
    rho = _weights(args.n, args.rho)
    orbit = run_orbit(
        "torus",
        {"n": args.n, "eps": float(args.eps), "rho": rho},
        steps=args.steps,
        burn_in=args.burn_in,
        seed=args.seed,
    )
    verdict = classify_symmetry(orbit, sectors=args.sectors, threshold=args.threshold)
    payload = {
        "label": verdict.label,
        "score": verdict.score,
        "inversion_symmetric": verdict.inversion_symmetric,
        "inversion_score": verdict.inversion_score,
        "meta": _meta(args),
    }
    _emit_json(payload, args.out)
    return 0


def cmd_density(args):
    orbit = run_orbit(
        "simplex-g",
        {"d": args.d, "eps": float(args.eps)},
        steps=args.steps,
        burn_in=args.burn_in,
        seed=args.seed,
    )
    weights = histogram_density(orbit, bins=args.bins)
    payload = {
        "bins": args.bins,
        "cells": {",".join(map(str, key)): value for key, value in weights.items()},
        "meta": _meta(args),
    }
    _emit_json(payload, args.out)
    return 0


def make_parser() -> CliParser:
    parser = CliParser(prog="ergobreak", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ergobreak {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def orbit_flags(p, n_flag=True):
        if n_flag:
            p.add_argument("--n", type=int, required=True, help="number of coupled units")
            p.add_argument("--rho", help="comma-separated rational weights (default uniform)")
        p.add_argument("--eps", type=_rat, required=True, help="coupling parameter, p/q or decimal")
        p.add_argument("--steps", type=int, default=100_000)
        p.add_argument("--burn-in", type=int, default=500)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("simulate-torus", help="iterate the coupled torus map to CSV")
    orbit_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate_torus)

    p = sub.add_parser("lorenz", help="interval family: orbits or exact invariant intervals")
    p.add_argument("--a", type=_rat, required=True)
    p.add_argument("--xd", type=_rat, required=True)
    p.add_argument("--invariant-intervals", action="store_true")
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--burn-in", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lorenz)

    p = sub.add_parser("reduce-eval", help="evaluate one reduction-pipeline stage exactly")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho")
    p.add_argument("--eps", type=_rat, required=True)
    p.add_argument("--point", type=_point, required=True, help="comma-separated rationals")
    p.add_argument("--stage", choices=("P", "pi", "F", "proj", "phi", "G"), required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce_eval)

    p = sub.add_parser("atoms", help="atom tables and restriction matrices as JSON")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--varrho", type=_rat)
    p.add_argument("--eps", type=_rat)
    p.add_argument("--out")
    p.set_defaults(func=cmd_atoms)

    p = sub.add_parser("build-asiup", help="build and certify an invariant-union candidate")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--a", type=_rat, help="stretch rate for the cyclic route")
    p.add_argument("--planar", action="store_true", help="certify the reduced map itself (d=2)")
    p.add_argument("--eps", type=_rat, help="expansion parameter for the planar route")
    p.add_argument("--varrho", type=_rat)
    p.add_argument("--lam", type=_rat, default=Fraction(1, 4))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_asiup)

    p = sub.add_parser("verify-cert", help="independently re-check a certificate file")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify_cert)

    p = sub.add_parser("search-a", help="largest certified stretch rate by bisection")
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--pair", action="append", help="d,k (repeatable for batches)")
    p.add_argument("--precision", type=_rat, default=Fraction(1, 64))
    p.add_argument("--lam", type=_rat, default=Fraction(1, 4))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_search_a)

    p = sub.add_parser("polar", help="permutahedron polar-plot rows to CSV")
    orbit_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_polar)

    p = sub.add_parser("classify", help="orbit residual-symmetry verdict as JSON")
    orbit_flags(p)
    p.add_argument("--sectors", type=int, default=64)
    p.add_argument("--threshold", type=float, default=0.9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("density", help="barycentric-grid occupancy of a simplex orbit")
    p.add_argument("--d", type=int, required=True)
    orbit_flags(p, n_flag=False)
    p.add_argument("--bins", type=int, default=32)
    p.add_argument("--out")
    p.set_defaults(func=cmd_density)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except NoPassingA as exc:
        print(f"search failed: {exc}", file=sys.stderr)
        return VERIFY_FAILURE
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
