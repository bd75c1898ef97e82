"""``curverecon`` command line.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 reconstruction
failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import _kernels
from . import io as cio
from .errors import InvalidInputError, ReconstructionError
from .mesh import load_mesh
from .pipeline import (
    ReconstructionOptions,
    decimate,
    extract_isoline_samples,
    mst_chain_baseline,
    reconstruct,
    reconstruct_motion,
    reconstruct_points,
)
from .metrics import EuclideanPointSet, SE3PointSet
from .geodesic import pairwise_distances
from .sampling import (
    DiscreteCurve,
    analyze_sampling,
    approximate_medial_axis,
    local_feature_sizes,
    subsample_curve,
)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_FAILURE = 0, 1, 2, 3

log = logging.getLogger("curverecon")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(x: str) -> float:
    v = float(x)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {x}")
    return v


def _at_least_one(x: str) -> float:
    v = float(x)
    if not v >= 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {x}")
    return v


def _nonneg(x: str) -> float:
    v = float(x)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {x}")
    return v


def _count(x: str) -> int:
    v = int(x)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {x}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="curverecon", description="Reconstruct closed curves from unordered samples.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, tours=True):
        sp.add_argument("--report", help="JSON report path")
        if tours:
            sp.add_argument("--out", help="tour file path (default: stdout)")
        sp.add_argument("--seed", type=int, default=0, help="seed for any randomized step (default 0)")
        sp.add_argument("--threads", type=_count, default=1)
        sp.add_argument("--timing", action="store_true", help="include wall-clock timings in the report")

    def mesh_inputs(sp):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--mesh", help="OFF/OBJ triangle mesh; samples are vertex indices")
        src.add_argument("--points", help="Euclidean point file (one point per line)")
        sp.add_argument("--samples", help="sample vertex indices (required with --mesh)")
        sp.add_argument("--allow-nonmanifold", action="store_true")
        sp.add_argument("--allow-disconnected", action="store_true")

    r = sub.add_parser("reconstruct", help="reconstruct curves through mesh or point samples")
    mesh_inputs(r)
    r.add_argument("--single", action="store_true", help="bridge components into a single curve")
    r.add_argument("--obj", help="export tour polylines as OBJ lines (mesh input)")
    common(r)

    rm = sub.add_parser("reconstruct-multi", help="one curve per SIGDV component")
    mesh_inputs(rm)
    rm.add_argument("--obj")
    common(rm)

    mo = sub.add_parser("reconstruct-motion", help="order rigid-motion samples")
    mo.add_argument("--poses", required=True, help="pose file: qw qx qy qz tx ty tz")
    mo.add_argument("--witnesses", help="optional dense pose trace used as witnesses")
    mo.add_argument("--w-rot", type=_nonneg, default=1.0)
    mo.add_argument("--w-tr", type=_nonneg, default=1.0)
    mo.add_argument("--bisector-tol", type=_positive, default=0.25)
    mo.add_argument("--witness-steps", type=_count, default=16)
    mo.add_argument("--witness-neighbors", type=_count, default=3)
    mo.add_argument("--single", action="store_true")
    common(mo)

    def curve_inputs(sp):
        sp.add_argument("--mesh", help="mesh the curve lives on (curve file holds vertex indices)")
        sp.add_argument("--curve", required=True, help="dense closed curve: vertex indices or 2D points")
        sp.add_argument("--injectivity-bound", type=_positive, help="lower bound on the injectivity radius")

    sm = sub.add_parser("sample", help="subsample a dense curve to meet rho/u targets")
    curve_inputs(sm)
    sm.add_argument("--rho", type=_positive, required=True)
    sm.add_argument("--u", type=_at_least_one, required=True)
    common(sm)

    cs = sub.add_parser("check-sampling", help="evaluate sampling conditions")
    curve_inputs(cs)
    cs.add_argument("--samples", required=True, help="vertex indices (mesh) or dense-curve indices (planar)")
    cs.add_argument("--rho", type=_positive, required=True)
    cs.add_argument("--u", type=_at_least_one, required=True)
    cs.add_argument("--theta", type=_positive)
    common(cs, tours=False)

    iso = sub.add_parser("isoline", help="vertices within a band of a scalar field")
    iso.add_argument("--mesh", required=True)
    iso.add_argument("--field", required=True, help="one float per vertex")
    iso.add_argument("--value", type=float, required=True)
    iso.add_argument("--tol", type=_positive, required=True)
    iso.add_argument("--step", type=_count, default=1, help="keep every step-th vertex")
    common(iso)

    bl = sub.add_parser("baseline", help="spanning-tree chain baseline")
    src = bl.add_mutually_exclusive_group(required=True)
    src.add_argument("--mesh")
    src.add_argument("--points")
    src.add_argument("--poses")
    bl.add_argument("--samples")
    bl.add_argument("--w-rot", type=_nonneg, default=1.0)
    bl.add_argument("--w-tr", type=_nonneg, default=1.0)
    common(bl)
    return p


# ---------------------------------------------------------------------------


def _emit(out: str | None, text: str) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _report(args, payload: dict, timings: dict) -> None:
    if args.timing:
        payload["timing"] = {k: round(v, 6) for k, v in timings.items()}
    if args.report:
        cio.write_report(args.report, payload)


def _result_payload(result, command: str, mode: str) -> dict:
    return {
        "command": command,
        "mode": mode,
        "n_samples": int(result.D.shape[0]),
        "edge_counts": {name: g.tag_counts() for name, g in {**result.stages, "final": result.graph}.items()},
        "tours": [{"size": len(t), "length": t.length} for t in result.tours],
        "bridged_edges": [list(e) for e in result.bridged_edges],
        "chains": result.chains,
        "warnings": result.warnings,
    }


def _cmd_reconstruct(args, multi: bool) -> int:
    t0 = time.perf_counter()
    single = getattr(args, "single", False) and not multi
    opts = ReconstructionOptions(
        single=single,
        allow_nonmanifold=args.allow_nonmanifold,
        allow_disconnected=args.allow_disconnected,
        threads=args.threads,
        polylines=bool(getattr(args, "obj", None)),
    )
    if args.mesh:
        if not args.samples:
            raise InvalidInputError("--samples is required with --mesh")
        mesh = load_mesh(args.mesh)
        samples = cio.read_indices(args.samples)
        result = reconstruct(mesh, samples, opts)
        if args.obj:
            cio.write_obj_polylines(args.obj, mesh, result.polylines)
    else:
        if args.obj:
            raise InvalidInputError("--obj needs --mesh")
        result = reconstruct_points(cio.read_table(args.points), opts)
    elapsed = time.perf_counter() - t0
    for w in result.warnings:
        log.warning(w)
    _emit(args.out, cio.format_tours([t.order for t in result.tours], result.chains))
    mode = "single" if single else "multi"
    _report(args, _result_payload(result, args.command, mode), {"total_s": elapsed})
    return EXIT_OK


def _cmd_motion(args) -> int:
    t0 = time.perf_counter()
    opts = ReconstructionOptions(
        single=args.single,
        w_rot=args.w_rot,
        w_tr=args.w_tr,
        bisector_tol=args.bisector_tol,
        witness_steps=args.witness_steps,
        witness_neighbors=args.witness_neighbors,
    )
    poses = cio.read_poses(args.poses)
    witnesses = cio.read_poses(args.witnesses) if args.witnesses else None
    result = reconstruct_motion(poses, witnesses, opts)
    elapsed = time.perf_counter() - t0
    _emit(args.out, cio.format_tours([t.order for t in result.tours], result.chains))
    payload = _result_payload(result, args.command, "single" if args.single else "multi")
    payload["weights"] = {"w_rot": args.w_rot, "w_tr": args.w_tr}
    _report(args, payload, {"total_s": elapsed})
    return EXIT_OK


def _load_curve(args) -> DiscreteCurve:
    if args.mesh:
        mesh = load_mesh(args.mesh)
        return DiscreteCurve(cio.read_indices(args.curve), closed=True, mesh=mesh)
    return DiscreteCurve(cio.read_table(args.curve, 2), closed=True)


def _curve_lfs(curve: DiscreteCurve, bound):
    axis = approximate_medial_axis(curve)
    return local_feature_sizes(curve, axis, bound), axis.empty


def _cmd_sample(args) -> int:
    t0 = time.perf_counter()
    curve = _load_curve(args)
    lfs, empty = _curve_lfs(curve, args.injectivity_bound)
    picked = subsample_curve(curve, args.rho, args.u, lfs, args.injectivity_bound)
    out = curve.points[picked] if curve.mesh is not None else np.asarray(picked)
    _emit(args.out, cio.format_indices(out))
    report = analyze_sampling(curve, picked, args.rho, args.u, lfs=lfs, injectivity_bound=args.injectivity_bound)
    if empty:
        report.warnings.append("medial axis is empty")
    payload = {"command": "sample", "n_dense": len(curve), "n_samples": len(picked), **report.to_dict()}
    _report(args, payload, {"total_s": time.perf_counter() - t0})
    return EXIT_OK


def _cmd_check(args) -> int:
    t0 = time.perf_counter()
    curve = _load_curve(args)
    raw = cio.read_indices(args.samples)
    if curve.mesh is not None:
        pos = {int(v): k for k, v in enumerate(curve.points)}
        missing = [int(v) for v in raw if int(v) not in pos]
        if missing:
            raise InvalidInputError(f"sample vertex {missing[0]} is not on the curve")
        samples = [pos[int(v)] for v in raw]
    else:
        samples = raw.tolist()
    lfs, empty = _curve_lfs(curve, args.injectivity_bound)
    report = analyze_sampling(curve, samples, args.rho, args.u, args.theta, lfs=lfs, injectivity_bound=args.injectivity_bound)
    if empty:
        report.warnings.append("medial axis is empty")
    payload = {"command": "check-sampling", "n_samples": len(samples), **report.to_dict()}
    _report(args, payload, {"total_s": time.perf_counter() - t0})
    if not args.report:
        sys.stdout.write(cio.format_report(payload))
    return EXIT_OK


def _cmd_isoline(args) -> int:
    t0 = time.perf_counter()
    mesh = load_mesh(args.mesh)
    field = cio.read_field(args.field, mesh.n_vertices)
    picked = decimate(extract_isoline_samples(mesh, field, args.value, args.tol), args.step)
    _emit(args.out, cio.format_indices(picked))
    payload = {"command": "isoline", "value": args.value, "tol": args.tol, "step": args.step, "n_samples": len(picked)}
    _report(args, payload, {"total_s": time.perf_counter() - t0})
    return EXIT_OK


def _cmd_baseline(args) -> int:
    t0 = time.perf_counter()
    if args.mesh:
        if not args.samples:
            raise InvalidInputError("--samples is required with --mesh")
        D = pairwise_distances(load_mesh(args.mesh), cio.read_indices(args.samples), threads=args.threads)
    elif args.points:
        D = EuclideanPointSet(cio.read_table(args.points)).distance_matrix()
    else:
        D = SE3PointSet(cio.read_poses(args.poses), args.w_rot, args.w_tr).distance_matrix()
    res = mst_chain_baseline(D)
    if res.tour is not None:
        _emit(args.out, cio.format_tours([res.tour.order]))
    payload = {
        "command": "baseline",
        "mst_is_chain": res.is_chain,
        "branching_vertices": res.branching,
        "tour_length": None if res.tour is None else res.tour.length,
    }
    _report(args, payload, {"total_s": time.perf_counter() - t0})
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    log.info("kernel backend: %s", _kernels.BACKEND)
    handlers = {
        "reconstruct": lambda a: _cmd_reconstruct(a, multi=False),
        "reconstruct-multi": lambda a: _cmd_reconstruct(a, multi=True),
        "reconstruct-motion": _cmd_motion,
        "sample": _cmd_sample,
        "check-sampling": _cmd_check,
        "isoline": _cmd_isoline,
        "baseline": _cmd_baseline,
    }
    try:
        return handlers[args.command](args)
    except (InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ReconstructionError as exc:
        print(f"reconstruction failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
