"""Command-line front end: one verb per module capability.

Subcommands: exact1d, exact2d, chessboard, sample, sticks, phase,
components, coupling, render. All reports are JSON (tail tables also as
CSV); every artifact embeds the resolved parameters and seed. Errors
exit nonzero with a machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import exact, graphs, lattice, render, sticks
from .coupling import radius_tail_experiment
from .errors import IoError, SpecError, SquarepackError
from .sampler import OBSERVABLES, ChainParams, run_chain


def _threads_default() -> int:
    env = os.environ.get("SQUAREPACK_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _emit(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, default=str)
    if out:
        try:
            with open(out, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise IoError(f"cannot write {out}: {exc}") from exc
    else:
        print(text)


def _read_config(path: str) -> lattice.Configuration:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    if text.lstrip().startswith("{"):
        return lattice.from_json(text)
    return lattice.decode(text)


def _add_common(p: argparse.ArgumentParser, *names) -> None:
    if "lambda" in names:
        p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    if "dims" in names:
        p.add_argument("--width", type=int, required=True)
        p.add_argument("--height", type=int, required=True)
    if "boundary" in names:
        p.add_argument(
            "--boundary",
            choices=("periodic", "free", "fully_packed"),
            default="periodic",
        )
    if "seed" in names:
        p.add_argument("--seed", type=int, default=0)
    if "out" in names:
        p.add_argument("--out", default=None)
    if "threads" in names:
        p.add_argument("--threads", type=int, default=_threads_default())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="squarepack",
        description="2x2 hard-square model: exact computation and Monte Carlo",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact1d", help="periodic/free 1D partition values")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--free", action="store_true", help="free boundary instead of periodic")
    p.add_argument("--out", default=None)

    p = sub.add_parser("exact2d", help="exact partition polynomial of a region")
    _add_common(p, "dims", "boundary", "out", "threads")
    p.add_argument("--lambda", dest="lambdas", type=float, action="append", default=[])
    p.add_argument("--method", choices=("auto", "brute", "transfer"), default="auto")
    p.add_argument("--area-cap", type=int, default=exact.DEFAULT_AREA_CAP)

    p = sub.add_parser("chessboard", help="chessboard seminorm of a face-vacancy event")
    _add_common(p, "dims", "lambda", "out")
    p.add_argument("--face-x", type=int, default=0)
    p.add_argument("--face-y", type=int, default=0)
    p.add_argument("--area-cap", type=int, default=exact.DEFAULT_AREA_CAP)

    p = sub.add_parser("sample", help="run a Monte Carlo chain")
    p.add_argument("--spec", default=None, help="JSON experiment spec file")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument(
        "--boundary", choices=("periodic", "free", "fully_packed"), default="periodic"
    )
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweeps", type=int, default=1000)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=0)
    p.add_argument("--thinning", type=int, default=1)
    p.add_argument("--initial", default=None)
    p.add_argument("--observables", nargs="*", default=["tile_density"])
    p.add_argument("--keep-samples", action="store_true")
    p.add_argument("--threads", type=int, default=_threads_default())
    p.add_argument("--out", default=None)

    p = sub.add_parser("sticks", help="stick census and Psi sets of a configuration")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--psi", nargs=3, metavar=("K", "L", "TYPE"), default=None)
    p.add_argument("--N", dest="n_div", type=int, default=sticks.DEFAULT_N)
    p.add_argument("--out", default=None)

    p = sub.add_parser("phase", help="classify the phase of a configuration")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--b", type=int, default=None)
    p.add_argument("--N", dest="n_div", type=int, default=sticks.DEFAULT_N)
    p.add_argument("--out", default=None)

    p = sub.add_parser("components", help="enumerate window components, verify bounds")
    _add_common(p, "dims", "out", "threads")
    p.add_argument("--M", dest="m_values", type=int, action="append", default=[])
    p.add_argument("--lambda", dest="lambdas", type=float, action="append", default=[])
    p.add_argument("--window-cap", type=int, default=graphs.DEFAULT_WINDOW_CAP)

    p = sub.add_parser("coupling", help="disagreement cluster tail experiment")
    _add_common(p, "dims", "lambda", "out")
    p.add_argument("--seed", type=int, default=0, help="base seed; pair uses seed, seed+1")
    p.add_argument("--sweeps", type=int, default=2000)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=500)
    p.add_argument("--thinning", type=int, default=10)
    p.add_argument("--phase", default="ver0")
    p.add_argument("--csv", default=None, help="also write the tail table CSV here")

    p = sub.add_parser("render", help="render a configuration to SVG or PPM")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--style", choices=("svg", "ppm"), default="svg")
    p.add_argument("--cell", type=int, default=None)
    p.add_argument("--no-sticks", action="store_true")

    return parser


def _cmd_exact1d(args) -> int:
    value = (
        exact.z1d_free(args.L, args.lam)
        if args.free
        else exact.z1d_periodic(args.L, args.lam)
    )
    if args.out:
        _emit(
            {
                "spec": {"L": args.L, "lambda": args.lam, "free": args.free},
                "value": value,
            },
            args.out,
        )
    else:
        print(f"{value:.12g}")
    return 0


def _cmd_exact2d(args) -> int:
    poly = exact.partition_polynomial(
        args.width,
        args.height,
        args.boundary,
        method=args.method,
        area_cap=args.area_cap,
        threads=args.threads,
    )
    report = poly.report(args.lambdas or [1.0])
    report["spec"] = {
        "width": args.width,
        "height": args.height,
        "boundary": args.boundary,
        "method": args.method,
    }
    _emit(report, args.out)
    return 0


def _cmd_chessboard(args) -> int:
    corner, k, l, event = exact.face_vacant_event((args.face_x, args.face_y))
    query = exact.SeminormQuery(args.width, args.height, corner, k, l, event)
    zeta = exact.chessboard_seminorm(query, args.lam, area_cap=args.area_cap)
    _emit(
        {
            "spec": {
                "width": args.width,
                "height": args.height,
                "lambda": args.lam,
                "event": f"face ({args.face_x},{args.face_y}) vacant",
            },
            "zeta": zeta,
            "upper_bound_lambda^-1/4": args.lam ** -0.25,
            "bound_holds": zeta <= args.lam ** -0.25 + 1e-12,
        },
        args.out,
    )
    return 0


def _load_sample_spec(path: str) -> dict:
    try:
        with open(path) as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed spec {path}: {exc}") from exc
    required = {"width", "height", "lambda", "seed", "sweeps"}
    missing = required - spec.keys()
    if missing:
        raise SpecError(f"spec missing fields: {sorted(missing)}")
    return spec


def _cmd_sample(args) -> int:
    if args.spec:
        spec = _load_sample_spec(args.spec)
        params = ChainParams(
            width=spec["width"],
            height=spec["height"],
            lam=spec["lambda"],
            seed=spec["seed"],
            sweeps=spec["sweeps"],
            boundary=spec.get("boundary", "periodic"),
            burn_in=spec.get("burn_in", 0),
            thinning=spec.get("thinning", 1),
            translation_move_fraction=spec.get("translation_move_fraction", 0.25),
            initial=spec.get("initial"),
        )
        names = spec.get("observables", ["tile_density"])
        keep = spec.get("keep_samples", False)
    else:
        if args.width is None or args.height is None:
            raise SpecError("sample needs --spec or --width/--height")
        params = ChainParams(
            width=args.width,
            height=args.height,
            lam=args.lam,
            seed=args.seed,
            sweeps=args.sweeps,
            boundary=args.boundary,
            burn_in=args.burn_in,
            thinning=args.thinning,
            initial=args.initial,
        )
        names = args.observables
        keep = args.keep_samples
    unknown = [n for n in names if n not in OBSERVABLES]
    if unknown:
        raise SpecError(f"unknown observables: {unknown}")
    report = run_chain(params, names, keep_samples=keep)
    _emit(json.loads(report.to_json()), args.out)
    return 0


def _cmd_sticks(args) -> int:
    cfg = _read_config(args.infile)
    stick_list = sticks.extract_sticks(cfg)
    payload = {
        "spec": {"input": args.infile, "dims": [cfg.width, cfg.height], "N": args.n_div},
        "census": sticks.stick_census(cfg, stick_list),
        "total_sticks": len(stick_list),
    }
    if args.psi:
        k, l, stype = int(args.psi[0]), int(args.psi[1]), args.psi[2]
        points = sorted(sticks.psi_set(cfg, k, l, stype, args.n_div, stick_list))
        nx = (cfg.width - args.n_div * k) // k + 1
        ny = (cfg.height - args.n_div * l) // l + 1
        bitmap = [
            "".join("1" if (x, y) in set(points) else "0" for x in range(nx))
            for y in reversed(range(ny))
        ]
        payload["psi"] = {"K": k, "L": l, "type": stype, "points": points, "bitmap": bitmap}
    _emit(payload, args.out)
    return 0


def _cmd_phase(args) -> int:
    cfg = _read_config(args.infile)
    label = sticks.classify_phase(cfg, b=args.b, lam=args.lam, n=args.n_div)
    _emit(
        {
            "spec": {
                "input": args.infile,
                "lambda": args.lam,
                "b": args.b,
                "N": args.n_div,
                "threshold_note": "b defaults from lambda; calibration choice",
            },
            "phase": label,
        },
        args.out,
    )
    return 0


def _cmd_components(args) -> int:
    m_values = args.m_values or [1, 2, 3]
    lambdas = args.lambdas or [100.0, 1e4]
    catalog = graphs.enumerate_components(
        args.width, args.height, window_cap=args.window_cap, threads=args.threads
    )
    report = graphs.verify_counting_bounds(catalog, m_values, lambdas)
    report["spec"] = {
        "width": args.width,
        "height": args.height,
        "M": m_values,
        "lambda": lambdas,
        "boundary": "fully_packed",
    }
    report["catalog_size"] = len(catalog)
    _emit(report, args.out)
    return 0


def _cmd_coupling(args) -> int:
    template = ChainParams(
        width=args.width,
        height=args.height,
        lam=args.lam,
        seed=args.seed,
        sweeps=args.sweeps,
        burn_in=args.burn_in,
        thinning=args.thinning,
        initial=args.phase,
    )
    report = radius_tail_experiment(template, (args.seed, args.seed + 1), phase=args.phase)
    if args.csv:
        try:
            with open(args.csv, "w") as fh:
                fh.write(report.to_csv())
        except OSError as exc:
            raise IoError(f"cannot write {args.csv}: {exc}") from exc
    _emit(
        {
            "spec": report.params,
            "pairs_used": report.pairs_used,
            "pairs_skipped": report.pairs_skipped,
            "fits": report.fits,
            "tail_preview": report.tail_rows()[:12],
        },
        args.out,
    )
    return 0


def _cmd_render(args) -> int:
    cfg = _read_config(args.infile)
    render.render_image(
        cfg,
        args.out,
        style=args.style,
        cell=args.cell,
        stick_overlay=not args.no_sticks,
    )
    return 0


_COMMANDS = {
    "exact1d": _cmd_exact1d,
    "exact2d": _cmd_exact2d,
    "chessboard": _cmd_chessboard,
    "sample": _cmd_sample,
    "sticks": _cmd_sticks,
    "phase": _cmd_phase,
    "components": _cmd_components,
    "coupling": _cmd_coupling,
    "render": _cmd_render,
}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (SquarepackError, ValueError) as exc:
        error = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(error), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
