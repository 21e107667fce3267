"""Command-line interface.

Subcommands mirror the library surface: scenario runs, turning-point
tables, single trajectories, transit times and grids, named quadratures,
and re-rendering a result bundle to SVG.  Complex values on the command
line use the a+bi form (e.g. ``--start 1-1i``).  Exit codes: 0 success,
2 parse/configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from .errors import CplxdynError, ExpressionError, ScenarioError, Unreached
from .exprparse import parse_potential
from .hamiltonian import Hamiltonian, find_turning_points
from .potential import find_poles
from .quadrature import PRESETS, preset_value
from .scenario import load_scenario, run
from .trajectory import IntegratorConfig, integrate, integrate_toward
from .transit import GridScanResult, transit_grid, transit_time

# in a+bi form the imaginary term must be signed; bare literals like
# "2i" or "-i" are matched whole so the real group cannot steal digits
_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(
    rf"""^\s*
         (?:
             (?P<re>[+-]?{_NUM})(?P<im>[+-](?:{_NUM})?i)?
           | (?P<only_im>[+-]?(?:{_NUM})?i)
         )
         \s*$""",
    re.VERBOSE,
)

__all__ = ["main"]


def parse_complex(text: str) -> complex:
    """Parse CLI literals such as 1, -2.5, i, -i, 2i, 1-1i, 3e-2+0.5i."""
    m = _COMPLEX.match(text)
    if not m:
        raise ValueError(f"not a complex literal: {text!r}")
    re_part = float(m.group("re")) if m.group("re") else 0.0
    im_text = m.group("im") or m.group("only_im")
    if im_text is None:
        im_part = 0.0
    else:
        body = im_text[:-1]
        if body in ("", "+"):
            im_part = 1.0
        elif body == "-":
            im_part = -1.0
        else:
            im_part = float(body)
    return complex(re_part, im_part)


def _floats(text: str, count: int, what: str) -> tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != count:
        raise ValueError(f"{what} needs {count} comma-separated values")
    return tuple(float(p) for p in parts)


def _ints(text: str, count: int, what: str) -> tuple[int, ...]:
    parts = text.split(",")
    if len(parts) != count:
        raise ValueError(f"{what} needs {count} comma-separated values")
    return tuple(int(p) for p in parts)


def _hamiltonian(args) -> Hamiltonian:
    potential = parse_potential(args.potential)
    power = getattr(args, "power", 2)
    return Hamiltonian(power, potential, parse_complex(args.energy))


def _config(args) -> IntegratorConfig:
    overrides = {}
    if getattr(args, "tmax", None) is not None:
        overrides["t_max"] = args.tmax
    if getattr(args, "rtol", None) is not None:
        overrides["rtol"] = args.rtol
    if getattr(args, "atol", None) is not None:
        overrides["atol"] = args.atol
    return IntegratorConfig(**overrides)


def _out_stream(args):
    if getattr(args, "out", None) and args.out != "-":
        return open(args.out, "w", newline="")
    return sys.stdout


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    manifest = run(scenario, args.out)
    for entry in manifest["tasks"]:
        status = entry["status"]
        names = " ".join(entry.get("outputs", []))
        print(f"{entry['kind']}: {status} {names}".rstrip())
    if "figure" in manifest:
        print(f"figure: ok {manifest['figure']}")
    if manifest.get("figure_error"):
        print(f"figure: error {manifest['figure_error']}")
    print(f"manifest: {Path(args.out) / 'manifest.json'}")
    return 3 if manifest["failed"] else 0


def _cmd_turning_points(args) -> int:
    h = _hamiltonian(args)
    region = _floats(args.region, 4, "--region") if args.region else None
    points = find_turning_points(h, region, args.max_count)
    w = csv.writer(sys.stdout)
    w.writerow(["re", "im", "multiplicity"])
    for tp in points:
        w.writerow([repr(tp.location.real), repr(tp.location.imag),
                    tp.multiplicity])
    return 0


def _cmd_trajectory(args) -> int:
    if (args.branch is None) == (args.dir is None):
        raise ScenarioError("exactly one of --branch or --dir is required")
    h = _hamiltonian(args)
    cfg = _config(args)
    x0 = parse_complex(args.start)
    if args.branch is not None:
        traj = integrate(h, x0, args.branch, cfg)
    else:
        traj = integrate_toward(h, x0, parse_complex(args.dir), cfg)
    stream = _out_stream(args)
    try:
        w = csv.writer(stream)
        w.writerow(["t", "re_x", "im_x", "re_p", "im_p", "phase",
                    "energy_error", "inv_speed"])
        for s in traj.samples:
            w.writerow([repr(s.t), repr(s.x.real), repr(s.x.imag),
                        repr(s.p.real), repr(s.p.imag), repr(s.phase),
                        repr(s.energy_error), repr(s.speed_inverse)])
    finally:
        if stream is not sys.stdout:
            stream.close()
    print(f"termination: {traj.termination.kind}", file=sys.stderr)
    return 0


def _cmd_transit(args) -> int:
    h = _hamiltonian(args)
    cfg = _config(args)
    x0 = parse_complex(args.start)
    try:
        result = transit_time(h, x0, cfg)
    except Unreached as e:
        result = e.result
    w = csv.writer(sys.stdout)
    w.writerow(["re_x0", "im_x0", "transit_time", "closest_approach",
                "branch_side"])
    w.writerow([repr(x0.real), repr(x0.imag),
                "" if result.transit_time is None else repr(result.transit_time),
                repr(result.closest_approach), result.branch_side])
    return 0


def _cmd_transit_grid(args) -> int:
    h = _hamiltonian(args)
    cfg = _config(args)
    region = _floats(args.region, 4, "--region")
    nx, ny = _ints(args.res, 2, "--res")
    grid = transit_grid(h, region, (nx, ny), cfg)
    stream = _out_stream(args)
    try:
        w = csv.writer(stream)
        w.writerow(["re_x0", "im_x0", "transit_time"])
        re_min, re_max, im_min, im_max = region
        dx, dy = (re_max - re_min) / nx, (im_max - im_min) / ny
        for j in range(ny):
            for i in range(nx):
                t = grid.times[j, i]
                w.writerow([repr(re_min + (i + 0.5) * dx),
                            repr(im_min + (j + 0.5) * dy),
                            "" if math.isnan(t) else repr(float(t))])
    finally:
        if stream is not sys.stdout:
            stream.close()
    return 0


def _cmd_quadrature(args) -> int:
    if args.energy is not None:
        value = preset_value(args.preset, parse_complex(args.energy))
    else:
        value = preset_value(args.preset)
    w = csv.writer(sys.stdout)
    w.writerow(["re", "im"])
    w.writerow([repr(value.real), repr(value.imag)])
    return 0


def _read_trajectory_csv(path: Path) -> list[complex]:
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [complex(float(r["re_x"]), float(r["im_x"])) for r in rows]


def _read_grid(bundle: Path, entry: dict) -> GridScanResult:
    region = tuple(entry["region"])
    nx, ny = entry["resolution"]
    times = np.full((ny, nx), np.nan)
    with (bundle / entry["outputs"][0]).open(newline="") as fh:
        for k, row in enumerate(csv.DictReader(fh)):
            if row["transit_time"]:
                times[k // nx, k % nx] = float(row["transit_time"])
    boundary = [complex(b["re"], b["im"]) for b in entry.get("boundary", [])]
    return GridScanResult(region, (nx, ny), times, boundary)


def _cmd_render(args) -> int:
    from .render import render_figure

    bundle = Path(args.bundle)
    try:
        manifest = json.loads((bundle / "manifest.json").read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ScenarioError(f"cannot read bundle manifest: {e}") from None
    h = Hamiltonian(manifest["power"], parse_potential(manifest["potential"]),
                    complex(manifest["energy"]["re"], manifest["energy"]["im"]))
    trajectories, separatrices, grid = [], [], None
    for entry in manifest["tasks"]:
        if entry["status"] != "ok":
            continue
        kind = entry["kind"]
        if kind in ("trajectory", "separatrix"):
            dest = trajectories if kind == "trajectory" else separatrices
            for name in entry.get("outputs", []):
                dest.append(_read_trajectory_csv(bundle / name))
        elif kind == "transit-grid" and grid is None:
            grid = _read_grid(bundle, entry)
    region = _floats(args.region, 4, "--region")
    render_figure(
        args.svg,
        region=region,
        trajectories=trajectories,
        separatrices=separatrices,
        turning_points=[tp.location for tp in find_turning_points(h)],
        poles=[p.location for p in find_poles(h.potential)],
        grid=grid,
    )
    print(f"wrote {args.svg}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cplxdyn",
        description="Complex classical trajectories for H = p^n + V(x).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a scenario file")
    p.add_argument("scenario")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_run)

    def add_hamiltonian(p, power=True):
        p.add_argument("--potential", required=True, help="expression in x")
        if power:
            p.add_argument("--power", type=int, default=2,
                           help="momentum power n (default 2)")
        p.add_argument("--energy", required=True, help="complex energy")

    p = sub.add_parser("turning-points", help="zeros of E - V(x)")
    add_hamiltonian(p)
    p.add_argument("--region", help="re_min,re_max,im_min,im_max filter")
    p.add_argument("--max-count", type=int, default=3,
                   help="family cutoff for essential potentials")
    p.set_defaults(func=_cmd_turning_points)

    p = sub.add_parser("trajectory", help="integrate one trajectory to CSV")
    add_hamiltonian(p)
    p.add_argument("--start", required=True, help="initial position")
    p.add_argument("--branch", type=int, help="momentum branch index")
    p.add_argument("--dir", help="initial direction hint (complex)")
    p.add_argument("--tmax", type=float, help="time horizon")
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=_cmd_trajectory)

    p = sub.add_parser("transit", help="time to reach the mirror point")
    add_hamiltonian(p, power=False)
    p.add_argument("--start", required=True)
    p.set_defaults(func=_cmd_transit, power=2)

    p = sub.add_parser("transit-grid", help="transit times over a region")
    add_hamiltonian(p, power=False)
    p.add_argument("--region", required=True, help="re_min,re_max,im_min,im_max")
    p.add_argument("--res", required=True, help="NX,NY pixels")
    p.add_argument("--rtol", type=float)
    p.add_argument("--atol", type=float)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=_cmd_transit_grid, power=2)

    p = sub.add_parser("quadrature", help="named contour quadratures")
    p.add_argument("--preset", required=True, choices=sorted(PRESETS))
    p.add_argument("--energy", help="complex energy (preset default if omitted)")
    p.set_defaults(func=_cmd_quadrature)

    p = sub.add_parser("render", help="re-render a result bundle to SVG")
    p.add_argument("bundle", help="directory written by `cplxdyn run`")
    p.add_argument("--region", required=True, help="re_min,re_max,im_min,im_max")
    p.add_argument("--svg", required=True, help="output SVG path")
    p.set_defaults(func=_cmd_render)

    return parser


# flags whose values can start with "-" (expressions, complex literals,
# region bounds); fused into --flag=value so argparse keeps them together
_VALUE_FLAGS = {"--potential", "--energy", "--start", "--dir", "--region"}


def _fuse_values(argv: list[str]) -> list[str]:
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(_fuse_values(
        list(sys.argv[1:] if argv is None else argv)))
    try:
        return args.func(args)
    except (ExpressionError, ScenarioError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CplxdynError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
