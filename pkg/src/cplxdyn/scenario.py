"""Scenario files: JSON schema, validation, and the run orchestrator.

A scenario bundles a Hamiltonian, start points, integrator settings, a
task list, and optional render options.  Running it writes per-task
outputs with deterministic names (<task>-<index>.<ext>, one index space
per task kind) plus a manifest.json; the creation timestamp lives in its
own manifest field so that reruns are otherwise byte-identical.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .errors import CplxdynError, ScenarioError, Unreached
from .exprparse import parse_potential, potential_source
from .hamiltonian import Hamiltonian, classical_probability, find_turning_points
from .potential import find_poles
from .quadrature import preset_value
from .separatrix import SeparatrixSeed, classify_trajectory, pole_separatrix_seeds, trace_separatrix
from .trajectory import IntegratorConfig, Trajectory, integrate, integrate_toward
from .transit import transit_grid, transit_time

SCHEMA = "cplxdyn-scenario-v1"
RUN_SCHEMA = "cplxdyn-run-v1"

TASK_KINDS = (
    "trajectory",
    "separatrix",
    "transit",
    "transit-grid",
    "quadrature",
    "turning-points",
    "probability",
)

TRAJECTORY_COLUMNS = ["t", "re_x", "im_x", "re_p", "im_p", "phase",
                      "energy_error", "inv_speed"]

__all__ = ["Scenario", "Start", "load_scenario", "run", "SCHEMA"]


@dataclass(frozen=True)
class Start:
    x0: complex
    branch: int | None = None
    direction: complex | None = None

    def __post_init__(self) -> None:
        if (self.branch is None) == (self.direction is None):
            raise ScenarioError("start needs exactly one of branch index or direction hint")


@dataclass(frozen=True)
class Scenario:
    name: str
    hamiltonian: Hamiltonian
    starts: tuple[Start, ...]
    integrator: IntegratorConfig
    tasks: tuple[dict, ...]
    render: dict | None = None
    potential_text: str = ""


def _complex_record(obj, where: str) -> complex:
    if not isinstance(obj, dict) or set(obj) != {"re", "im"}:
        raise ScenarioError(f"{where} must be a {{re, im}} record")
    try:
        return complex(float(obj["re"]), float(obj["im"]))
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"{where}: {e}") from None


def _record(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _integrator_config(obj, where: str) -> IntegratorConfig:
    if obj is None:
        return IntegratorConfig()
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where} must be an object")
    known = {f.name for f in dataclasses.fields(IntegratorConfig)}
    unknown = set(obj) - known
    if unknown:
        raise ScenarioError(f"{where}: unknown fields {sorted(unknown)}")
    try:
        return IntegratorConfig(**obj)
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"{where}: {e}") from None


def _merge_integrator(base: IntegratorConfig, override, where: str) -> IntegratorConfig:
    if override is None:
        return base
    if not isinstance(override, dict):
        raise ScenarioError(f"{where} must be an object")
    known = {f.name for f in dataclasses.fields(IntegratorConfig)}
    unknown = set(override) - known
    if unknown:
        raise ScenarioError(f"{where}: unknown fields {sorted(unknown)}")
    try:
        return dataclasses.replace(base, **override)
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"{where}: {e}") from None


def load_scenario(source: dict | str | Path, name: str | None = None) -> Scenario:
    """Validate a scenario dict, JSON text, or file path."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            data = json.loads(path.read_text())
        except OSError as e:
            raise ScenarioError(f"cannot read scenario: {e}") from None
        except json.JSONDecodeError as e:
            raise ScenarioError(f"scenario is not valid JSON: {e}") from None
        if name is None:
            name = path.stem
    else:
        data = source
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    if data.get("schema") != SCHEMA:
        raise ScenarioError(f"scenario schema must be {SCHEMA!r}")
    name = name or data.get("name") or "scenario"

    ham = data.get("hamiltonian")
    if not isinstance(ham, dict):
        raise ScenarioError("hamiltonian section is required")
    text = ham.get("potential")
    if not isinstance(text, str):
        raise ScenarioError("hamiltonian.potential must be an expression string")
    try:
        potential = parse_potential(text)
    except CplxdynError as e:
        raise ScenarioError(f"hamiltonian.potential: {e}") from None
    power = ham.get("power", 2)
    if not isinstance(power, int) or isinstance(power, bool):
        raise ScenarioError("hamiltonian.power must be an integer")
    energy = _complex_record(ham.get("energy"), "hamiltonian.energy")
    try:
        h = Hamiltonian(power, potential, energy)
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"hamiltonian: {e}") from None

    starts = []
    for k, s in enumerate(data.get("starts", [])):
        if not isinstance(s, dict):
            raise ScenarioError(f"starts[{k}] must be an object")
        x0 = _complex_record(s.get("x0"), f"starts[{k}].x0")
        if ("branch" in s) == ("dir" in s):
            raise ScenarioError(f"starts[{k}] needs exactly one of 'branch' or 'dir'")
        if "branch" in s:
            starts.append(Start(x0, branch=int(s["branch"])))
        else:
            starts.append(Start(x0, direction=_complex_record(s["dir"], f"starts[{k}].dir")))

    cfg = _integrator_config(data.get("integrator"), "integrator")

    tasks = data.get("tasks", [])
    if not isinstance(tasks, list):
        raise ScenarioError("tasks must be a list")
    for k, task in enumerate(tasks):
        if not isinstance(task, dict) or task.get("kind") not in TASK_KINDS:
            raise ScenarioError(
                f"tasks[{k}].kind must be one of {', '.join(TASK_KINDS)}")

    render = data.get("render")
    if render is not None:
        if not isinstance(render, dict):
            raise ScenarioError("render must be an object")
        unknown = set(render) - {"region", "title"}
        if unknown:
            raise ScenarioError(f"render: unknown options {sorted(unknown)}")
        region = render.get("region")
        if (not isinstance(region, list) or len(region) != 4
                or not all(isinstance(v, (int, float)) for v in region)):
            raise ScenarioError("render.region must be [re_min, re_max, im_min, im_max]")

    return Scenario(name, h, tuple(starts), cfg, tuple(tasks), render, text)


def _write_trajectory_csv(path: Path, traj: Trajectory) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJECTORY_COLUMNS)
        for s in traj.samples:
            w.writerow([repr(s.t), repr(s.x.real), repr(s.x.imag),
                        repr(s.p.real), repr(s.p.imag), repr(s.phase),
                        repr(s.energy_error), repr(s.speed_inverse)])


def _run_start(h: Hamiltonian, start: Start, cfg: IntegratorConfig) -> Trajectory:
    if start.branch is not None:
        return integrate(h, start.x0, start.branch, cfg)
    return integrate_toward(h, start.x0, start.direction, cfg)


class _Runner:
    def __init__(self, scenario: Scenario, out_dir: Path):
        self.scenario = scenario
        self.out = out_dir
        self.counters: dict[str, int] = {}
        self.trajectories: list[Trajectory] = []   # dashed in figures
        self.separatrices: list[Trajectory] = []   # solid in figures
        self.grids = []

    def next_name(self, kind: str, ext: str) -> str:
        k = self.counters.get(kind, 0)
        self.counters[kind] = k + 1
        return f"{kind}-{k}.{ext}"

    def task_cfg(self, task: dict) -> IntegratorConfig:
        return _merge_integrator(self.scenario.integrator, task.get("integrator"),
                                 "task integrator")

    def run_task(self, task: dict) -> dict:
        kind = task["kind"]
        handler = {
            "trajectory": self.do_trajectory,
            "separatrix": self.do_separatrix,
            "transit": self.do_transit,
            "transit-grid": self.do_transit_grid,
            "quadrature": self.do_quadrature,
            "turning-points": self.do_turning_points,
            "probability": self.do_probability,
        }[kind]
        return handler(task)

    def task_starts(self, task: dict) -> tuple[Start, ...]:
        if "starts" not in task:
            return self.scenario.starts
        starts = []
        for k, s in enumerate(task["starts"]):
            x0 = _complex_record(s.get("x0"), f"task starts[{k}].x0")
            if ("branch" in s) == ("dir" in s):
                raise ScenarioError(
                    f"task starts[{k}] needs exactly one of 'branch' or 'dir'")
            if "branch" in s:
                starts.append(Start(x0, branch=int(s["branch"])))
            else:
                starts.append(Start(x0, direction=_complex_record(
                    s["dir"], f"task starts[{k}].dir")))
        return tuple(starts)

    def do_trajectory(self, task: dict) -> dict:
        h = self.scenario.hamiltonian
        cfg = self.task_cfg(task)
        outputs, fates = [], []
        for start in self.task_starts(task):
            traj = _run_start(h, start, cfg)
            name = self.next_name("trajectory", "csv")
            _write_trajectory_csv(self.out / name, traj)
            outputs.append(name)
            fates.append(classify_trajectory(traj).label)
            self.trajectories.append(traj)
        return {"outputs": outputs, "fates": fates}

    def _seeds_for(self, task: dict) -> list[SeparatrixSeed]:
        h = self.scenario.hamiltonian
        offset = float(task.get("offset", 1e-4))
        poles = find_poles(h.potential)
        if "pole" in task:
            target = _complex_record(task["pole"], "separatrix.pole")
            poles = [p for p in poles if abs(p.location - target) < 1e-9]
            if not poles:
                raise ScenarioError(f"no pole at {target}")
        angles = task.get("angles_deg")
        seeds: list[SeparatrixSeed] = []
        for pole in poles:
            if angles is not None:
                seeds.extend(SeparatrixSeed(pole.location, math.radians(a), offset)
                             for a in angles)
            else:
                seeds.extend(pole_separatrix_seeds(h, pole, offset))
        return seeds

    def do_separatrix(self, task: dict) -> dict:
        """Pole-seeded rays by default; explicit 'starts' trace knife-edge
        curves (separatrices that do not emanate from a pole)."""
        h = self.scenario.hamiltonian
        cfg = self.task_cfg(task)
        if "starts" in task:
            traced = [_run_start(h, s, cfg) for s in self.task_starts(task)]
        else:
            traced = [trace_separatrix(h, seed, cfg)
                      for seed in self._seeds_for(task)]
        outputs, fates = [], []
        for traj in traced:
            name = self.next_name("separatrix", "csv")
            _write_trajectory_csv(self.out / name, traj)
            outputs.append(name)
            fates.append(classify_trajectory(traj).label)
            self.separatrices.append(traj)
        return {"outputs": outputs, "fates": fates}

    def do_transit(self, task: dict) -> dict:
        h = self.scenario.hamiltonian
        cfg = self.task_cfg(task)
        name = self.next_name("transit", "csv")
        rows = []
        for k, rec in enumerate(task.get("starts", [])):
            x0 = _complex_record(rec, f"transit.starts[{k}]")
            try:
                r = transit_time(h, x0, cfg)
            except Unreached as e:
                r = e.result
            rows.append([repr(x0.real), repr(x0.imag),
                         "" if r.transit_time is None else repr(r.transit_time),
                         repr(r.closest_approach), r.branch_side])
        with (self.out / name).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re_x0", "im_x0", "transit_time", "closest_approach",
                        "branch_side"])
            w.writerows(rows)
        return {"outputs": [name]}

    def do_transit_grid(self, task: dict) -> dict:
        h = self.scenario.hamiltonian
        cfg = self.task_cfg(task)
        region = tuple(float(v) for v in task["region"])
        nx, ny = (int(v) for v in task["resolution"])
        grid = transit_grid(h, region, (nx, ny), cfg)
        name = self.next_name("transit-grid", "csv")
        re_min, re_max, im_min, im_max = region
        dx, dy = (re_max - re_min) / nx, (im_max - im_min) / ny
        with (self.out / name).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re_x0", "im_x0", "transit_time"])
            for j in range(ny):
                for i in range(nx):
                    t = grid.times[j, i]
                    w.writerow([repr(re_min + (i + 0.5) * dx),
                                repr(im_min + (j + 0.5) * dy),
                                "" if math.isnan(t) else repr(float(t))])
        self.grids.append(grid)
        return {
            "outputs": [name],
            "region": list(region),
            "resolution": [nx, ny],
            "boundary": [_record(z) for z in grid.boundary_estimate],
        }

    def do_quadrature(self, task: dict) -> dict:
        energy = task.get("energy")
        if energy is not None:
            energy = _complex_record(energy, "quadrature.energy")
            value = preset_value(task["preset"], energy)
        else:
            value = preset_value(task["preset"])
        name = self.next_name("quadrature", "json")
        payload = {"preset": task["preset"], "value": _record(value)}
        if energy is not None:
            payload["energy"] = _record(energy)
        (self.out / name).write_text(json.dumps(payload, indent=2) + "\n")
        return {"outputs": [name], "value": _record(value)}

    def do_turning_points(self, task: dict) -> dict:
        h = self.scenario.hamiltonian
        region = task.get("region")
        if region is not None:
            region = tuple(float(v) for v in region)
        tps = find_turning_points(h, region, int(task.get("max_count", 3)))
        name = self.next_name("turning-points", "csv")
        with (self.out / name).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im", "multiplicity"])
            for tp in tps:
                w.writerow([repr(tp.location.real), repr(tp.location.imag),
                            tp.multiplicity])
        return {"outputs": [name],
                "locations": [_record(tp.location) for tp in tps]}

    def do_probability(self, task: dict) -> dict:
        h = self.scenario.hamiltonian
        energy = h.energy
        if energy.imag != 0:
            raise ScenarioError("probability task needs a real energy")
        x_min = float(task.get("x_min", -3.0))
        x_max = float(task.get("x_max", 3.0))
        count = int(task.get("count", 601))
        name = self.next_name("probability", "csv")
        with (self.out / name).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "density"])
            for k in range(count):
                x = x_min + (x_max - x_min) * k / (count - 1) if count > 1 else x_min
                w.writerow([repr(x), repr(classical_probability(energy.real, x))])
        return {"outputs": [name]}

    def render_figure(self) -> str:
        from .render import render_figure

        h = self.scenario.hamiltonian
        options = dict(self.scenario.render)
        region = tuple(float(v) for v in options.pop("region"))
        tps = [tp.location for tp in find_turning_points(h)]
        poles = [p.location for p in find_poles(h.potential)]
        name = self.next_name("figure", "svg")
        render_figure(
            self.out / name,
            region=region,
            trajectories=[[s.x for s in t.samples] for t in self.trajectories],
            separatrices=[[s.x for s in t.samples] for t in self.separatrices],
            turning_points=tps,
            poles=poles,
            grid=self.grids[0] if self.grids else None,
            **options,
        )
        return name


def run(scenario: Scenario, out_dir: str | Path) -> dict:
    """Execute all tasks, write outputs plus manifest.json, return the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    runner = _Runner(scenario, out)
    entries = []
    failed = False
    for task in scenario.tasks:
        entry = {"kind": task["kind"], "status": "ok"}
        try:
            entry.update(runner.run_task(task))
        except (CplxdynError, ValueError, KeyError, TypeError) as e:
            entry["status"] = "error"
            entry["error"] = f"{type(e).__name__}: {e}"
            failed = True
        entries.append(entry)

    manifest = {
        "schema": RUN_SCHEMA,
        "scenario": scenario.name,
        "potential": scenario.potential_text or potential_source(
            scenario.hamiltonian.potential),
        "power": scenario.hamiltonian.momentum_power,
        "energy": _record(scenario.hamiltonian.energy),
        "created": datetime.now(timezone.utc).isoformat(),
        "tasks": entries,
        "failed": failed,
    }
    if scenario.render is not None:
        try:
            manifest["figure"] = runner.render_figure()
        except (CplxdynError, ValueError) as e:
            manifest["figure_error"] = f"{type(e).__name__}: {e}"
            manifest["failed"] = failed = True
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest
