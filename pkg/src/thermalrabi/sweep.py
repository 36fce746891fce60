"""Parameter-grid orchestration: configuration, execution, serialization.

This is the only module that owns concurrency. Grid points are
embarrassingly parallel; results are collected and written in grid order,
so the output bytes do not depend on the worker count.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import correlations, io
from .dressed import level_sweep
from .dynamics import BathSpec, standard_me_baseline, steady_state
from .errors import ConfigError, ThermalRabiError, UndefinedStatisticsError
from .models import MultiTlsParams, RabiParams, TwoModeParams
from .pipeline import assemble
from .thermal import bare_mode_g2

# Fig. 2a marker points (g/omega0, k_B T/omega0)
MARKERS = ((0.1, 0.2), (0.2, 0.1), (0.5, 0.07), (0.9, 0.15))
MARKER_NAMES = ("diamond", "triangle", "square", "circle")

TASKS = ("g2zero", "levels", "g2tau", "crosscorr", "spectrum", "baseline")
FORMATS = ("csv", "json")
NORMALIZATIONS = ("raw", "per-flux", "paper-figure")
WORKERS_ENV = "THERMALRABI_WORKERS"

G_BOUNDS = (0.0, 1.5)
T_BOUNDS = (0.02, 1.0)
CONVERGENCE_TOL = 1e-4


def _default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


@dataclass(frozen=True)
class SweepConfig:
    task: str = "g2zero"
    model: str = "rabi"              # rabi | multi-tls:N | two-mode
    g_min: float = 0.0
    g_max: float = 1.0
    g_steps: int = 60
    t_min: float = 0.02
    t_max: float = 0.3
    t_steps: int = 60
    omega_x: float = 1.0
    n_fock: int = 20
    n_fock2: int = 8                 # second-mode truncation (two-mode model)
    gamma_a: float = 0.01
    gamma_x: float = 0.01
    level_cut: int = 0               # 0: thermal-window default
    normalize: str = "raw"
    markers: bool = False
    check_convergence: bool = True
    tau_max: float = 0.0             # 0: automatic window
    omega_points: int = 1200
    out: str = "out"
    format: str = "csv"
    workers: int = field(default_factory=_default_workers)
    plot: bool = True

    def g_grid(self) -> np.ndarray:
        return np.linspace(self.g_min, self.g_max, self.g_steps)

    def t_grid(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.t_steps)

    def points(self) -> list[tuple[float, float]]:
        if self.markers:
            return list(MARKERS)
        return [(float(g), float(t)) for g in self.g_grid() for t in self.t_grid()]

    def bath(self, temperature: float) -> BathSpec:
        return BathSpec(self.gamma_a, self.gamma_x, temperature)

    def model_params(self, g: float):
        kind, _, arg = self.model.partition(":")
        if kind == "rabi":
            return RabiParams(g=g, omega_x=self.omega_x, n_fock=self.n_fock)
        if kind == "multi-tls":
            n = int(arg or "2")
            return MultiTlsParams(tls=((self.omega_x, g),) * n, n_fock=self.n_fock)
        if kind == "two-mode":
            # supplement ratios: second mode at twice the frequency and coupling
            return TwoModeParams(mode1=(1.0, g), mode2=(2.0, 2.0 * g),
                                 omega_x=self.omega_x,
                                 n_fock1=self.n_fock, n_fock2=self.n_fock2)
        raise ConfigError(f"model: got {self.model!r}, expected rabi, "
                          f"multi-tls:N or two-mode")

    def as_dict(self) -> dict:
        # execution details (parallelism, destination, rendering) do not
        # affect the computed values and stay out of the result identity
        d = asdict(self)
        for key in ("workers", "plot", "out"):
            d.pop(key)
        return d


_FIELD_TYPES = {f.name: f.type for f in SweepConfig.__dataclass_fields__.values()}
_BOOL_KEYS = {"markers", "check_convergence", "plot"}
_INT_KEYS = {"g_steps", "t_steps", "n_fock", "n_fock2", "level_cut",
             "omega_points", "workers"}
_FLOAT_KEYS = {"g_min", "g_max", "t_min", "t_max", "omega_x",
               "gamma_a", "gamma_x", "tau_max"}


def _convert(key: str, raw: str):
    if key in _BOOL_KEYS:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: got {raw!r}, expected a boolean")
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: got {raw!r}, expected a number") from None
    return raw.strip()


def validate_config(config: SweepConfig) -> SweepConfig:
    def check(cond: bool, key: str, got, expected: str):
        if not cond:
            raise ConfigError(f"{key}: got {got!r}, expected {expected}")

    check(config.task in TASKS, "task", config.task, f"one of {TASKS}")
    kind = config.model.partition(":")[0]
    check(kind in ("rabi", "multi-tls", "two-mode"), "model", config.model,
          "rabi, multi-tls:N or two-mode")
    check(G_BOUNDS[0] <= config.g_min <= config.g_max <= G_BOUNDS[1],
          "g range", (config.g_min, config.g_max),
          f"ascending within [{G_BOUNDS[0]}, {G_BOUNDS[1]}]")
    check(T_BOUNDS[0] <= config.t_min <= config.t_max <= T_BOUNDS[1],
          "t range", (config.t_min, config.t_max),
          f"ascending within [{T_BOUNDS[0]}, {T_BOUNDS[1]}]")
    check(config.g_steps >= 1, "g_steps", config.g_steps, ">= 1")
    check(config.t_steps >= 1, "t_steps", config.t_steps, ">= 1")
    check(config.omega_x > 0, "omega_x", config.omega_x, "> 0")
    check(config.n_fock >= 2, "n_fock", config.n_fock, ">= 2")
    check(config.n_fock2 >= 2, "n_fock2", config.n_fock2, ">= 2")
    check(config.gamma_a >= 0, "gamma_a", config.gamma_a, ">= 0")
    check(config.gamma_x >= 0, "gamma_x", config.gamma_x, ">= 0")
    check(config.level_cut == 0 or config.level_cut >= 2,
          "level_cut", config.level_cut, "0 (auto) or >= 2")
    check(config.normalize in NORMALIZATIONS, "normalize", config.normalize,
          f"one of {NORMALIZATIONS}")
    check(config.tau_max >= 0, "tau_max", config.tau_max, ">= 0")
    check(config.omega_points >= 10, "omega_points", config.omega_points, ">= 10")
    check(config.format in FORMATS, "format", config.format, f"one of {FORMATS}")
    check(config.workers >= 1, "workers", config.workers, ">= 1")
    # validate model params once so errors surface before the sweep starts
    config.model_params(config.g_max)
    return config


def parse_config(path: str | None = None, overrides: dict | None = None) -> SweepConfig:
    """Key=value file (with '#' comments) plus CLI overrides; overrides win."""
    values: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {path}")
        for ln, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{ln}: expected key=value, got {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{path}:{ln}: unknown key {key!r}")
            values[key] = _convert(key, raw)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown option {key!r}")
        values[key] = value
    return validate_config(SweepConfig(**values))


def classify_region(value: float) -> str:
    """Phase-diagram legend: red > 2, green in (1.999, 2], gray in [1, 1.999],
    blue < 1. Boundary values fall into the closed bins as listed."""
    if np.isnan(value):
        return ""
    if value > 2.0:
        return "red"
    if value > 1.999:
        return "green"
    if value >= 1.0:
        return "gray"
    return "blue"


@dataclass
class PointRecord:
    index: int
    g: float
    temperature: float
    value: float
    region: str
    n_fock: int
    converged: bool
    status: str  # "ok" | "undefined-statistics" | "error:<Type>"
    wall_ms: float = 0.0

    def row(self):
        return (self.g, self.temperature, self.value, self.region,
                self.n_fock, self.converged, self.status)


@dataclass
class SweepResult:
    config: SweepConfig
    records: list[PointRecord]
    wall_s: float = 0.0

    @property
    def n_failed(self) -> int:
        return sum(1 for r in self.records if r.status != "ok")

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.records if r.status == "ok")

    def values_grid(self) -> np.ndarray:
        g = self.config.g_grid() if not self.config.markers else None
        if g is None:
            raise ValueError("marker runs have no rectangular grid")
        shape = (self.config.g_steps, self.config.t_steps)
        return np.array([r.value for r in self.records]).reshape(shape)


def _g2zero_point(args) -> PointRecord:
    index, g, temperature, cfg = args
    t0 = time.perf_counter()
    level_cut = cfg.level_cut or None
    try:
        system = assemble(cfg.model_params(g), temperature, level_cut=level_cut)
        value = system.g2_zero()
        converged = True
        if cfg.check_convergence:
            doubled = replace_n_fock(cfg, 2)
            ref = assemble(doubled.model_params(g), temperature,
                           level_cut=level_cut).g2_zero()
            converged = abs(ref - value) < CONVERGENCE_TOL
        status = "ok"
    except UndefinedStatisticsError:
        value, converged, status = float("nan"), False, "undefined-statistics"
    except ThermalRabiError as exc:
        value, converged, status = float("nan"), False, f"error:{type(exc).__name__}"
    wall = (time.perf_counter() - t0) * 1e3
    return PointRecord(index, g, temperature, value, classify_region(value),
                       cfg.n_fock, converged, status, wall)


def replace_n_fock(config: SweepConfig, factor: int) -> SweepConfig:
    return replace(config, n_fock=config.n_fock * factor,
                   n_fock2=config.n_fock2 * factor)


def _baseline_point(args) -> PointRecord:
    index, g, temperature, cfg = args
    t0 = time.perf_counter()
    try:
        params = RabiParams(g=g, omega_x=cfg.omega_x, n_fock=cfg.n_fock)
        liouvillian = standard_me_baseline(params, cfg.bath(temperature))
        rho = steady_state(liouvillian)
        value = bare_mode_g2(rho, cfg.n_fock)
        status, converged = "ok", True
    except UndefinedStatisticsError:
        value, converged, status = float("nan"), False, "undefined-statistics"
    except ThermalRabiError as exc:
        value, converged, status = float("nan"), False, f"error:{type(exc).__name__}"
    wall = (time.perf_counter() - t0) * 1e3
    return PointRecord(index, g, temperature, value, classify_region(value),
                       cfg.n_fock, converged, status, wall)


_POINT_FUNCS = {"g2zero": _g2zero_point, "baseline": _baseline_point}


def _load_resume(out_dir: Path, stem: str, cfg_hash: str) -> dict[int, PointRecord]:
    """Records from a previous identical run; only ok points are reused."""
    manifest_path = out_dir / "manifest.json"
    csv_path = out_dir / f"{stem}.csv"
    if not (manifest_path.exists() and csv_path.exists()):
        return {}
    try:
        manifest = io.read_manifest(manifest_path)
        if manifest.get("config_hash") != cfg_hash:
            return {}
        _, _, rows = io.read_csv(csv_path)
    except (OSError, ValueError):
        return {}
    kept = {}
    for index, row in enumerate(rows):
        g, t, value, region, n_fock, converged, status = row
        if status == "ok":
            kept[index] = PointRecord(index, float(g), float(t), float(value),
                                      region, int(n_fock), converged == "1",
                                      status)
    return kept


def run_point_sweep(config: SweepConfig) -> SweepResult:
    """g2zero or baseline over the configured grid (or the marker preset)."""
    config = validate_config(config)
    point_func = _POINT_FUNCS[config.task]
    points = config.points()
    cfg_hash = io.config_hash(config.as_dict())
    out_dir = Path(config.out)
    reused = _load_resume(out_dir, config.task, cfg_hash)

    todo = [(i, g, t, config) for i, (g, t) in enumerate(points)
            if i not in reused]
    t0 = time.perf_counter()
    if config.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            fresh = list(pool.map(point_func, todo, chunksize=8))
    else:
        fresh = [point_func(args) for args in todo]
    records = dict(reused)
    records.update({r.index: r for r in fresh})
    ordered = [records[i] for i in range(len(points))]
    return SweepResult(config, ordered, time.perf_counter() - t0)


run_g2zero_sweep = run_point_sweep


def write_sweep(result: SweepResult) -> list[Path]:
    """Serialize records plus the JSON manifest; returns written paths."""
    config = result.config
    out_dir = Path(config.out)
    stem = config.task
    columns = ["g", "T", "g2", "region", "n_fock", "converged", "status"]
    written = []
    if config.format == "csv":
        written.append(io.write_csv(
            out_dir / f"{stem}.csv", columns,
            (r.row() for r in result.records),
            metadata={"task": config.task, "model": config.model,
                      "omega_x": config.omega_x, "config_hash":
                      io.config_hash(config.as_dict())}))
    else:
        payload = [dict(zip(columns, (r.g, r.temperature, r.value, r.region,
                                      r.n_fock, r.converged, r.status)))
                   for r in result.records]
        written.append(io.write_manifest(out_dir / f"{stem}.json", payload))
    written.append(io.write_manifest(out_dir / "manifest.json", {
        "task": config.task,
        "config": config.as_dict(),
        "config_hash": io.config_hash(config.as_dict()),
        "package_version": io.PACKAGE_VERSION,
        "points_total": len(result.records),
        "points_failed": result.n_failed,
        "all_converged": result.all_converged,
        "wall_s": result.wall_s,
        "per_point": [{"index": r.index, "status": r.status,
                       "wall_ms": round(r.wall_ms, 3)}
                      for r in result.records],
    }))
    return written


def _trace_grids(system, config: SweepConfig):
    """Delay and frequency grids for trace tasks at one parameter point."""
    state = system.state
    lines = correlations.populated_lines(system.basis, system.table, state,
                                         system.liouvillian)
    auto_max, auto_step = correlations.default_tau_window(lines)
    tau_max = config.tau_max or min(auto_max, 4000.0)
    n = min(int(np.floor(tau_max / auto_step)) + 1, 4001)
    tau = np.linspace(0.0, tau_max, n)
    max_gap = max(gap for _j, _k, gap, _lw, _wt in lines)
    omega = np.linspace(1e-3, 1.25 * max_gap + 0.1, config.omega_points)
    return tau, omega


def run_trace_task(config: SweepConfig) -> tuple[list[Path], list[str]]:
    """levels / g2tau / crosscorr / spectrum; one CSV per requested point.

    Returns (paths, per-point status strings). Failed points are recorded
    in the manifest and do not abort the remaining points.
    """
    config = validate_config(config)
    out_dir = Path(config.out)
    written: list[Path] = []
    statuses: list[str] = []
    t0 = time.perf_counter()

    if config.task == "levels":
        grid = config.g_grid()
        params = RabiParams(g=0.0, omega_x=config.omega_x, n_fock=config.n_fock)
        sweep = level_sweep(params, grid, n_levels=8)
        columns = ["g"] + [f"omega_{j}" for j in range(sweep.energies.shape[1])]
        rows = ([g, *sweep.energies[i]] for i, g in enumerate(grid))
        written.append(io.write_csv(out_dir / "levels.csv", columns, rows,
                                    metadata={"task": "levels",
                                              "n_fock": config.n_fock}))
        crossings = [{"g_lo": c.g_lo, "g_hi": c.g_hi,
                      "lower": c.lower, "upper": c.upper}
                     for c in sweep.crossings]
        written.append(io.write_manifest(out_dir / "manifest.json", {
            "task": "levels", "config": config.as_dict(),
            "config_hash": io.config_hash(config.as_dict()),
            "package_version": io.PACKAGE_VERSION,
            "crossings": crossings,
            "wall_s": time.perf_counter() - t0,
        }))
        if config.plot:
            from . import plotting
            written.append(plotting.render_levels(grid, sweep.energies,
                                                  out_dir / "levels.png"))
        return written, ["ok"]

    points = config.points()
    spectra = []
    per_point = []
    for g, temperature in points:
        meta = {"g": g, "T": temperature, "gamma_a": config.gamma_a,
                "gamma_x": config.gamma_x, "n_fock": config.n_fock,
                "model": config.model}
        tag = f"g{io.fmt(g)}_T{io.fmt(temperature)}"
        try:
            system = assemble(config.model_params(g), temperature,
                              bath=config.bath(temperature),
                              level_cut=config.level_cut or None)
            tau, omega = _trace_grids(system, config)
            if config.task == "g2tau":
                trace = correlations.g2_tau(system.basis, system.table,
                                            system.liouvillian, temperature, tau)
                path = io.write_csv(out_dir / f"g2tau_{tag}.csv", ["tau", "g2"],
                                    zip(trace.tau, trace.values), metadata=meta)
                spectra.append((meta, trace))
            elif config.task == "crosscorr":
                both = np.concatenate([-tau[::-1], tau[1:]])
                trace = correlations.g2_cross_filtered(
                    system.basis, system.table, system.liouvillian,
                    temperature, both)
                path = io.write_csv(out_dir / f"crosscorr_{tag}.csv",
                                    ["tau", "g2_cross"],
                                    zip(trace.tau, trace.values), metadata=meta)
                spectra.append((meta, trace))
            else:  # spectrum
                norm = "raw" if config.normalize == "paper-figure" else config.normalize
                spec = correlations.emission_spectrum(
                    system.basis, system.table, system.liouvillian,
                    temperature, omega, normalization=norm,
                    tau_max=config.tau_max or None)
                spectra.append((meta, spec))
                path = None
            if path is not None:
                written.append(path)
            per_point.append({"g": g, "T": temperature, "status": "ok"})
            statuses.append("ok")
        except ThermalRabiError as exc:
            status = f"error:{type(exc).__name__}"
            per_point.append({"g": g, "T": temperature, "status": status,
                              "detail": str(exc)})
            statuses.append(status)

    if config.task == "spectrum":
        specs = [s for _m, s in spectra]
        if config.normalize == "paper-figure":
            specs = correlations.normalize_spectra(specs)
        for (meta, _old), spec in zip(spectra, specs):
            tag = f"g{io.fmt(meta['g'])}_T{io.fmt(meta['T'])}"
            meta = dict(meta, normalize=config.normalize)
            written.append(io.write_csv(out_dir / f"spectrum_{tag}.csv",
                                        ["omega", "S"],
                                        zip(spec.omega, spec.values),
                                        metadata=meta))
        spectra = [(m, s) for (m, _o), s in zip(spectra, specs)]

    written.append(io.write_manifest(out_dir / "manifest.json", {
        "task": config.task, "config": config.as_dict(),
        "config_hash": io.config_hash(config.as_dict()),
        "package_version": io.PACKAGE_VERSION,
        "per_point": per_point,
        "wall_s": time.perf_counter() - t0,
    }))
    if config.plot and any(s == "ok" for s in statuses):
        from . import plotting
        if config.task == "spectrum":
            written.append(plotting.render_spectra(
                spectra, out_dir / "spectrum.png"))
        else:
            written.append(plotting.render_traces(
                spectra, out_dir / f"{config.task}.png",
                logy=(config.task == "crosscorr")))
    return written, statuses
