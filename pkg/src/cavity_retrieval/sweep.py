"""Single-point evaluation and (Delta, Omega) grid sweeps with CSV output.

A sweep evaluates every grid point independently (optionally in a process
pool), sorts results into row-major (Delta, Omega) order and writes a CSV
with a fixed schema plus a JSON metadata sidecar.  Failed points carry an
error note in their row; the sweep continues.
"""

from __future__ import annotations

import configparser
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dynamics import simulate
from .efficiency import efficiency_bound, retrieval_efficiency
from .errors import ConfigError, RetrievalError
from .homodyne import optimize_lo_frequency
from .model import PhysicalParams, Pulse, TimeGrid, angular_to_mhz
from .optimize import OBJECTIVE_ETA, OBJECTIVE_CHI_ETA, optimize_delta

CSV_HEADER = ("Delta_MHz,Omega_MHz,delta_opt_MHz,nu_opt_MHz,"
              "eta,chi,chi_eta,evaluations,wall_ms,error")

MODE_NO_DETUNE_OPT = "no-detune-opt"
MODE_DETUNE_OPT = "detune-opt"


@dataclass(frozen=True)
class GridAxis:
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if self.lo > self.hi:
            raise ConfigError(f"need min <= max, got [{self.lo}, {self.hi}]")

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.lo])
        return np.linspace(self.lo, self.hi, self.steps)

    @classmethod
    def parse(cls, text: str) -> "GridAxis":
        """Parse a 'min:max:steps' range or a bare scalar."""
        parts = str(text).split(":")
        try:
            if len(parts) == 1:
                v = float(parts[0])
                return cls(v, v, 1)
            if len(parts) == 3:
                return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError as exc:
            raise ConfigError(f"bad grid axis {text!r}: {exc}") from None
        raise ConfigError(f"bad grid axis {text!r}: expected min:max:steps")


@dataclass(frozen=True)
class SweepConfig:
    """Fixed parameters, grid axes and execution options for one sweep."""

    kappa_mhz: float = 9.0
    gamma_mhz: float = 3.0
    C: float | None = None
    w_mhz: float | None = None
    tau_ns: float = 150.0
    shape: str = "gaussian"
    delta_grid: GridAxis = field(default_factory=lambda: GridAxis(0.0, 0.0, 1))
    omega_grid: GridAxis = field(default_factory=lambda: GridAxis(80.0, 80.0, 1))
    mode: str = MODE_DETUNE_OPT
    objective: str = OBJECTIVE_ETA
    jobs: int = 0               # 0 means use all available processors
    rel_tol: float = 1e-10
    out: str = "sweep.csv"

    def __post_init__(self):
        if self.mode not in (MODE_NO_DETUNE_OPT, MODE_DETUNE_OPT):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.objective not in (OBJECTIVE_ETA, OBJECTIVE_CHI_ETA):
            raise ConfigError(f"unknown objective {self.objective!r}")
        if self.C is None and self.w_mhz is None:
            raise ConfigError("one of C or w_MHz is required")
        self.base_params(0.0)   # validates C/w consistency and positivity

    def base_params(self, delta_mhz_value: float, Delta_mhz=0.0) -> PhysicalParams:
        try:
            return PhysicalParams.from_mhz(
                self.kappa_mhz, self.gamma_mhz, C=self.C, w_mhz=self.w_mhz,
                Delta_mhz=Delta_mhz, delta_mhz=delta_mhz_value)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def pulse(self, omega_mhz: float) -> Pulse:
        return Pulse.from_mhz(omega_mhz, self.tau_ns, shape=self.shape)


def load_config(path: str) -> SweepConfig:
    """Read a sweep configuration file (INI-style key = value sections)."""
    return SweepConfig(**config_kwargs_from_file(path))


def config_kwargs_from_file(path: str) -> dict:
    """SweepConfig keyword arguments from a config file, for flag merging."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    kwargs = {}
    try:
        fixed = parser["fixed"] if parser.has_section("fixed") else {}
        if "kappa_MHz" in fixed:
            kwargs["kappa_mhz"] = float(fixed["kappa_MHz"])
        if "gamma_MHz" in fixed:
            kwargs["gamma_mhz"] = float(fixed["gamma_MHz"])
        if "C" in fixed:
            kwargs["C"] = float(fixed["C"])
        if "w_MHz" in fixed:
            kwargs["w_mhz"] = float(fixed["w_MHz"])
        if "tau_ns" in fixed:
            kwargs["tau_ns"] = float(fixed["tau_ns"])
        if "shape" in fixed:
            kwargs["shape"] = fixed["shape"]
        if parser.has_section("grid"):
            grid = parser["grid"]
            if "Delta_MHz" in grid:
                kwargs["delta_grid"] = GridAxis.parse(grid["Delta_MHz"])
            if "Omega_MHz" in grid:
                kwargs["omega_grid"] = GridAxis.parse(grid["Omega_MHz"])
        if parser.has_section("run"):
            run = parser["run"]
            if "mode" in run:
                kwargs["mode"] = run["mode"]
            if "objective" in run:
                kwargs["objective"] = run["objective"]
            if "jobs" in run:
                kwargs["jobs"] = int(run["jobs"])
            if "rel_tol" in run:
                kwargs["rel_tol"] = float(run["rel_tol"])
        if parser.has_section("outputs") and "csv" in parser["outputs"]:
            kwargs["out"] = parser["outputs"]["csv"]
    except ValueError as exc:
        raise ConfigError(f"bad value in {path!r}: {exc}") from None
    return kwargs


@dataclass(frozen=True)
class PointResult:
    Delta_mhz: float
    Omega_mhz: float
    delta_opt_mhz: float
    nu_opt_mhz: float
    eta: float
    chi: float
    chi_eta: float
    evaluations: int
    wall_ms: float
    error: str = ""

    def csv_row(self) -> str:
        def num(x):
            return "" if x != x else f"{x:.17g}"   # NaN -> empty field

        return (f"{self.Delta_mhz:.17g},{self.Omega_mhz:.17g},"
                f"{num(self.delta_opt_mhz)},{num(self.nu_opt_mhz)},"
                f"{num(self.eta)},{num(self.chi)},{num(self.chi_eta)},"
                f"{self.evaluations},{self.wall_ms:.0f},{self.error}")


def run_point(config: SweepConfig, Delta_mhz: float, Omega_mhz: float,
              delta_mhz: float | None = None) -> PointResult:
    """Evaluate one (Delta, Omega) parameter point.

    With mode "detune-opt" the cavity detuning is optimized under the
    configured objective, otherwise delta is fixed (default 0).  Errors from
    the physics layer are captured in the result rather than raised.
    """
    start = time.perf_counter()
    evals = 0
    try:
        pulse = config.pulse(Omega_mhz)
        if config.mode == MODE_DETUNE_OPT and delta_mhz is None:
            base = config.base_params(0.0, Delta_mhz=Delta_mhz)
            opt = optimize_delta(base, pulse, objective=config.objective,
                                 rel_tol=config.rel_tol)
            delta_opt = angular_to_mhz(opt.delta_opt)
            evals += opt.evaluations
        else:
            delta_opt = 0.0 if delta_mhz is None else delta_mhz
        params = config.base_params(delta_opt, Delta_mhz=Delta_mhz)
        grid = TimeGrid.for_pulse(params, pulse,
                                  rel_tol=config.rel_tol, abs_tol=config.rel_tol)
        traj, _ = simulate(params, pulse, grid)
        evals += 1
        eta = retrieval_efficiency(traj)
        if eta > 0.0:
            hres = optimize_lo_frequency(traj)
            nu_opt = angular_to_mhz(hres.omega_opt)
            chi, chi_eta = hres.chi, hres.I0_max
        else:
            nu_opt, chi, chi_eta = float("nan"), float("nan"), float("nan")
        wall = (time.perf_counter() - start) * 1e3
        note = "" if eta > 0.0 else "ZeroField: no emitted light, chi undefined"
        return PointResult(Delta_mhz, Omega_mhz, delta_opt, nu_opt, eta, chi,
                           chi_eta, evals, wall, note)
    except RetrievalError as exc:
        wall = (time.perf_counter() - start) * 1e3
        nan = float("nan")
        return PointResult(Delta_mhz, Omega_mhz, nan, nan, nan, nan, nan,
                           evals, wall, f"{type(exc).__name__}: {exc}")


def _worker(args) -> PointResult:
    config, Delta_mhz, Omega_mhz = args
    return run_point(config, Delta_mhz, Omega_mhz)


def run_sweep(config: SweepConfig, progress=None) -> list[PointResult]:
    """Evaluate the whole grid; rows come back in row-major (Delta, Omega)
    order regardless of execution order."""
    points = [(config, d, o)
              for d in config.delta_grid.values()
              for o in config.omega_grid.values()]
    jobs = config.jobs if config.jobs > 0 else (os.cpu_count() or 1)
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = []
            for res in pool.map(_worker, points, chunksize=4):
                results.append(res)
                if progress:
                    progress(len(results), len(points))
    else:
        results = []
        for args in points:
            results.append(_worker(args))
            if progress:
                progress(len(results), len(points))
    results.sort(key=lambda r: (r.Delta_mhz, r.Omega_mhz))
    return results


def write_sweep_csv(results: list[PointResult], config: SweepConfig, path: str):
    """Write the sweep table and a JSON sidecar with config echo and version."""
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in results:
            fh.write(row.csv_row() + "\n")
    meta = {
        "version": __version__,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "rows": len(results),
        "failed": sum(1 for r in results if r.error and "ZeroField" not in r.error),
        "config": {
            "kappa_MHz": config.kappa_mhz, "gamma_MHz": config.gamma_mhz,
            "C": config.C, "w_MHz": config.w_mhz, "tau_ns": config.tau_ns,
            "shape": config.shape,
            "Delta_MHz": [config.delta_grid.lo, config.delta_grid.hi,
                          config.delta_grid.steps],
            "Omega_MHz": [config.omega_grid.lo, config.omega_grid.hi,
                          config.omega_grid.steps],
            "mode": config.mode, "objective": config.objective,
            "rel_tol": config.rel_tol,
        },
    }
    with open(path + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def sweep_bound_violations(results: list[PointResult], config: SweepConfig,
                           slack: float = 1e-6) -> int:
    """Count rows whose efficiency exceeds C/(1+C) + slack."""
    bound = efficiency_bound(config.base_params(0.0))
    return sum(1 for r in results
               if r.eta == r.eta and r.eta > bound + slack)
