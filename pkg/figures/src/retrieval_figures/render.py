"""Render figures from cavity-retrieval CSV output.

Pure readers: every number shown comes from the input files, nothing is
recomputed.  Three figure kinds are supported:

- heatmap: one sweep-table column over the (Delta, Omega) grid.  Delta/2pi
  runs horizontally, Omega/2pi vertically, MHz units.  Efficiency-like
  quantities use a perceptually uniform colormap; the sign-antisymmetric
  detuning columns use a symmetric diverging one.
- phase-panel: field phase and the fitted LO line from a phase dump, with the
  field magnitude on a twin axis.
- trajectory-overlay: |E|, |P| and the drive envelope from a trajectory dump,
  the drive scaled down to the pulse area of |E|.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

HEATMAP = "heatmap"
PHASE_PANEL = "phase-panel"
TRAJECTORY_OVERLAY = "trajectory-overlay"

SWEEP_COLUMNS = ("Delta_MHz", "Omega_MHz", "delta_opt_MHz", "nu_opt_MHz",
                 "eta", "chi", "chi_eta")
TRAJECTORY_COLUMNS = ("t_ns", "Re_E", "Im_E", "Re_P", "Im_P", "Re_S", "Im_S",
                      "Omega")
PHASE_COLUMNS = ("t_ns", "theta_E_rad", "theta_LO_rad", "abs_E")

# columns that are antisymmetric under Delta -> -Delta get a diverging map
DIVERGING_VALUES = ("nu_opt_MHz", "delta_opt_MHz")

VALUE_LABELS = {
    "eta": "retrieval efficiency",
    "chi": "overlap",
    "chi_eta": "homodyne efficiency",
    "delta_opt_MHz": "optimized cavity detuning (MHz)",
    "nu_opt_MHz": "optimized LO shift (MHz)",
}


class RenderError(ValueError):
    """Bad figure specification or malformed input data."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_path: str
    output_path: str
    value: str = "eta"          # heatmap column
    title: str = ""
    xlim: tuple | None = None
    ylim: tuple | None = None
    dpi: int = 150


@dataclass(frozen=True)
class RenderResult:
    """Output path plus the exact data arrays that were drawn."""

    path: str
    arrays: dict
    diagnostics: dict = field(default_factory=dict)


def _read_csv(path, required):
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError:
        raise RenderError(f"input file not found: {path}") from None
    except Exception as exc:
        raise RenderError(f"cannot parse {path}: {exc}") from None
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise RenderError(
            f"{path} is missing column(s) {', '.join(missing)}; "
            f"found {', '.join(frame.columns)}")
    return frame


def sweep_grid(frame: pd.DataFrame, value: str):
    """Pivot sweep rows into (delta_axis, omega_axis, grid[omega, delta]).

    The table must contain every (Delta, Omega) combination exactly once;
    anything else is reported as a ragged grid.
    """
    deltas = np.sort(frame["Delta_MHz"].unique())
    omegas = np.sort(frame["Omega_MHz"].unique())
    if len(frame) != len(deltas) * len(omegas):
        raise RenderError(
            f"ragged grid: {len(frame)} rows != {len(deltas)} Delta values "
            f"x {len(omegas)} Omega values")
    pivot = frame.pivot_table(index="Omega_MHz", columns="Delta_MHz",
                              values=value, aggfunc="first")
    grid = pivot.reindex(index=omegas, columns=deltas).to_numpy(dtype=float)
    if np.isnan(grid).all():
        raise RenderError(f"column {value!r} holds no numeric data")
    return deltas, omegas, grid


def antisymmetry_defect(deltas: np.ndarray, grid: np.ndarray) -> float | None:
    """Max |v(Delta) + v(-Delta)| over the grid, or None if the Delta axis is
    not symmetric about zero."""
    if not np.allclose(deltas + deltas[::-1], 0.0, atol=1e-9):
        return None
    mirrored = grid[:, ::-1]
    finite = np.isfinite(grid) & np.isfinite(mirrored)
    if not finite.any():
        return None
    return float(np.max(np.abs(grid[finite] + mirrored[finite])))


def _render_heatmap(spec: FigureSpec) -> RenderResult:
    frame = _read_csv(spec.input_path, SWEEP_COLUMNS)
    if spec.value not in frame.columns:
        raise RenderError(f"unknown value column {spec.value!r}")
    deltas, omegas, grid = sweep_grid(frame, spec.value)

    diagnostics = {}
    if spec.value in DIVERGING_VALUES:
        cmap = "RdBu_r"
        peak = float(np.nanmax(np.abs(grid)))
        vmin, vmax = -peak, peak
        defect = antisymmetry_defect(deltas, grid)
        if defect is not None:
            diagnostics["antisymmetry_defect"] = defect
    else:
        cmap = "viridis"
        vmin = vmax = None

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    mesh = ax.pcolormesh(deltas, omegas, grid, cmap=cmap, vmin=vmin, vmax=vmax,
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label=VALUE_LABELS.get(spec.value, spec.value))
    ax.set_xlabel("laser-atom detuning / 2pi (MHz)")
    ax.set_ylabel("peak Rabi frequency / 2pi (MHz)")
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    ax.set_title(spec.title or VALUE_LABELS.get(spec.value, spec.value))
    fig.savefig(spec.output_path, dpi=spec.dpi)
    plt.close(fig)
    return RenderResult(path=spec.output_path,
                        arrays={"Delta_MHz": deltas, "Omega_MHz": omegas,
                                "grid": grid},
                        diagnostics=diagnostics)


def _render_phase_panel(spec: FigureSpec) -> RenderResult:
    frame = _read_csv(spec.input_path, PHASE_COLUMNS)
    t = frame["t_ns"].to_numpy()
    theta_e = frame["theta_E_rad"].to_numpy()
    theta_lo = frame["theta_LO_rad"].to_numpy()
    abs_e = frame["abs_E"].to_numpy()

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.plot(t, theta_e, color="tab:red", label="field phase")
    ax.plot(t, theta_lo, color="tab:blue", linestyle="--",
            label="LO phase (linear fit)")
    ax.set_xlabel("t (ns)")
    ax.set_ylabel("phase (rad)")
    twin = ax.twinx()
    twin.plot(t, abs_e, color="0.6", linewidth=0.8, label="|E|")
    twin.set_ylabel("|E|")
    ax.legend(loc="upper left")
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    ax.set_title(spec.title or "phase linearization")
    fig.savefig(spec.output_path, dpi=spec.dpi)
    plt.close(fig)
    return RenderResult(path=spec.output_path,
                        arrays={"t_ns": t, "theta_E_rad": theta_e,
                                "theta_LO_rad": theta_lo, "abs_E": abs_e})


def _render_trajectory_overlay(spec: FigureSpec) -> RenderResult:
    frame = _read_csv(spec.input_path, TRAJECTORY_COLUMNS)
    t = frame["t_ns"].to_numpy()
    abs_e = np.hypot(frame["Re_E"], frame["Im_E"]).to_numpy()
    abs_p = np.hypot(frame["Re_P"], frame["Im_P"]).to_numpy()
    omega = frame["Omega"].to_numpy()
    # scale the (large) drive down to the pulse area of the emitted field
    area_e = np.trapezoid(abs_e, t)
    area_om = np.trapezoid(omega, t)
    scaled = omega * (area_e / area_om if area_om > 0 else 0.0)

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.plot(t, abs_e, color="tab:red", label="|E|")
    ax.plot(t, abs_p, color="tab:green", label="|P|")
    ax.plot(t, scaled, color="0.5", linestyle="--",
            label="drive (scaled to |E| area)")
    ax.set_xlabel("t (ns)")
    ax.set_ylabel("amplitude")
    ax.legend()
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    ax.set_title(spec.title or "retrieved wave packet")
    fig.savefig(spec.output_path, dpi=spec.dpi)
    plt.close(fig)
    return RenderResult(path=spec.output_path,
                        arrays={"t_ns": t, "abs_E": abs_e, "abs_P": abs_p,
                                "drive_scaled": scaled})


_RENDERERS = {
    HEATMAP: _render_heatmap,
    PHASE_PANEL: _render_phase_panel,
    TRAJECTORY_OVERLAY: _render_trajectory_overlay,
}


def render(spec: FigureSpec) -> RenderResult:
    """Validate inputs, draw the figure, and return the drawn arrays."""
    try:
        renderer = _RENDERERS[spec.kind]
    except KeyError:
        raise RenderError(f"unknown figure kind {spec.kind!r}; "
                          f"expected one of {', '.join(_RENDERERS)}") from None
    return renderer(spec)
