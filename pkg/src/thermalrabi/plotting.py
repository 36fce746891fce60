"""Figure rendering for the report path: every CLI task drops a PNG next to
its CSV output. Rendering is best-effort presentation; the CSV files remain
the authoritative, bit-documented result format."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def render_g2zero_heatmap(g_grid, t_grid, values, path) -> Path:
    """Phase diagram of g2(0) over coupling and temperature."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    vals = np.ma.masked_invalid(values)  # (g, T) -> pcolormesh wants (T, g)
    mesh = ax.pcolormesh(g_grid, t_grid, vals.T, shading="nearest",
                         cmap="RdYlBu_r", vmin=0.0, vmax=4.0)
    cs = ax.contour(g_grid, t_grid, vals.T, levels=[1.0, 1.999, 2.0],
                    colors="k", linewidths=0.6)
    ax.clabel(cs, fontsize=7, fmt="%.3g")
    fig.colorbar(mesh, ax=ax, label=r"$g^{(2)}(0)$")
    ax.set_xlabel(r"$g/\omega_0$")
    ax.set_ylabel(r"$k_B T/\omega_0$")
    return _save(fig, path)


def render_levels(g_grid, energies, path) -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 4.5))
    for j in range(energies.shape[1]):
        ax.plot(g_grid, energies[:, j] - energies[:, 0], lw=1.0)
    ax.set_xlabel(r"$g/\omega_0$")
    ax.set_ylabel(r"$(\omega_j-\omega_{\rm ground})/\omega_0$")
    return _save(fig, path)


def render_traces(tagged_traces, path, logy: bool = False) -> Path:
    """tagged_traces: list of (metadata dict, CorrelationTrace)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for meta, trace in tagged_traces:
        label = f"g={meta.get('g')}, T={meta.get('T')}"
        ax.plot(trace.tau, trace.values, lw=1.0, label=label)
    ax.axhline(1.0, color="0.6", lw=0.6, ls="--")
    if logy:
        ax.set_yscale("symlog", linthresh=0.1)
    ax.set_xlabel(r"$\omega_0\,\tau$")
    ax.set_ylabel(r"$g^{(2)}(\tau)$")
    ax.legend(fontsize=8)
    return _save(fig, path)


def render_spectra(tagged_spectra, path) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for meta, spec in tagged_spectra:
        label = f"g={meta.get('g')}, T={meta.get('T')}"
        ax.plot(spec.omega, spec.values, lw=1.0, label=label)
    ax.set_xlabel(r"$\omega/\omega_0$")
    ax.set_ylabel(r"$S(\omega)$")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    return _save(fig, path)
