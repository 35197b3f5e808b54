"""The three figure kinds: trajectory panel, 1D sweep curve, 2D heatmap."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schemas import SchemaError, read_run_csv, read_sweep_csv

CARBON_BUDGET = 250.0  # GtCO2, the horizontal reference line in sweep plots


def plot_trajectory(run_csv: str | Path, out_image: str | Path) -> Path:
    """Share price (left axis) over the convinced-investor share (right
    axis, filled), with a vertical marker at policy implementation."""
    cols = read_run_csv(run_csv)
    months = cols["month"]
    fig, ax_price = plt.subplots(figsize=(8, 4.5))
    ax_fci = ax_price.twinx()
    ax_fci.fill_between(months, cols["fci"], color="#9ecae1", alpha=0.5, zorder=1)
    ax_fci.set_ylim(0, 1)
    ax_fci.set_ylabel("fraction of convinced investors")
    ax_price.plot(months, cols["price"], color="#08306b", lw=1.5, zorder=2)
    ax_price.set_xlabel("month")
    ax_price.set_ylabel("share price")
    ax_price.set_zorder(ax_fci.get_zorder() + 1)
    ax_price.patch.set_visible(False)
    policy_months = [m for m, flag in zip(months, cols["policy"]) if flag >= 1.0]
    if policy_months:
        ax_price.axvline(policy_months[0], color="#cb181d", lw=1.2, ls="-")
    title = f"final CCE = {cols['cce'][-1]:.0f} GtCO2"
    ax_price.set_title(title)
    fig.tight_layout()
    out = Path(out_image)
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return out


def plot_sweep1d(grid_csv: str | Path, out_image: str | Path) -> Path:
    """Mean CCE over one parameter with the interquartile band and the
    carbon-budget reference line."""
    axes, rows = read_sweep_csv(grid_csv, n_axes=1)
    axis = axes[0]
    rows = sorted(rows, key=lambda r: r[axis])
    x = [r[axis] for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.fill_between(x, [r["q1"] for r in rows], [r["q3"] for r in rows],
                    color="#c6dbef", label="interquartile range")
    ax.plot(x, [r["mean_cce"] for r in rows], color="#08306b", lw=1.8, label="mean")
    ax.axhline(CARBON_BUDGET, color="#555555", lw=1.0, ls="--", label="carbon budget")
    ax.set_xlabel(axis)
    ax.set_ylabel("cumulative carbon emissions [GtCO2]")
    ax.legend(frameon=False)
    fig.tight_layout()
    out = Path(out_image)
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return out


def plot_sweep2d(grid_csv: str | Path, out_image: str | Path) -> Path:
    """Heatmap of mean CCE over two parameters; bimodal (tipping) cells are
    rendered in a neutral gray."""
    axes, rows = read_sweep_csv(grid_csv, n_axes=2)
    ax_x, ax_y = axes
    xs = sorted({r[ax_x] for r in rows})
    ys = sorted({r[ax_y] for r in rows})
    if len(xs) * len(ys) != len(rows):
        raise SchemaError(
            f"{grid_csv}: grid is not rectangular ({len(xs)}x{len(ys)} axes, {len(rows)} cells)"
        )
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    mean = np.full((len(ys), len(xs)), np.nan)
    bimodal = np.zeros_like(mean, dtype=bool)
    for r in rows:
        mean[yi[r[ax_y]], xi[r[ax_x]]] = r["mean_cce"]
        bimodal[yi[r[ax_y]], xi[r[ax_x]]] = r["bimodal"] >= 1.0
    shaded = np.ma.masked_where(bimodal, mean)
    fig, ax = plt.subplots(figsize=(7, 5.5))
    cmap = plt.get_cmap("viridis").copy()
    im = ax.imshow(shaded, origin="lower", aspect="auto", cmap=cmap,
                   extent=(min(xs), max(xs), min(ys), max(ys)))
    if bimodal.any():
        overlay = np.ma.masked_where(~bimodal, np.ones_like(mean))
        ax.imshow(overlay, origin="lower", aspect="auto", cmap="Greys",
                  vmin=0, vmax=2, extent=(min(xs), max(xs), min(ys), max(ys)))
    fig.colorbar(im, ax=ax, label="mean cumulative carbon emissions [GtCO2]")
    ax.set_xlabel(ax_x)
    ax.set_ylabel(ax_y)
    ax.set_title("gray cells: bimodal outcomes (tipping region)")
    fig.tight_layout()
    out = Path(out_image)
    fig.savefig(out, dpi=130)
    plt.close(fig)
    return out
