"""Figure rendering for reports. Everything draws to files through the Agg backend."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure

from . import design as dc
from .backprojection import to_db_image
from .metrics import ANGLE, RANGE, find_peak

FIGSIZE = (6.4, 4.8)
DPI = 120
CMAP = "jet"


def _cell_edges(lo, hi, n):
    return np.linspace(lo, hi, n + 1)


def render_image(image, path, floor_db=-40.0, cartesian=True, marks=()):
    """Save a dB rendering of a polar image, optionally warped to x/y."""
    db = to_db_image(image, floor_db)
    g = image.grid
    r_edges = _cell_edges(g.r_min, g.r_max, g.n_r)
    t_edges = _cell_edges(g.theta_min, g.theta_max, g.n_theta)
    fig = Figure(figsize=FIGSIZE, dpi=DPI)
    ax = fig.add_subplot(1, 1, 1)
    if cartesian:
        rr, tt = np.meshgrid(r_edges, t_edges, indexing="ij")
        mesh = ax.pcolormesh(rr * np.cos(tt), rr * np.sin(tt), db, cmap=CMAP,
                             vmin=floor_db, vmax=0.0, shading="flat")
        ax.set_aspect("equal")
        ax.set_xlabel("x [m]")
        ax.set_ylabel("y [m]")
        for r, theta in marks:
            ax.plot(r * math.cos(theta), r * math.sin(theta), "w+", ms=10, mew=1.2)
    else:
        mesh = ax.pcolormesh(np.degrees(t_edges), r_edges, db, cmap=CMAP,
                             vmin=floor_db, vmax=0.0, shading="flat")
        ax.set_xlabel("azimuth [deg]")
        ax.set_ylabel("range [m]")
        for r, theta in marks:
            ax.plot(math.degrees(theta), r, "w+", ms=10, mew=1.2)
    fig.colorbar(mesh, ax=ax, label="dB")
    fig.savefig(path)
    return path


def render_psf_cuts(image_db, grid, path, peak=None):
    """Range and angle cuts through the peak with the -3 dB level marked."""
    if peak is None:
        peak, _ = find_peak(image_db)
    a = np.asarray(image_db)
    top = a[peak]
    fig = Figure(figsize=(8.0, 3.2), dpi=DPI)
    cuts = ((RANGE, grid.ranges, a[:, peak[1]], "range [m]"),
            (ANGLE, np.degrees(grid.azimuths), a[peak[0], :], "azimuth [deg]"))
    for j, (_, x, y, label) in enumerate(cuts):
        ax = fig.add_subplot(1, 2, j + 1)
        ax.plot(x, y, "k-", lw=1)
        ax.axhline(top - 3.0, color="r", ls="--", lw=0.8)
        ax.set_xlabel(label)
        ax.set_ylabel("dB")
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    return path


def render_design(params, track_radius, path, target_range=2.0):
    """Angular-step bound versus target azimuth, and range migration versus exposure."""
    fig = Figure(figsize=(8.0, 3.2), dpi=DPI)
    ax = fig.add_subplot(1, 2, 1)
    az = np.radians(np.linspace(1.0, 89.0, 177))
    bound = [dc.angular_spacing_at(track_radius, params.f_min, params.f_max, t, params.c)
             for t in az]
    ax.semilogy(np.degrees(az), np.degrees(bound), "k-", lw=1)
    ax.axhline(math.degrees(dc.max_angular_spacing(track_radius, params.f_min, params.f_max,
                                                   params.c)), color="r", ls="--", lw=0.8)
    ax.set_xlabel("target azimuth [deg]")
    ax.set_ylabel("max angular step [deg]")
    ax = fig.add_subplot(1, 2, 2)
    exposure = np.radians(np.linspace(0.0, 180.0, 181))
    rcm = [dc.rcm_extent(target_range, track_radius, e) for e in exposure]
    ax.plot(np.degrees(exposure), np.asarray(rcm) * 100, "k-", lw=1)
    ax.axhline(dc.range_resolution(params) * 100, color="r", ls="--", lw=0.8)
    ax.set_xlabel("exposure [deg]")
    ax.set_ylabel("range migration [cm]")
    fig.tight_layout()
    fig.savefig(path)
    return path
