"""Point-spread-function and image metrology on dB images over a polar grid."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ValidationError

RANGE = "range"
ANGLE = "angle"


class LobeTruncatedError(ValueError):
    """The -3 dB crossing of a lobe falls outside the grid."""


@dataclass(frozen=True)
class PsfReport:
    peak_cell: tuple
    peak_db: float
    mainlobe_width_range: float
    mainlobe_width_angle: float
    pslr_db: float

    def rows(self):
        return [
            ("peak_range_index", self.peak_cell[0], "1"),
            ("peak_angle_index", self.peak_cell[1], "1"),
            ("peak_db", self.peak_db, "dB"),
            ("mainlobe_width_range", self.mainlobe_width_range, "m"),
            ("mainlobe_width_angle", self.mainlobe_width_angle, "rad"),
            ("mainlobe_width_angle_deg", math.degrees(self.mainlobe_width_angle), "deg"),
            ("pslr_db", self.pslr_db, "dB"),
        ]


@dataclass(frozen=True)
class PairResult:
    resolved: bool
    peak_a: tuple | None
    peak_b: tuple | None
    valley_depth_db: float


def find_peak(image_db):
    """Index and value of the maximum; ties go to the lowest (range, angle) index."""
    a = np.asarray(image_db)
    if a.size == 0:
        raise ValidationError("empty image")
    flat = int(np.argmax(a))
    idx = np.unravel_index(flat, a.shape)
    return (int(idx[0]), int(idx[1])), float(a[idx])


def _cut(image_db, peak, axis):
    a = np.asarray(image_db, dtype=np.float64)
    if axis == RANGE:
        return a[:, peak[1]], peak[0]
    if axis == ANGLE:
        return a[peak[0], :], peak[1]
    raise ValidationError(f"axis must be {RANGE!r} or {ANGLE!r}")


def _crossings(profile, q, level):
    """Fractional indices where ``profile`` first drops below ``level`` on each side of ``q``."""
    i = q - 1
    while i >= 0 and profile[i] >= level:
        i -= 1
    j = q + 1
    while j < profile.size and profile[j] >= level:
        j += 1
    if i < 0 or j >= profile.size:
        raise LobeTruncatedError("lobe truncated by grid edge")
    left = i + (level - profile[i]) / (profile[i + 1] - profile[i])
    right = j - (level - profile[j]) / (profile[j - 1] - profile[j])
    return left, right


def mainlobe_width(image_db, grid, axis, peak=None, drop_db=3.0):
    """-3 dB full width of the 1-D cut through ``peak``, linearly interpolated.

    Returns meters for the range axis and radians for the angle axis.
    """
    if peak is None:
        peak, _ = find_peak(image_db)
    profile, q = _cut(image_db, peak, axis)
    left, right = _crossings(profile, q, profile[q] - drop_db)
    spacing = grid.dr if axis == RANGE else grid.dtheta
    return float((right - left) * spacing)


def _sidelobe_peak(profile, q):
    best = -np.inf
    i = q
    while i > 0 and profile[i - 1] <= profile[i]:
        i -= 1
    if i > 0:
        best = max(best, profile[:i].max())
    j = q
    while j < profile.size - 1 and profile[j + 1] <= profile[j]:
        j += 1
    if j < profile.size - 1:
        best = max(best, profile[j + 1:].max())
    return best


def peak_sidelobe_ratio(image_db, peak=None):
    """Highest sidelobe on the range and angle cuts relative to the peak.

    A sidelobe is anything past the first null on either side. When no cut
    has one, the lowest image value stands in.
    """
    a = np.asarray(image_db, dtype=np.float64)
    if peak is None:
        peak, _ = find_peak(a)
    top = a[peak]
    side = max(_sidelobe_peak(*_cut(a, peak, RANGE)), _sidelobe_peak(*_cut(a, peak, ANGLE)))
    if not np.isfinite(side):
        side = a.min()
    return float(min(side - top, 0.0))


def psf_report(image_db, grid):
    peak, value = find_peak(image_db)
    return PsfReport(
        peak_cell=peak,
        peak_db=value,
        mainlobe_width_range=mainlobe_width(image_db, grid, RANGE, peak),
        mainlobe_width_angle=mainlobe_width(image_db, grid, ANGLE, peak),
        pslr_db=peak_sidelobe_ratio(image_db, peak),
    )


def _is_local_max(a, ir, it):
    lo_r, hi_r = max(ir - 1, 0), min(ir + 2, a.shape[0])
    lo_t, hi_t = max(it - 1, 0), min(it + 2, a.shape[1])
    return a[ir, it] >= a[lo_r:hi_r, lo_t:hi_t].max()


def _bilinear(a, fr, ft):
    r0 = np.clip(np.floor(fr).astype(int), 0, a.shape[0] - 1)
    t0 = np.clip(np.floor(ft).astype(int), 0, a.shape[1] - 1)
    r1 = np.minimum(r0 + 1, a.shape[0] - 1)
    t1 = np.minimum(t0 + 1, a.shape[1] - 1)
    u = fr - r0
    v = ft - t0
    return ((1 - u) * (1 - v) * a[r0, t0] + (1 - u) * v * a[r0, t1]
            + u * (1 - v) * a[r1, t0] + u * v * a[r1, t1])


def _search_halfwidths(a, grid):
    peak, _ = find_peak(a)
    widths = []
    for axis, spacing in ((RANGE, grid.dr), (ANGLE, grid.dtheta)):
        try:
            widths.append(max(1, math.ceil(mainlobe_width(a, grid, axis, peak) / spacing)))
        except LobeTruncatedError:
            widths.append(3)
    return widths


def resolve_pair(image_db, grid, pos_a, pos_b, min_valley_db=3.0):
    """Locate the lobes expected at ``pos_a`` and ``pos_b`` and measure the dip between them.

    Positions are ``(range, azimuth)`` in meters and radians. Each lobe is the
    strongest cell within one mainlobe width (measured at the image peak) of
    its expected position, and must be a local maximum.
    """
    a = np.asarray(image_db, dtype=np.float64)
    wr, wt = _search_halfwidths(a, grid)
    peaks = []
    for pos in (pos_a, pos_b):
        fr, ft = grid.index_of(*pos)
        if not (-0.5 <= fr <= grid.n_r - 0.5 and -0.5 <= ft <= grid.n_theta - 0.5):
            raise ValidationError(f"position {pos} lies outside the grid")
        cr, ct = grid.nearest_cell(*pos)
        r0, r1 = max(cr - wr, 0), min(cr + wr + 1, grid.n_r)
        t0, t1 = max(ct - wt, 0), min(ct + wt + 1, grid.n_theta)
        (ir, it), _ = find_peak(a[r0:r1, t0:t1])
        ir, it = ir + r0, it + t0
        peaks.append((ir, it) if _is_local_max(a, ir, it) else None)
    pa, pb = peaks
    if pa is None or pb is None or pa == pb:
        return PairResult(False, pa, pb, 0.0)
    lo, hi = sorted((pa, pb))
    count = 4 * max(abs(hi[0] - lo[0]), abs(hi[1] - lo[1])) + 1
    path = np.linspace(0.0, 1.0, count)
    profile = _bilinear(a, lo[0] + path * (hi[0] - lo[0]), lo[1] + path * (hi[1] - lo[1]))
    depth = float(min(a[pa], a[pb]) - profile.min())
    return PairResult(depth >= min_valley_db, pa, pb, depth)


def two_target_resolved(image_db, grid, pos_a, pos_b, min_valley_db=3.0):
    return resolve_pair(image_db, grid, pos_a, pos_b, min_valley_db).resolved


def cell_xy(grid, cell):
    r, theta = grid.center(*cell)
    return r * math.cos(theta), r * math.sin(theta)


def peak_separation(grid, cell_a, cell_b):
    """Cartesian distance between two cell centers, meters."""
    xa, ya = cell_xy(grid, cell_a)
    xb, yb = cell_xy(grid, cell_b)
    return math.hypot(xa - xb, ya - yb)


def sidelobe_energy_fraction(image, grid, center, half_range, half_angle):
    """Share of image energy lying outside a box around ``center``.

    The box spans ``center +/- (half_range, half_angle)`` in (m, rad).
    """
    values = image.values if hasattr(image, "values") else np.asarray(image)
    power = np.abs(values) ** 2
    total = power.sum()
    if total == 0:
        raise ValidationError("image has no energy")
    rr = np.abs(grid.ranges - center[0]) <= half_range
    tt = np.abs(grid.azimuths - center[1]) <= half_angle
    inside = power[np.ix_(rr, tt)].sum()
    return float((total - inside) / total)
