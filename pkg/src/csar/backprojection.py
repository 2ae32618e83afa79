"""Matched-filter backprojection onto a polar grid.

Each cell intensity is the sum over every sample of the data multiplied by
the conjugate of the phase history that a unit point target at the cell
center would have produced::

    I(R, theta) = sum_m sum_i S[i, m] * exp(-j k_i * slant(R, theta, r, theta_m))

The kernel never materializes the steering matrix. For each (cell, angle)
pair the slant range is evaluated once. The samples of a column are taken in
blocks of ``RESYNC``; inside a block the conjugate phase history is a
geometric sequence in ``exp(-j dk R)``, evaluated by Horner's rule with one
complex multiply-add per sample, and each block is scaled by an exact
``cos``/``sin`` phasor of its first wavenumber. Cells are independent and the
per-cell operation order is fixed (blocks within a column, then columns in
order), so results do not depend on tiling or worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

from .core import Image, ValidationError, slant_range, wavenumber_vector

RESYNC = 64
LANES = 256
DEFAULT_TILE = 4096


@njit(nogil=True, cache=True)
def _backproject(data_t, k, radius, angles, weights, cell_r, cell_theta, out):
    # data_t is (M, N): one contiguous row per collection angle.
    # Cells are processed LANES at a time so the inner loops vectorize across
    # cells; no reduction is reordered, so a cell's value is independent of
    # which other cells share its lane block.
    n_angles, n = data_t.shape
    dk = (k[n - 1] - k[0]) / (n - 1) if n > 1 else 0.0
    four_r = 4.0 * radius
    n_cells = cell_r.size
    slant = np.empty(LANES)
    zr = np.empty(LANES)
    zi = np.empty(LANES)
    hr = np.empty(LANES)
    hi = np.empty(LANES)
    col_r = np.empty(LANES)
    col_i = np.empty(LANES)
    tot_r = np.empty(LANES)
    tot_i = np.empty(LANES)
    for lo in range(0, n_cells, LANES):
        cnt = min(LANES, n_cells - lo)
        for c in range(cnt):
            tot_r[c] = 0.0
            tot_i[c] = 0.0
        for m in range(n_angles):
            am = angles[m]
            for c in range(cnt):
                rr = cell_r[lo + c]
                diff = rr - radius
                h = math.sin(0.5 * (am - cell_theta[lo + c]))
                sl = math.sqrt(diff * diff + four_r * rr * h * h)
                slant[c] = sl
                zr[c] = math.cos(dk * sl)
                zi[c] = -math.sin(dk * sl)
                col_r[c] = 0.0
                col_i[c] = 0.0
            row = data_t[m]
            i0 = 0
            while i0 < n:
                i1 = min(i0 + RESYNC, n)
                for c in range(cnt):
                    hr[c] = 0.0
                    hi[c] = 0.0
                # Horner: sum_j x[i0 + j] z^j, one complex multiply-add per sample.
                for i in range(i1 - 1, i0 - 1, -1):
                    xr = row[i].real
                    xi = row[i].imag
                    for c in range(cnt):
                        a = hr[c]
                        b = hi[c]
                        hr[c] = a * zr[c] - b * zi[c] + xr
                        hi[c] = a * zi[c] + b * zr[c] + xi
                kk = k[i0]
                for c in range(cnt):
                    ph = kk * slant[c]
                    br = math.cos(ph)
                    bi = -math.sin(ph)
                    col_r[c] += br * hr[c] - bi * hi[c]
                    col_i[c] += br * hi[c] + bi * hr[c]
                i0 = i1
            w = weights[m]
            for c in range(cnt):
                tot_r[c] += col_r[c] * w
                tot_i[c] += col_i[c] * w
        for c in range(cnt):
            out[lo + c] = complex(tot_r[c], tot_i[c])


def resolve_workers(workers=None):
    """Worker count: explicit argument, else ``CSAR_THREADS`` (0 = auto), else auto."""
    if workers is None:
        env = os.environ.get("CSAR_THREADS", "").strip()
        workers = int(env) if env else 0
    if workers < 0:
        raise ValidationError("worker count must be >= 0")
    if workers == 0:
        workers = os.cpu_count() or 1
    return workers


def _prepare(data, weights=None):
    s = data.samples
    if not np.all(np.isfinite(s)):
        raise ValidationError("data contains non-finite samples")
    k = np.ascontiguousarray(wavenumber_vector(data.params))
    data_t = np.ascontiguousarray(s.T)
    if weights is None:
        weights = np.ones(data.aperture.size)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if weights.shape != (data.aperture.size,):
        raise ValidationError("taper length must equal the number of angles")
    angles = np.ascontiguousarray(data.aperture.angles)
    return data_t, k, float(data.aperture.radius), angles, weights


def azimuth_taper(kind, count):
    """Optional apodization across the aperture; ``None`` means uniform weights."""
    if kind is None or kind == "none":
        return None
    if kind == "hann":
        return np.hanning(count) if count > 1 else np.ones(count)
    if kind == "hamming":
        return np.hamming(count) if count > 1 else np.ones(count)
    raise ValidationError(f"unknown taper {kind!r}")


def steering_column(k, cell_range, cell_azimuth, track_radius, radar_angle):
    """Unit-modulus phase history of a hypothetical target for one angle."""
    slant = slant_range(cell_range, cell_azimuth, track_radius, radar_angle)
    return np.exp(1j * (np.asarray(k) * slant))


def reconstruct_cell(data, k, cell_range, cell_azimuth, taper=None):
    """Backprojected intensity of a single cell.

    Uses the same kernel as :func:`reconstruct_image`, so the two agree bit
    for bit.
    """
    data_t, _, radius, angles, weights = _prepare(data, taper)
    k = np.asarray(k, dtype=np.float64)
    if k.shape != (data.params.n_samples,):
        raise ValidationError("wavenumber vector length does not match the data")
    out = np.empty(1, dtype=np.complex128)
    _backproject(data_t, np.ascontiguousarray(k), radius, angles, weights,
                 np.array([float(cell_range)]), np.array([float(cell_azimuth)]), out)
    return complex(out[0])


def reconstruct_image(data, grid, workers=None, tile=DEFAULT_TILE, taper=None):
    """Backproject ``data`` onto every cell of ``grid``.

    Cells are split into tiles of ``tile`` cells and the tiles are spread over
    ``workers`` threads (the kernel releases the GIL).
    """
    data_t, k, radius, angles, weights = _prepare(data, taper)
    rr, tt = np.meshgrid(grid.ranges, grid.azimuths, indexing="ij")
    cell_r = np.ascontiguousarray(rr.ravel())
    cell_t = np.ascontiguousarray(tt.ravel())
    out = np.empty(cell_r.size, dtype=np.complex128)
    tile = max(1, int(tile))
    bounds = [(lo, min(lo + tile, cell_r.size)) for lo in range(0, cell_r.size, tile)]

    def run(span):
        lo, hi = span
        _backproject(data_t, k, radius, angles, weights,
                     cell_r[lo:hi], cell_t[lo:hi], out[lo:hi])

    workers = resolve_workers(workers)
    if workers == 1 or len(bounds) == 1:
        for span in bounds:
            run(span)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, bounds))
    return Image(grid, out.reshape(grid.shape))


def to_db_image(image, floor_db=-120.0):
    """Magnitude in dB relative to the image peak, clamped at ``floor_db``."""
    if not floor_db < 0:
        raise ValidationError("floor_db must be negative")
    mag = np.abs(image.values if hasattr(image, "values") else image)
    peak = mag.max() if mag.size else 0.0
    if peak == 0:
        return np.full(mag.shape, float(floor_db))
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag / peak)
    return np.maximum(db, floor_db)
