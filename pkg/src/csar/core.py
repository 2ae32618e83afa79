"""Domain types and geometric primitives for circular-track FMCW imaging.

Angles are radians everywhere in this module. Conversion from degrees
happens at the user-facing boundary (scene files, CLI).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299792458.0

# Reading of "much smaller than" in the monostatic validity test.
MONOSTATIC_FRACTION = 0.1


class ValidationError(ValueError):
    """Raised when a value violates a domain invariant."""


def _require(cond, msg):
    if not cond:
        raise ValidationError(msg)


def _frozen_array(values, dtype):
    arr = np.array(values, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class RadarParams:
    """Chirp and carrier parameters of the FMCW radar."""

    fc: float
    b: float
    n_samples: int
    chirp_time: float = 0.0
    max_range: float = 0.0
    c: float = SPEED_OF_LIGHT
    d: float = 0.0

    def __post_init__(self):
        _require(math.isfinite(self.fc) and self.fc > 0, "fc must be positive")
        _require(math.isfinite(self.b) and 0 <= self.b < 2 * self.fc,
                 "bandwidth must satisfy 0 <= b < 2*fc")
        _require(int(self.n_samples) == self.n_samples and self.n_samples >= 2,
                 "n_samples must be an integer >= 2")
        _require(math.isfinite(self.c) and self.c > 0, "c must be positive")
        _require(math.isfinite(self.d) and self.d >= 0, "d must be non-negative")
        object.__setattr__(self, "n_samples", int(self.n_samples))

    @property
    def wavelength(self):
        return self.c / self.fc

    @property
    def f_min(self):
        return self.fc - self.b / 2

    @property
    def f_max(self):
        return self.fc + self.b / 2


def _exact_step(a, base):
    """Bisect the floats near ``base`` for a step that regenerates ``a`` bit for bit.

    Each regenerated angle is monotone in the step, so the matching steps form
    one contiguous run of floats; rounding symmetry lets descending angles be
    handled by negation.
    """
    if base < 0:
        step = _exact_step(-a, -base)
        return None if step is None else -step
    idx = np.arange(a.size, dtype=np.float64)
    reach = 2.0 * np.spacing(np.max(np.abs(a))) / max(a.size - 1, 1) + np.spacing(base)
    bits = np.array([max(base - reach, np.finfo(np.float64).tiny), base + reach]).view(np.int64)
    lo, hi = int(bits[0]), int(bits[1])
    while lo <= hi:
        mid = (lo + hi) // 2
        step = np.int64(mid).view(np.float64)
        r = a[0] + step * idx
        low, high = bool(np.any(r < a)), bool(np.any(r > a))
        if not (low or high):
            return float(step)
        if low and high:
            return None
        if low:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


@dataclass(frozen=True, eq=False)
class Aperture:
    """Circular track of radius ``radius`` sampled at ordered ``angles``."""

    radius: float
    angles: np.ndarray

    def __post_init__(self):
        angles = _frozen_array(np.atleast_1d(self.angles), np.float64)
        _require(angles.ndim == 1 and angles.size >= 1, "aperture needs at least one angle")
        _require(bool(np.all(np.isfinite(angles))), "aperture angles must be finite")
        _require(math.isfinite(self.radius) and self.radius > 0, "track radius must be positive")
        if angles.size > 1:
            steps = np.diff(angles)
            _require(bool(np.all(steps > 0) or np.all(steps < 0)),
                     "aperture angles must be strictly monotonic")
        object.__setattr__(self, "angles", angles)

    @classmethod
    def uniform(cls, radius, start, step, count):
        return cls(radius, start + step * np.arange(int(count), dtype=np.float64))

    @property
    def size(self):
        return self.angles.size

    def uniform_step(self, atol=1e-12):
        """Return the constant angular step, or None if the angles are not uniform.

        The returned step regenerates ``angles`` exactly via
        ``start + step * arange(M)`` whenever such a step exists.
        """
        a = self.angles
        if a.size == 1:
            return 0.0
        idx = np.arange(a.size, dtype=np.float64)
        candidates = [a[1] - a[0], (a[-1] - a[0]) / (a.size - 1)]
        for step in candidates:
            if np.array_equal(a[0] + step * idx, a):
                return float(step)
        step = _exact_step(a, candidates[1])
        if step is not None:
            return step
        step = candidates[1]
        if np.max(np.abs(a[0] + step * idx - a)) <= atol:
            return float(step)
        return None

    def subset(self, index):
        return Aperture(self.radius, self.angles[index])


@dataclass(frozen=True)
class PointTarget:
    range: float
    azimuth: float
    reflectivity: complex = 1.0

    def __post_init__(self):
        _require(math.isfinite(self.range) and self.range >= 0, "target range must be >= 0")
        _require(math.isfinite(self.azimuth), "target azimuth must be finite")
        sigma = complex(self.reflectivity)
        _require(math.isfinite(sigma.real) and math.isfinite(sigma.imag),
                 "reflectivity must be finite")
        object.__setattr__(self, "reflectivity", sigma)

    @property
    def xy(self):
        return self.range * math.cos(self.azimuth), self.range * math.sin(self.azimuth)


@dataclass(frozen=True)
class Scene:
    targets: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))

    def __add__(self, other):
        return Scene(self.targets + other.targets)

    def __len__(self):
        return len(self.targets)


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """Beat-signal samples, one column per collection angle."""

    params: RadarParams
    aperture: Aperture
    samples: np.ndarray

    def __post_init__(self):
        s = _frozen_array(self.samples, np.complex128)
        _require(s.shape == (self.params.n_samples, self.aperture.size),
                 f"samples shape {s.shape} does not match "
                 f"N x M = {self.params.n_samples} x {self.aperture.size}")
        _require(bool(np.all(np.isfinite(s))), "samples must be finite")
        object.__setattr__(self, "samples", s)

    def with_samples(self, samples):
        return DataMatrix(self.params, self.aperture, samples)

    def columns(self, index):
        """Sub-aperture made of the selected columns."""
        return DataMatrix(self.params, self.aperture.subset(index), self.samples[:, index])

    def __add__(self, other):
        if not isinstance(other, DataMatrix):
            return NotImplemented
        _require(other.params == self.params
                 and np.array_equal(other.aperture.angles, self.aperture.angles)
                 and other.aperture.radius == self.aperture.radius,
                 "cannot add data matrices with different geometry")
        return self.with_samples(self.samples + other.samples)


@dataclass(frozen=True)
class PolarGrid:
    """Uniform polar region of interest; cell values live at cell centers."""

    r_min: float
    r_max: float
    n_r: int
    theta_min: float
    theta_max: float
    n_theta: int

    def __post_init__(self):
        for name in ("r_min", "r_max", "theta_min", "theta_max"):
            _require(math.isfinite(getattr(self, name)), f"{name} must be finite")
        _require(0 <= self.r_min < self.r_max, "grid needs 0 <= r_min < r_max")
        _require(self.theta_min < self.theta_max, "grid needs theta_min < theta_max")
        _require(int(self.n_r) == self.n_r and self.n_r >= 1, "n_r must be >= 1")
        _require(int(self.n_theta) == self.n_theta and self.n_theta >= 1, "n_theta must be >= 1")
        object.__setattr__(self, "n_r", int(self.n_r))
        object.__setattr__(self, "n_theta", int(self.n_theta))

    @classmethod
    def from_degrees(cls, r_min, r_max, n_r, theta_min_deg, theta_max_deg, n_theta):
        return cls(r_min, r_max, n_r, math.radians(theta_min_deg),
                   math.radians(theta_max_deg), n_theta)

    @property
    def shape(self):
        return self.n_r, self.n_theta

    @property
    def dr(self):
        return (self.r_max - self.r_min) / self.n_r

    @property
    def dtheta(self):
        return (self.theta_max - self.theta_min) / self.n_theta

    @property
    def ranges(self):
        return self.r_min + (np.arange(self.n_r) + 0.5) * self.dr

    @property
    def azimuths(self):
        return self.theta_min + (np.arange(self.n_theta) + 0.5) * self.dtheta

    def index_of(self, cell_range, cell_azimuth):
        """Fractional (range, angle) index of a position; cell centers are integers."""
        return ((cell_range - self.r_min) / self.dr - 0.5,
                (cell_azimuth - self.theta_min) / self.dtheta - 0.5)

    def nearest_cell(self, cell_range, cell_azimuth):
        ir, it = self.index_of(cell_range, cell_azimuth)
        return (int(np.clip(round(ir), 0, self.n_r - 1)),
                int(np.clip(round(it), 0, self.n_theta - 1)))

    def center(self, ir, it):
        return (self.r_min + (ir + 0.5) * self.dr,
                self.theta_min + (it + 0.5) * self.dtheta)


@dataclass(frozen=True, eq=False)
class Image:
    grid: PolarGrid
    values: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.values, np.complex128)
        _require(v.shape == self.grid.shape,
                 f"image shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)

    def __add__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        _require(other.grid == self.grid, "cannot add images on different grids")
        return Image(self.grid, self.values + other.values)


def slant_range(target_range, target_azimuth, track_radius, radar_angle):
    """Distance from the radar at ``radar_angle`` on the track to a target.

    Evaluated as ``sqrt((R - r)**2 + 4 r R sin^2(dtheta / 2))``, which equals
    the law-of-cosines form but never goes negative under cancellation.
    Broadcasts over numpy arrays.
    """
    half = np.sin(0.5 * (np.subtract(radar_angle, target_azimuth)))
    diff = np.subtract(target_range, track_radius)
    return np.sqrt(diff * diff + 4.0 * np.multiply(track_radius, target_range) * half * half)


def wavenumber_vector(params):
    """Two-way wavenumbers ``4 pi f_i / c`` of the N fast-time samples."""
    n = params.n_samples
    freqs = params.fc - params.b / 2 + params.b * np.arange(n, dtype=np.float64) / n
    return _frozen_array(4.0 * np.pi * freqs / params.c, np.float64)


def monostatic_valid(params, range, alpha, fraction=MONOSTATIC_FRACTION):
    """True when the Tx/Rx separation is small enough to treat them as co-located.

    ``alpha`` has no fixed value; callers supply it.
    """
    _require(range > 0 and alpha > 0, "range and alpha must be positive")
    return params.d < fraction * math.sqrt(4.0 * alpha * params.wavelength * range)
