"""Forward model: raw beat-signal matrices for point scenes on a circular track."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DataMatrix, ValidationError, slant_range, wavenumber_vector

ISOTROPIC = "isotropic"
GATED_COSINE = "gated_cosine"


@dataclass(frozen=True)
class AntennaModel:
    """Azimuth pattern of an antenna held at a fixed angle to the track.

    ``boresight_offset`` is measured from the outward radial direction.
    """

    kind: str = ISOTROPIC
    beamwidth_3db: float = math.radians(100.0)
    boresight_offset: float = 0.0

    def __post_init__(self):
        if self.kind not in (ISOTROPIC, GATED_COSINE):
            raise ValidationError(f"unknown antenna kind {self.kind!r}")
        if self.kind == GATED_COSINE and not self.beamwidth_3db > 0:
            raise ValidationError("beamwidth_3db must be positive")


@dataclass(frozen=True)
class NoiseSpec:
    """Additive complex Gaussian noise.

    ``snr_db`` is relative to the mean per-sample signal power of the data,
    or to ``reference_power`` when that is given.
    """

    snr_db: float = math.inf
    seed: int = 0
    reference_power: float | None = None


def _wrap(angle):
    return (angle + np.pi) % (2 * np.pi) - np.pi


def antenna_weight(antenna, radar_angle, target_bearing_from_radar):
    """Amplitude weight of the antenna toward a target.

    The gated cosine is ``cos(p * delta)`` with ``p`` putting the -3 dB point
    at half the beamwidth; it reaches zero at one full beamwidth and stays
    zero beyond. Broadcasts over arrays.
    """
    if antenna.kind == ISOTROPIC:
        return np.ones_like(np.add(radar_angle, target_bearing_from_radar), dtype=np.float64)
    delta = np.abs(_wrap(np.subtract(target_bearing_from_radar,
                                     np.add(radar_angle, antenna.boresight_offset))))
    p = np.pi / (2.0 * antenna.beamwidth_3db)
    return np.where(delta <= antenna.beamwidth_3db, np.cos(p * delta), 0.0)


def bearing_from_radar(target, track_radius, radar_angle):
    tx, ty = target.xy
    return np.arctan2(ty - track_radius * np.sin(radar_angle),
                      tx - track_radius * np.cos(radar_angle))


def simulate_chirp(params, k, slant, reflectivity):
    """One dechirped sweep: ``reflectivity * exp(+j k_i R)``."""
    return complex(reflectivity) * np.exp(1j * (np.asarray(k) * slant))


def simulate_scene(params, aperture, scene, antenna=None, noise=None):
    """Superpose the echoes of every target over every collection angle."""
    antenna = antenna or AntennaModel()
    if aperture is None or aperture.size < 1:
        raise ValidationError("aperture must contain at least one angle")
    k = wavenumber_vector(params)
    angles = aperture.angles
    samples = np.zeros((params.n_samples, aperture.size), dtype=np.complex128)
    for target in scene.targets:
        slant = slant_range(target.range, target.azimuth, aperture.radius, angles)
        echo = target.reflectivity * np.exp(1j * np.outer(k, slant))
        if antenna.kind != ISOTROPIC:
            bearing = bearing_from_radar(target, aperture.radius, angles)
            echo *= antenna_weight(antenna, angles, bearing)[np.newaxis, :]
        samples += echo
    data = DataMatrix(params, aperture, samples)
    if noise is not None:
        data = add_noise(data, noise)
    return data


def add_noise(data, noise):
    """Add circularly-symmetric complex Gaussian noise.

    Column ``m`` draws from its own stream spawned from ``noise.seed``, so the
    result does not depend on how columns are scheduled.
    """
    if math.isinf(noise.snr_db) and noise.snr_db > 0:
        return data
    power = noise.reference_power
    if power is None:
        power = float(np.mean(np.abs(data.samples) ** 2))
    variance = power / 10.0 ** (noise.snr_db / 10.0)
    scale = math.sqrt(variance / 2.0)
    n, m = data.samples.shape
    streams = np.random.SeedSequence(noise.seed).spawn(m)
    out = np.array(data.samples)
    for col, seq in enumerate(streams):
        rng = np.random.default_rng(seq)
        draw = rng.standard_normal((2, n))
        out[:, col] += scale * (draw[0] + 1j * draw[1])
    return data.with_samples(out)
