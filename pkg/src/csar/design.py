"""Closed-form design quantities: resolution, angular sampling, range migration."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import SPEED_OF_LIGHT, ValidationError, monostatic_valid, slant_range


@dataclass(frozen=True)
class DesignReport:
    delta_r: float
    delta_theta_max: float
    angular_resolution: float
    rcm_extent: float
    monostatic_ok: bool

    def rows(self):
        """(name, value, unit) triples for delimited output."""
        return [
            ("delta_r", self.delta_r, "m"),
            ("delta_theta_max", self.delta_theta_max, "rad"),
            ("delta_theta_max_deg", math.degrees(self.delta_theta_max), "deg"),
            ("angular_resolution", self.angular_resolution, "rad"),
            ("angular_resolution_deg", math.degrees(self.angular_resolution), "deg"),
            ("rcm_extent", self.rcm_extent, "m"),
            ("rcm_over_delta_r", self.rcm_extent / self.delta_r, "1"),
            ("monostatic_ok", self.monostatic_ok, "bool"),
        ]


def range_resolution(params):
    if not params.b > 0:
        raise ValidationError("range resolution needs a positive bandwidth")
    return params.c / (2.0 * params.b)


def max_angular_spacing(track_radius, f_min, f_max, c=SPEED_OF_LIGHT):
    """Largest angular step that keeps the aperture Nyquist-sampled at any target azimuth."""
    if not (f_max > f_min and track_radius > 0):
        raise ValidationError("need f_max > f_min and a positive track radius")
    return c / (track_radius * (f_max - f_min))


def angular_spacing_at(track_radius, f_min, f_max, target_azimuth, c=SPEED_OF_LIGHT):
    """Angular step bound for a target at ``target_azimuth``.

    Raises ``ValidationError`` where ``sin(2 * azimuth)`` vanishes: the bound
    places no constraint there.
    """
    s = abs(math.sin(2.0 * target_azimuth))
    if s < 1e-12:
        raise ValidationError("angular spacing bound is unconstrained at this azimuth")
    return max_angular_spacing(track_radius, f_min, f_max, c) / s


def kx_span(params, target_azimuth):
    """Extent of the x-wavenumber ``k cos(azimuth)`` over the sweep (paraxial model)."""
    return 4.0 * math.pi * params.b / params.c * abs(math.cos(target_azimuth))


def angular_resolution(params, track_radius, beamwidth_3db):
    """``lambda / (2 r theta)`` for an aperture exposed over ``beamwidth_3db`` radians."""
    if not beamwidth_3db > 0:
        raise ValidationError("beamwidth must be positive")
    return params.wavelength / (2.0 * track_radius * beamwidth_3db)


def rcm_extent(target_range, track_radius, exposure):
    """Spread of the slant range over an exposure centered on the target azimuth."""
    if not 0 <= exposure <= 2 * math.pi:
        raise ValidationError("exposure must lie in [0, 2*pi]")
    half = min(exposure / 2.0, math.pi)
    return float(slant_range(target_range, 0.0, track_radius, half)
                 - slant_range(target_range, 0.0, track_radius, 0.0))


def design_report(params, track_radius, beamwidth_3db, target_range, exposure=None, alpha=1.0):
    if exposure is None:
        exposure = beamwidth_3db
    return DesignReport(
        delta_r=range_resolution(params),
        delta_theta_max=max_angular_spacing(track_radius, params.f_min, params.f_max, params.c),
        angular_resolution=angular_resolution(params, track_radius, beamwidth_3db),
        rcm_extent=rcm_extent(target_range, track_radius, exposure),
        monostatic_ok=monostatic_valid(params, target_range, alpha),
    )
