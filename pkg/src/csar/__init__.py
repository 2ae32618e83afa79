"""Circular synthetic aperture imaging with a single-channel FMCW radar."""

from .backprojection import (reconstruct_cell, reconstruct_image, steering_column,
                             to_db_image)
from .core import (SPEED_OF_LIGHT, Aperture, DataMatrix, Image, PointTarget, PolarGrid,
                   RadarParams, Scene, ValidationError, monostatic_valid, slant_range,
                   wavenumber_vector)
from .simulator import (AntennaModel, NoiseSpec, add_noise, antenna_weight, simulate_chirp,
                        simulate_scene)

__version__ = "0.1.0"

__all__ = [
    "SPEED_OF_LIGHT", "Aperture", "AntennaModel", "DataMatrix", "Image", "NoiseSpec",
    "PointTarget", "PolarGrid", "RadarParams", "Scene", "ValidationError", "add_noise",
    "antenna_weight", "monostatic_valid", "reconstruct_cell", "reconstruct_image",
    "simulate_chirp", "simulate_scene", "slant_range", "steering_column", "to_db_image",
    "wavenumber_vector",
]
