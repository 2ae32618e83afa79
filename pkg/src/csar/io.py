"""Capture files, scene configuration documents and image export.

Capture layout (little-endian)::

    offset  size  field
    0       4     magic b"CSAR"
    4       2     format version (uint16)
    6       2     flags (uint16); bit 0 set = float32 payload, else float64
    8       56    fc, b, chirp_time, c, track_radius, theta_start, theta_step (float64)
    64      4     n_samples (uint32)
    68      4     n_angles (uint32)
    72      ...   payload: n_angles chirps of n_samples complex values,
                  each stored as interleaved (real, imag)
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .backprojection import to_db_image
from .core import (Aperture, DataMatrix, PointTarget, PolarGrid, RadarParams, Scene,
                   ValidationError)
from .simulator import AntennaModel, NoiseSpec

MAGIC = b"CSAR"
FORMAT_VERSION = 1
FLAG_FLOAT32 = 0x0001
HEADER = struct.Struct("<4sHH7dII")


class FormatError(Exception):
    """A file could not be parsed."""


class BadMagicError(FormatError):
    pass


class UnsupportedVersionError(FormatError):
    pass


class TruncatedPayloadError(FormatError):
    pass


class NonFiniteSampleError(FormatError):
    pass


def write_capture(data, path, double=False):
    """Write ``data`` as a capture file; float32 payload unless ``double``."""
    step = data.aperture.uniform_step()
    if step is None:
        raise ValidationError("capture files need uniformly spaced angles")
    if not np.all(np.isfinite(data.samples)):
        raise ValidationError("samples must be finite")
    p = data.params
    n, m = data.samples.shape
    header = HEADER.pack(MAGIC, FORMAT_VERSION, 0 if double else FLAG_FLOAT32,
                         p.fc, p.b, p.chirp_time, p.c, data.aperture.radius,
                         float(data.aperture.angles[0]), step, n, m)
    dtype = "<c16" if double else "<c8"
    payload = np.ascontiguousarray(data.samples.T, dtype=dtype)
    if not np.all(np.isfinite(payload)):
        raise ValidationError("samples overflow float32")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def read_capture(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER.size:
        if raw[:4] != MAGIC[:len(raw[:4])]:
            raise BadMagicError(f"{path}: not a capture file")
        raise TruncatedPayloadError(f"{path}: header truncated")
    (magic, version, flags, fc, b, chirp_time, c, radius, start, step,
     n, m) = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise BadMagicError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported format version {version}")
    single = bool(flags & FLAG_FLOAT32)
    itemsize = 8 if single else 16
    expected = n * m * itemsize
    body = raw[HEADER.size:]
    if len(body) < expected:
        raise TruncatedPayloadError(
            f"{path}: payload has {len(body)} bytes, header implies {expected}")
    if len(body) > expected:
        raise FormatError(f"{path}: {len(body) - expected} trailing bytes after payload")
    values = np.frombuffer(body, dtype="<c8" if single else "<c16").astype(np.complex128)
    if not np.all(np.isfinite(values)):
        raise NonFiniteSampleError(f"{path}: payload contains non-finite samples")
    params = RadarParams(fc=fc, b=b, n_samples=n, chirp_time=chirp_time, c=c)
    aperture = Aperture.uniform(radius, start, step, m)
    return DataMatrix(params, aperture, values.reshape(m, n).T)


# -- scene configuration ------------------------------------------------------

BUNDLED = {
    "one-target": "one_target.yaml",
    "paper-exp-1": "paper_exp_1.yaml",
    "paper-exp-2": "paper_exp_2.yaml",
}

_SECTIONS = {"radar", "aperture", "antenna", "noise", "targets", "grid", "design"}
_RADAR_KEYS = {"fc", "b", "n_samples", "chirp_time", "max_range", "c", "d"}
_APERTURE_KEYS = {"radius", "start_deg", "step_deg", "count", "angles_deg"}
_ANTENNA_KEYS = {"kind", "beamwidth_deg", "boresight_offset_deg"}
_NOISE_KEYS = {"snr_db", "seed", "reference_power"}
_TARGET_KEYS = {"range", "azimuth_deg", "magnitude", "dbsm", "phase_deg"}
_GRID_KEYS = {"r_min", "r_max", "n_r", "theta_min_deg", "theta_max_deg", "n_theta"}
_DESIGN_KEYS = {"alpha", "target_range", "exposure_deg", "beamwidth_deg"}


@dataclass(frozen=True)
class SceneConfig:
    params: RadarParams
    aperture: Aperture
    scene: Scene
    antenna: AntennaModel = field(default_factory=AntennaModel)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    grid: PolarGrid | None = None
    design: dict = field(default_factory=dict)


def _section(doc, name, allowed, required=()):
    sec = doc.get(name) or {}
    if not isinstance(sec, dict):
        raise ValidationError(f"[{name}] must be a mapping")
    unknown = set(sec) - allowed
    if unknown:
        raise ValidationError(f"unknown keys in [{name}]: {', '.join(sorted(unknown))}")
    missing = [k for k in required if k not in sec]
    if missing:
        raise ValidationError(f"missing keys in [{name}]: {', '.join(missing)}")
    return sec


def dbsm_to_amplitude(dbsm):
    return 10.0 ** (dbsm / 20.0)


def _target(entry):
    if not isinstance(entry, dict):
        raise ValidationError("each target must be a mapping")
    unknown = set(entry) - _TARGET_KEYS
    if unknown:
        raise ValidationError(f"unknown target keys: {', '.join(sorted(unknown))}")
    if "range" not in entry or "azimuth_deg" not in entry:
        raise ValidationError("targets need range and azimuth_deg")
    if "magnitude" in entry and "dbsm" in entry:
        raise ValidationError("give either magnitude or dbsm for a target, not both")
    if "dbsm" in entry:
        mag = dbsm_to_amplitude(float(entry["dbsm"]))
    else:
        mag = float(entry.get("magnitude", 1.0))
    phase = math.radians(float(entry.get("phase_deg", 0.0)))
    sigma = complex(mag * math.cos(phase), mag * math.sin(phase))
    return PointTarget(float(entry["range"]), math.radians(float(entry["azimuth_deg"])), sigma)


def parse_scene_config(doc):
    """Build a :class:`SceneConfig` from a parsed key/value document."""
    if not isinstance(doc, dict):
        raise ValidationError("scene document must be a mapping")
    unknown = set(doc) - _SECTIONS
    if unknown:
        raise ValidationError(f"unknown sections: {', '.join(sorted(unknown))}")
    radar = _section(doc, "radar", _RADAR_KEYS, ("fc", "b", "n_samples"))
    params = RadarParams(**{k: (int(v) if k == "n_samples" else float(v))
                            for k, v in radar.items()})

    ap = _section(doc, "aperture", _APERTURE_KEYS, ("radius",))
    if "angles_deg" in ap:
        if {"start_deg", "step_deg", "count"} & set(ap):
            raise ValidationError("aperture takes angles_deg or start/step/count, not both")
        aperture = Aperture(float(ap["radius"]), np.radians(np.asarray(ap["angles_deg"], float)))
    else:
        missing = [k for k in ("start_deg", "step_deg", "count") if k not in ap]
        if missing:
            raise ValidationError(f"missing keys in [aperture]: {', '.join(missing)}")
        count = int(ap["count"])
        if count < 1:
            raise ValidationError("aperture count must be >= 1")
        aperture = Aperture.uniform(float(ap["radius"]), math.radians(float(ap["start_deg"])),
                                    math.radians(float(ap["step_deg"])), count)

    ant = _section(doc, "antenna", _ANTENNA_KEYS)
    antenna = AntennaModel(kind=ant.get("kind", "isotropic"),
                           beamwidth_3db=math.radians(float(ant.get("beamwidth_deg", 100.0))),
                           boresight_offset=math.radians(float(ant.get("boresight_offset_deg", 0.0))))

    nz = _section(doc, "noise", _NOISE_KEYS)
    snr = nz.get("snr_db")
    ref = nz.get("reference_power")
    noise = NoiseSpec(snr_db=math.inf if snr is None else float(snr),
                      seed=int(nz.get("seed", 0)),
                      reference_power=None if ref is None else float(ref))

    targets = doc.get("targets") or []
    if not isinstance(targets, list):
        raise ValidationError("targets must be a list")
    scene = Scene([_target(t) for t in targets])

    grid = None
    if doc.get("grid") is not None:
        g = _section(doc, "grid", _GRID_KEYS, tuple(sorted(_GRID_KEYS)))
        grid = PolarGrid.from_degrees(float(g["r_min"]), float(g["r_max"]), int(g["n_r"]),
                                      float(g["theta_min_deg"]), float(g["theta_max_deg"]),
                                      int(g["n_theta"]))
    design = dict(_section(doc, "design", _DESIGN_KEYS))
    return SceneConfig(params, aperture, scene, antenna, noise, grid, design)


def load_scene_config(source):
    """Load a scene from a file path or the name of a bundled scene."""
    if str(source) in BUNDLED:
        text = resources.files("csar").joinpath("scenes", BUNDLED[str(source)]).read_text()
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise FormatError(f"cannot read scene {source}: {exc.strerror}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise FormatError(f"scene {source} is not valid YAML: {exc}") from exc
    return parse_scene_config(doc)


# -- image export -------------------------------------------------------------

def _grid_header(grid):
    return (f"r_min={grid.r_min!r},r_max={grid.r_max!r},n_r={grid.n_r},"
            f"theta_min_deg={math.degrees(grid.theta_min)!r},"
            f"theta_max_deg={math.degrees(grid.theta_max)!r},n_theta={grid.n_theta}")


def export_image(image, fmt, floor_db, path):
    """Write the dB image as an 8-bit PGM or a CSV with one row per range cell."""
    db = to_db_image(image, floor_db)
    if fmt == "pgm":
        pix = np.rint((db - floor_db) / (-floor_db) * 255.0)
        pix = np.clip(pix, 0, 255).astype(np.uint8)
        head = f"P5\n# {_grid_header(image.grid)}\n{pix.shape[1]} {pix.shape[0]}\n255\n"
        with open(path, "wb") as fh:
            fh.write(head.encode("ascii"))
            fh.write(pix.tobytes())
    elif fmt == "csv":
        with open(path, "w", newline="\n") as fh:
            fh.write(f"# {_grid_header(image.grid)}\n")
            for row in db:
                fh.write(",".join(repr(float(v)) for v in row))
                fh.write("\n")
    else:
        raise ValidationError(f"unknown image format {fmt!r}")


def read_image_csv(path):
    """Inverse of the CSV export: returns ``(grid, db_matrix)``."""
    try:
        with open(path) as fh:
            header = fh.readline()
            body = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    if not header.startswith("#"):
        raise FormatError(f"{path}: missing grid header line")
    try:
        fields = dict(item.split("=", 1) for item in header[1:].strip().split(","))
        grid = PolarGrid.from_degrees(float(fields["r_min"]), float(fields["r_max"]),
                                      int(fields["n_r"]), float(fields["theta_min_deg"]),
                                      float(fields["theta_max_deg"]), int(fields["n_theta"]))
        rows = [line for line in body.splitlines() if line.strip()]
        db = np.array([[float(v) for v in line.split(",")] for line in rows])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}: malformed image csv ({exc})") from exc
    if db.shape != grid.shape:
        raise FormatError(f"{path}: body is {db.shape}, header declares {grid.shape}")
    return grid, db


def read_pgm(path):
    """Minimal P5 reader for the files written by :func:`export_image`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            pos = raw.index(b"\n", pos) + 1
            continue
        end = pos
        while not raw[end:end + 1].isspace():
            end += 1
        tokens.append(raw[pos:end])
        pos = end
    if tokens[0] != b"P5":
        raise FormatError(f"{path}: not a binary PGM")
    width, height = int(tokens[1]), int(tokens[2])
    pos += 1
    return np.frombuffer(raw[pos:pos + width * height], dtype=np.uint8).reshape(height, width)
