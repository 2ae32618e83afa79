import math

import numpy as np
import pytest

from csar import Aperture, PointTarget, RadarParams, Scene, simulate_scene

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def paper_params():
    return RadarParams(fc=79e9, b=3.49e9, n_samples=128, chirp_time=68.8e-6, max_range=5.5)


@pytest.fixture(scope="session")
def paper_aperture():
    """180 deg of track at 0.2 deg steps, centered on 45 deg."""
    return Aperture.uniform(0.13, math.radians(-45.0), math.radians(0.2), 900)


@pytest.fixture(scope="session")
def one_target_data(paper_params, paper_aperture):
    scene = Scene([PointTarget(2.0, math.radians(45.0), 1.0)])
    return simulate_scene(paper_params, paper_aperture, scene)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_small_case(rng, n_targets=None):
    """Small random geometry: N <= 32, M <= 64."""
    n = int(rng.integers(2, 33))
    m = int(rng.integers(1, 65))
    fc = float(rng.uniform(20e9, 90e9))
    params = RadarParams(fc=fc, b=float(rng.uniform(0.05, 0.9) * fc * 0.1), n_samples=n)
    step = math.radians(float(rng.uniform(0.05, 3.0)))
    aperture = Aperture.uniform(float(rng.uniform(0.02, 0.5)),
                                float(rng.uniform(-math.pi, math.pi)), step, m)
    count = int(rng.integers(0, 4)) if n_targets is None else n_targets
    targets = [PointTarget(float(rng.uniform(0.0, 6.0)), float(rng.uniform(-math.pi, math.pi)),
                           complex(rng.normal(), rng.normal()))
               for _ in range(count)]
    return params, aperture, Scene(targets)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
