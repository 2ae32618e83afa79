import math

import numpy as np
import pytest

from csar import Aperture, PointTarget, PolarGrid, Scene, reconstruct_image, simulate_scene, \
    to_db_image
from csar import design as dc
from csar.metrics import (LobeTruncatedError, find_peak, mainlobe_width, peak_separation,
                          peak_sidelobe_ratio, psf_report, resolve_pair,
                          sidelobe_energy_fraction, two_target_resolved)


def test_find_peak_tie_break_and_single_cell():
    assert find_peak(np.zeros((3, 4))) == ((0, 0), 0.0)
    a = np.full((5, 6), -120.0)
    a[3, 2] = 0.0
    assert find_peak(a) == ((3, 2), 0.0)
    a[1, 5] = 0.0
    assert find_peak(a)[0] == (1, 5)


def test_find_peak_affine_invariant(rng):
    a = rng.normal(size=(20, 30))
    assert find_peak(a)[0] == find_peak(2.5 * a - 40.0)[0]


def test_plateau_width_is_two_cells():
    g = PolarGrid(0.0, 1.0, 10, 0.0, 1.0, 12)
    a = np.full((10, 12), -6.0)
    a[4:6, 5] = 0.0
    assert mainlobe_width(a, g, "range") == pytest.approx(2 * g.dr)
    assert mainlobe_width(a.T.copy(), PolarGrid(0.0, 1.0, 12, 0.0, 1.0, 10), "angle") \
        == pytest.approx(2 * 0.1)


def test_plateau_width_against_deep_floor():
    # Center-sampled interpolation puts the crossings just outside the two cells.
    g = PolarGrid(0.0, 1.0, 10, 0.0, 1.0, 12)
    a = np.full((10, 12), -120.0)
    a[4:6, 5] = 0.0
    assert mainlobe_width(a, g, "range") == pytest.approx((1 + 2 * 3 / 120) * g.dr)


def test_width_offset_invariant(rng):
    g = PolarGrid(0.0, 1.0, 31, 0.0, 1.0, 31)
    x = np.arange(31) - 15.3
    a = 20 * np.log10(np.abs(np.sinc(x / 5))[:, None] * np.abs(np.sinc(x / 3))[None, :] + 1e-9)
    w = mainlobe_width(a, g, "range")
    assert mainlobe_width(a - 17.0, g, "range") == pytest.approx(w)


def test_width_truncated_lobe():
    g = PolarGrid(0.0, 1.0, 5, 0.0, 1.0, 5)
    a = np.zeros((5, 5))
    with pytest.raises(LobeTruncatedError):
        mainlobe_width(a, g, "range")


def test_sinc_width_and_pslr():
    g = PolarGrid(0.0, 1.0, 401, 0.0, 1.0, 3)
    x = (np.arange(401) - 200) / 20.0
    a = np.repeat((20 * np.log10(np.abs(np.sinc(x)) + 1e-12))[:, None], 3, axis=1)
    a[:, 0] -= 50
    a[:, 2] -= 50
    # sinc -3 dB full width is 0.8859 in units of x; linear dB interpolation reads ~0.3% short
    assert mainlobe_width(a, g, "range", peak=(200, 1)) == pytest.approx(0.8859 * 20 * g.dr, rel=5e-3)
    assert peak_sidelobe_ratio(a[:, 1:2]) == pytest.approx(-13.26, abs=0.05)


@pytest.fixture(scope="module")
def psf_100deg(paper_params):
    """Isotropic single target seen over a 100 deg aperture centered on it."""
    ap = Aperture.uniform(0.13, math.radians(-5.0), math.radians(0.2), 500)
    d = simulate_scene(paper_params, ap, Scene([PointTarget(2.0, math.radians(45.0), 1.0)]))
    g = PolarGrid.from_degrees(1.85, 2.15, 30, 42.0, 48.0, 60)
    return g, to_db_image(reconstruct_image(d, g))


def test_measured_widths_against_formulas(psf_100deg, paper_params):
    g, db = psf_100deg
    rng_w = mainlobe_width(db, g, "range")
    ang_w = mainlobe_width(db, g, "angle")
    assert rng_w == pytest.approx(dc.range_resolution(paper_params), rel=0.30)
    assert ang_w == pytest.approx(8.36e-3, rel=0.30)
    rep = psf_report(db, g)
    assert rep.pslr_db <= 0 and rep.mainlobe_width_range == rng_w
    r, t = g.center(*rep.peak_cell)
    assert abs(r - 2.0) <= g.dr and abs(t - math.radians(45.0)) <= g.dtheta


def _two_target_image(paper_params, targets, grid):
    ap = Aperture.uniform(0.13, math.radians(-45.0), math.radians(0.4), 450)
    d = simulate_scene(paper_params, ap, Scene(targets))
    return to_db_image(reconstruct_image(d, grid))


def test_coincident_targets_not_resolved(paper_params):
    g = PolarGrid.from_degrees(1.8, 2.2, 40, 43.0, 47.0, 40)
    t = PointTarget(2.0, math.radians(45.0), 1.0)
    db = _two_target_image(paper_params, [t, t], g)
    pos = (2.0, math.radians(45.0))
    assert not two_target_resolved(db, g, pos, pos)


def test_well_separated_in_range_resolved(paper_params):
    dr = dc.range_resolution(paper_params)
    g = PolarGrid.from_degrees(1.6, 2.5, 90, 43.0, 47.0, 40)
    a = (1.8, math.radians(45.0))
    b = (1.8 + 10 * dr, math.radians(45.0))
    db = _two_target_image(paper_params, [PointTarget(*a), PointTarget(*b)], g)
    res = resolve_pair(db, g, a, b)
    assert res.resolved
    assert two_target_resolved(db, g, b, a)
    assert peak_separation(g, res.peak_a, res.peak_b) == pytest.approx(10 * dr, abs=2 * g.dr)


def test_resolvability_symmetric(rng):
    g = PolarGrid(0.0, 1.0, 40, 0.0, 1.0, 40)
    for _ in range(20):
        a = rng.normal(size=(40, 40))
        p = (rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9))
        q = (rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9))
        thr = rng.uniform(0.0, 2.0)
        assert two_target_resolved(a, g, p, q, thr) == two_target_resolved(a, g, q, p, thr)


def test_sidelobe_energy_fraction():
    g = PolarGrid(0.0, 1.0, 10, 0.0, 1.0, 10)
    v = np.zeros((10, 10))
    v[5, 5] = 3.0
    assert sidelobe_energy_fraction(v, g, g.center(5, 5), 0.01, 0.01) == 0.0
    v[0, 0] = 3.0
    assert sidelobe_energy_fraction(v, g, g.center(5, 5), 0.01, 0.01) == pytest.approx(0.5)
