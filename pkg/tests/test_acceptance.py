"""Whole-catalog checks over many seeded directions.

Marked slow; run with ``pytest -m slow``.
"""

import numpy as np
import pytest

from sweepchi.services.catalog import scene_names
from sweepchi.services.geometry import random_direction
from sweepchi.services.oracle import census_from_result, chi_cell_complex, chi_gauss_bonnet
from sweepchi.services.special import chi_planar, chi_sphere_meridians, chi_sphere_parallels
from sweepchi.services.sweep import sweep

pytestmark = pytest.mark.slow

Z = np.array([0.0, 0.0, 1.0])


@pytest.mark.parametrize("name", scene_names())
def test_catalog_exactness(name, scene):
    """Test 100 random directions all give the reference value, with coherent signs."""
    domain = scene(name).domain
    rng = np.random.default_rng(2024)
    for _ in range(100):
        result = sweep(domain, random_direction(rng), rng)
        assert result.chi() == domain.reference_chi
        for event in result.events:
            if event.is_interior:
                assert np.sign(event.hessian_det) == np.sign(event.gauss_curvature)
            else:
                assert np.sign(event.height_acceleration) == np.sign(
                    event.quantity
                ) * np.sign(event.normal_alignment)


@pytest.mark.parametrize("name", scene_names())
def test_oracles_agree(name, scene, rng):
    """Test sweep, census, cell complex and Gauss-Bonnet agree."""
    domain = scene(name).domain
    cells = chi_cell_complex(domain, 512)
    integral = chi_gauss_bonnet(domain, 32)
    result = sweep(domain, random_direction(rng), rng)
    assert cells.chi == domain.reference_chi
    assert integral == pytest.approx(cells.chi, abs=1e-4)
    assert result.chi() == cells.chi
    assert census_from_result(result).chi == cells.chi


@pytest.mark.parametrize("name", ["disk", "annulus", "disk-2-holes", "two-disks"])
def test_planar_equivalence(name, scene):
    """Test the planar count against the general sweep over 50 in-plane directions."""
    domain = scene(name).domain
    rng = np.random.default_rng(50)
    for _ in range(50):
        angle = rng.uniform(0.0, 2 * np.pi)
        u = np.array([np.cos(angle), np.sin(angle), 0.0])
        assert chi_planar(domain, u, rng) == sweep(domain, u, rng).chi()


@pytest.mark.parametrize("name", ["cap", "cap-complement", "band"])
def test_sphere_equivalence(name, scene):
    """Test both spherical counts against the general sweep over 50 directions."""
    domain = scene(name).domain
    rng = np.random.default_rng(51)
    for _ in range(50):
        u = random_direction(rng)
        expected = sweep(domain, u, rng).chi()
        assert chi_sphere_parallels(domain, u, rng) == expected
        assert chi_sphere_meridians(domain, u, rng) == expected


@pytest.mark.parametrize(("name", "expected"), [("torus", 0), ("cap", 1)])
def test_axis_recovery(name, expected, scene):
    """Test the axis direction is rejected once and recovered within three retries."""
    domain = scene(name).domain
    for seed in range(100):
        result = sweep(domain, Z, np.random.default_rng(seed))
        assert 1 <= result.report.retries <= 3
        assert result.report.reasons[0].startswith("attempt 0")
        assert result.chi() == expected


@pytest.mark.parametrize("name", scene_names())
def test_resolution_stability(name, scene, settings):
    """Test doubling the seed grid and boundary samples changes no event count."""
    fine = settings.model_copy(
        update={"grid": 2 * settings.grid, "samples": 2 * settings.samples}
    )
    coarse_domain = scene(name).domain
    fine_domain = scene(name, fine).domain
    rng = np.random.default_rng(20)
    for _ in range(20):
        u = random_direction(rng)
        coarse = sweep(coarse_domain, u, np.random.default_rng(0), settings)
        refined = sweep(fine_domain, u, np.random.default_rng(0), fine)
        assert len(coarse.interior) == len(refined.interior)
        assert len(coarse.boundary) == len(refined.boundary)
