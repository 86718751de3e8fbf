"""Tests for domains, membership, validation and scene files."""

import math

import numpy as np
import pytest

from sweepchi.core.errors import (
    OnBoundary,
    SceneNotFound,
    SceneParseError,
    SceneValidationError,
)
from sweepchi.services.catalog import get_scene, scene_names
from sweepchi.services.curves import BoundaryCurve, FourierSeries
from sweepchi.services.domain import (
    Domain,
    Scene,
    dump_scene,
    load_scene,
    scene_to_file,
    validate_domain,
)
from sweepchi.services.surfaces import Plane, Torus


def _disk(**overrides) -> Domain:
    fields = {
        "surface": Plane(),
        "boundaries": (BoundaryCurve.circle((0.0, 0.0), 1.0),),
        "seed": (0.0, 0.0),
        "reference_chi": 1,
    }
    fields.update(overrides)
    return Domain(**fields)


class TestMembership:
    """Tests for point membership."""

    def test_disk(self):
        """Test points inside and outside the unit disk."""
        domain = _disk()
        inside = domain.contains_many([[0.0, 0.0], [0.5, 0.5], [1.2, 0.0], [0.0, -0.99]])
        np.testing.assert_array_equal(inside, [True, True, False, True])

    def test_annulus_center_is_outside(self, scene):
        """Test the hole of the annulus is not part of D."""
        domain = scene("annulus").domain
        assert not domain.contains([0.0, 0.0])
        assert domain.contains([0.0, 1.5])
        assert not domain.contains([2.5, 0.0])

    def test_point_on_boundary_raises(self):
        """Test a point on the boundary circle is reported as such."""
        with pytest.raises(OnBoundary):
            _disk().contains([1.0, 0.0])

    def test_closed_surface_contains_everything(self):
        """Test the whole torus contains any point, wrapped or not."""
        domain = Domain(Torus(), (), (0.0, 0.0), 0)
        assert domain.contains([10.0, -3.0])

    def test_torus_minus_disk_across_the_seam(self, scene):
        """Test membership near the hole, which straddles t = 0."""
        domain = scene("torus-minus-disk").domain
        assert not domain.contains([math.pi, 0.0])
        assert not domain.contains([math.pi, 2 * math.pi - 0.2])
        assert domain.contains([math.pi, 2 * math.pi - 0.8])
        assert domain.contains([0.0, 0.0])

    def test_band_rows(self, scene):
        """Test the spherical band contains its equator and not the polar regions."""
        domain = scene("band").domain
        inside = domain.contains_many([[1.0, 0.0], [4.0, 0.4], [1.0, 1.0], [2.0, -1.0]])
        np.testing.assert_array_equal(inside, [True, True, False, False])

    @pytest.mark.parametrize("name", ["annulus", "disk-2-holes", "torus-minus-disk"])
    def test_membership_is_locally_constant(self, name, scene, rng):
        """Test a 1e-7 nudge changes membership only right next to a boundary."""
        domain = scene(name).domain
        (s0, s1), (t0, t1) = domain.surface.bounds
        points = np.column_stack([rng.uniform(s0, s1, 1000), rng.uniform(t0, t1, 1000)])
        angle = rng.uniform(0.0, 2 * math.pi, 1000)
        nudged = points + 1e-7 * np.column_stack([np.cos(angle), np.sin(angle)])
        changed = np.flatnonzero(domain.contains_many(points) != domain.contains_many(nudged))
        for k in changed:
            assert domain.distance_to_boundary(points[k]) < 1e-6


class TestRowScan:
    """Tests for boundary crossings along coordinate lines."""

    def test_annulus_intervals(self, scene):
        """Test the row t = 0 of the annulus meets D in two intervals."""
        scan = scene("annulus").domain.row_scan(0.0)
        np.testing.assert_allclose(scan.crossings, [-2.0, -1.0, 1.0, 2.0], atol=1e-12)
        intervals = scan.intervals()
        np.testing.assert_allclose(intervals, [(-2.0, -1.0), (1.0, 2.0)], atol=1e-12)

    def test_column_scan(self):
        """Test a column scan through the disk."""
        scan = _disk().row_scan(0.6, axis=0)
        np.testing.assert_allclose(scan.crossings, [-0.8, 0.8], atol=1e-12)
        np.testing.assert_array_equal(scan.contains([-0.9, 0.0, 0.9]), [False, True, False])

    def test_row_scans_match_single_scans(self):
        """Test the batched scan agrees with one scan per level."""
        domain = _disk()
        levels = [-0.5, 0.0, 0.7]
        for batched, level in zip(domain.row_scans(levels), levels, strict=True):
            np.testing.assert_allclose(batched.crossings, domain.row_scan(level).crossings)


class TestCrossings:
    """Tests for distances and crossing parity."""

    def test_distance_to_boundary(self):
        """Test the distance from an interior point to the unit circle."""
        assert _disk().distance_to_boundary([0.3, 0.4]) == pytest.approx(0.5, abs=1e-9)

    def test_distance_across_the_wrap(self, scene):
        """Test distances use the shortest image on the torus."""
        domain = scene("torus-minus-disk").domain
        assert domain.distance_to_boundary([math.pi, 2 * math.pi - 1.0]) == pytest.approx(
            0.5, abs=1e-9
        )

    def test_crossing_parity_through_annulus(self, scene):
        """Test a straight path through the annulus crosses the boundary four times."""
        domain = scene("annulus").domain
        assert domain.crossing_parity([[-2.5, 0.1], [2.5, 0.1]]) == 0
        assert domain.crossing_parity([[0.0, 0.0], [0.0, 1.5]]) == 1

    def test_parity_is_path_independent(self, scene):
        """Test two paths between the same points agree on crossing parity."""
        domain = scene("disk-2-holes").domain
        straight = [[0.0, 1.2], [0.9, 0.0]]
        detour = [[0.0, 1.2], [-1.5, 1.2], [-1.5, -1.0], [0.9, -1.0], [0.9, 0.0]]
        assert domain.crossing_parity(straight) == domain.crossing_parity(detour)

    def test_parity_agrees_with_membership(self, scene, rng):
        """Test parity from the seed decides membership on the torus."""
        domain = scene("torus-minus-disk").domain
        for point in rng.uniform(0.0, 2 * math.pi, size=(20, 2)):
            if domain.distance_to_boundary(point) < 1e-3:
                continue
            inside = domain.crossing_parity([domain.seed, point]) == 0
            assert inside == domain.contains(point)


class TestValidation:
    """Tests for scene invariants."""

    def test_catalog_scenes_validate(self):
        """Test every catalog scene passes validation."""
        for name in scene_names():
            get_scene(name)

    def test_flipped_orientation(self):
        """Test a clockwise outer boundary fails the orientation check."""
        domain = _disk(boundaries=(BoundaryCurve.circle((0.0, 0.0), 1.0, clockwise=True),))
        with pytest.raises(SceneValidationError, match="orientation check failed"):
            validate_domain(domain)

    def test_seed_outside_rectangle(self):
        """Test a seed off the chart is rejected."""
        with pytest.raises(SceneValidationError, match="seed outside"):
            validate_domain(_disk(seed=(10.0, 0.0)))

    def test_seed_on_boundary(self):
        """Test a seed on the boundary is rejected."""
        with pytest.raises(SceneValidationError, match="seed is not strictly inside"):
            validate_domain(_disk(seed=(1.0, 0.0)))

    def test_boundary_leaves_chart(self):
        """Test a circle larger than the chart is rejected."""
        domain = _disk(boundaries=(BoundaryCurve.circle((0.0, 0.0), 3.5),))
        with pytest.raises(SceneValidationError, match="leaves the parameter rectangle"):
            validate_domain(domain)

    def test_self_intersection(self):
        """Test a figure eight is rejected."""
        # s = cos(tau + 0.1), t = sin(2 tau + 0.2) / 2, crossing itself off the sample grid
        eight = BoundaryCurve(
            s=FourierSeries(cos=(math.cos(0.1),), sin=(-math.sin(0.1),)),
            t=FourierSeries(cos=(0.0, 0.5 * math.sin(0.2)), sin=(0.0, 0.5 * math.cos(0.2))),
        )
        with pytest.raises(SceneValidationError, match="self-intersection"):
            validate_domain(_disk(boundaries=(eight,), seed=(0.5, 0.1)))

    def test_boundaries_intersect(self):
        """Test overlapping circles are rejected."""
        boundaries = (
            BoundaryCurve.circle((0.0, 0.0), 1.0),
            BoundaryCurve.circle((0.5, 0.0), 1.0),
        )
        with pytest.raises(SceneValidationError, match="boundaries intersect"):
            validate_domain(_disk(boundaries=boundaries, seed=(-0.8, 0.0)))

    def test_unbounded_domain(self):
        """Test the outside of a hole reaches the edge of the plane chart."""
        domain = _disk(
            boundaries=(BoundaryCurve.circle((0.0, 0.0), 1.0, clockwise=True),),
            seed=(2.0, 2.0),
        )
        with pytest.raises(SceneValidationError, match="edge of the chart"):
            validate_domain(domain)

    def test_singular_curve(self):
        """Test a curve with zero velocity is not regular."""
        point = BoundaryCurve(s=FourierSeries(mean=0.1), t=FourierSeries(mean=0.2))
        with pytest.raises(SceneValidationError, match="not regular"):
            validate_domain(_disk(boundaries=(point,)))


class TestSceneFiles:
    """Tests for reading and writing scene files."""

    def test_round_trip(self, tmp_path):
        """Test a dumped scene loads back unchanged."""
        original = get_scene("torus-minus-disk")
        path = dump_scene(original, tmp_path / "scene.json")
        loaded = load_scene(path)
        assert loaded.name == original.name
        assert loaded.domain.boundaries == original.domain.boundaries
        assert loaded.domain.reference_chi == -1
        assert scene_to_file(loaded) == scene_to_file(original)

    def test_missing_file(self, tmp_path):
        """Test a missing scene file."""
        with pytest.raises(SceneNotFound):
            load_scene(tmp_path / "nope.json")

    def test_empty_file(self, tmp_path):
        """Test an empty file does not parse."""
        path = tmp_path / "empty.json"
        path.write_text("")
        with pytest.raises(SceneParseError):
            load_scene(path)

    def test_unknown_surface(self, tmp_path):
        """Test an unknown surface kind does not parse."""
        path = tmp_path / "cone.json"
        path.write_text('{"name": "x", "surface": {"kind": "cone"}, "seed": [0, 0]}')
        with pytest.raises(SceneParseError):
            load_scene(path)

    def test_invalid_geometry_is_a_validation_error(self, tmp_path):
        """Test a scene that parses but has a flipped boundary."""
        flipped = _disk(boundaries=(BoundaryCurve.circle((0.0, 0.0), 1.0, clockwise=True),))
        path = dump_scene(Scene("flipped", flipped), tmp_path / "flipped.json")
        with pytest.raises(SceneValidationError, match="orientation"):
            load_scene(path)
