"""Tests for surface and curve geometry."""

import math

import numpy as np
import pytest

from sweepchi.core.errors import NonTransverseSection, ProjectionUndefined
from sweepchi.models.records import SphericalCoords
from sweepchi.services.catalog import catalog, scene_names
from sweepchi.services.curves import BoundaryCurve
from sweepchi.services.geometry import (
    as_direction,
    curve_frames,
    curve_geometry,
    curve_jet,
    from_spherical,
    orthonormal_frame,
    pullback,
    random_direction,
    section_curve_curvature,
    spherical_coords,
    surface_geometry,
    tangential_projection,
)
from sweepchi.services.surfaces import Ellipsoid, Plane, Sphere, Torus

FD_STEP = 1e-5


def _sample_points(surface, rng, count):
    (s0, s1), (t0, t1) = surface.bounds
    # stay clear of the chart edges
    s = rng.uniform(s0 + 0.05 * (s1 - s0), s1 - 0.05 * (s1 - s0), count)
    t = rng.uniform(t0 + 0.05 * (t1 - t0), t1 - 0.05 * (t1 - t0), count)
    return s, t


def _relative_error(analytic, numeric):
    scale = np.maximum(1.0, np.linalg.norm(analytic, axis=-1))
    return np.max(np.linalg.norm(analytic - numeric, axis=-1) / scale)


class TestDirections:
    """Tests for direction normalization and frames."""

    def test_planar_direction_gets_zero_z(self):
        """Test a 2-component direction is lifted into the plane z = 0."""
        np.testing.assert_allclose(as_direction([3.0, 4.0]), [0.6, 0.8, 0.0])

    def test_zero_direction_rejected(self):
        """Test a zero direction raises."""
        with pytest.raises(ValueError, match="non-zero"):
            as_direction([0.0, 0.0])

    def test_wrong_length_rejected(self):
        """Test a direction with four components raises."""
        with pytest.raises(ValueError, match="2 or 3"):
            as_direction([1.0, 0.0, 0.0, 0.0])

    def test_frame_is_right_handed(self, rng):
        """Test (e1, e2, u) is a right-handed orthonormal frame."""
        for _ in range(20):
            u = random_direction(rng)
            e1, e2 = orthonormal_frame(u)
            np.testing.assert_allclose(np.cross(e1, e2), u, atol=1e-12)
            assert abs(np.dot(e1, u)) < 1e-12

    def test_random_direction_is_unit(self, rng):
        """Test random directions lie on the unit sphere."""
        assert np.linalg.norm(random_direction(rng)) == pytest.approx(1.0)


class TestSurfaceDerivatives:
    """Analytic partials against central differences."""

    @pytest.mark.parametrize("index", range(len(catalog())))
    def test_partials_match_central_differences(self, index, rng):
        """Test P_s, P_t and the second partials match finite differences."""
        surface = catalog()[index].domain.surface
        s, t = _sample_points(surface, rng, 1000)
        jet = surface.jet(s, t)
        h = FD_STEP
        plus_s, minus_s = surface.jet(s + h, t), surface.jet(s - h, t)
        plus_t, minus_t = surface.jet(s, t + h), surface.jet(s, t - h)
        assert _relative_error(jet.Ps, (plus_s.P - minus_s.P) / (2 * h)) < 1e-6
        assert _relative_error(jet.Pt, (plus_t.P - minus_t.P) / (2 * h)) < 1e-6
        assert _relative_error(jet.Pss, (plus_s.Ps - minus_s.Ps) / (2 * h)) < 1e-6
        assert _relative_error(jet.Pst, (plus_t.Ps - minus_t.Ps) / (2 * h)) < 1e-6
        assert _relative_error(jet.Ptt, (plus_t.Pt - minus_t.Pt) / (2 * h)) < 1e-6


class TestGaussCurvature:
    """Tests for K from the fundamental forms."""

    def test_unit_sphere_charts(self, rng):
        """Test K = 1 in both sphere charts."""
        for surface in (Sphere(), Ellipsoid.unit_sphere()):
            s, t = _sample_points(surface, rng, 200)
            K = surface_geometry(surface, np.stack([s, t], axis=-1)).K
            np.testing.assert_allclose(K, 1.0, rtol=1e-10)

    def test_torus_closed_form(self, rng):
        """Test K on the torus matches cos t / (r (R + r cos t))."""
        torus = Torus()
        s, t = _sample_points(torus, rng, 200)
        K = surface_geometry(torus, np.stack([s, t], axis=-1)).K
        np.testing.assert_allclose(K, torus.gauss_curvature(t), rtol=1e-10, atol=1e-12)

    def test_plane_is_flat(self):
        """Test the plane has K = 0 and unit area element."""
        geometry = surface_geometry(Plane(), np.array([[0.3, -1.2]]))
        assert geometry.K[0] == 0.0
        assert geometry.area_element[0] == pytest.approx(1.0)


class TestCurveGeometry:
    """Tests for curve frames and curvatures."""

    def test_planar_circle(self):
        """Test a counterclockwise circle of radius 2 has k_g = 1/2 and k_n = 0."""
        curve = BoundaryCurve.circle((0.0, 0.0), 2.0)
        frames = curve_frames(Plane(), curve, np.linspace(0.0, 6.0, 7))
        np.testing.assert_allclose(frames.k_g, 0.5)
        np.testing.assert_allclose(frames.k_n, 0.0, atol=1e-14)
        np.testing.assert_allclose(frames.speed, 2.0)

    def test_clockwise_circle_has_negative_curvature(self):
        """Test the inward normal of a hole flips the sign of k_g."""
        curve = BoundaryCurve.circle((0.0, 0.0), 1.0, clockwise=True)
        geometry = curve_geometry(Plane(), curve, 1.0)
        assert float(geometry.k_g) == pytest.approx(-1.0)

    def test_spherical_cap_boundary(self):
        """Test the boundary of a cap of half-angle pi/3 has k_g = cot(pi/3)."""
        curve = BoundaryCurve.circle((0.0, 0.0), math.tan(math.pi / 6))
        frames = curve_frames(Ellipsoid.unit_sphere(), curve, np.linspace(0.0, 6.0, 13))
        np.testing.assert_allclose(frames.k_g, 1.0 / math.tan(math.pi / 3), rtol=1e-10)

    def test_frame_is_orthonormal(self):
        """Test T, n, N are orthonormal along a curve on the torus."""
        curve = BoundaryCurve.circle((1.0, 2.0), 0.5)
        frames = curve_frames(Torus(), curve, np.linspace(0.0, 6.0, 25))
        for a, b in ((frames.T, frames.n), (frames.T, frames.N), (frames.n, frames.N)):
            np.testing.assert_allclose(np.sum(a * b, axis=-1), 0.0, atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(frames.n, axis=-1), 1.0)

    @pytest.mark.parametrize("name", scene_names())
    def test_acceleration_splits_into_curvatures(self, name, scene):
        """Test the arc-length acceleration of every boundary is k_n N + k_g n."""
        domain = scene(name).domain
        tau = np.linspace(0.0, 2 * math.pi, 256, endpoint=False)
        for curve in domain.boundaries:
            frames = curve_frames(domain.surface, curve, tau)
            jet = curve_jet(domain.surface, curve, tau)
            along = np.sum(jet.acceleration * frames.T, axis=-1)[:, None] * frames.T
            second = (jet.acceleration - along) / (frames.speed**2)[:, None]
            split = frames.k_n[:, None] * frames.N + frames.k_g[:, None] * frames.n
            assert np.max(np.linalg.norm(second - split, axis=-1)) < 1e-8
            assert np.max(np.linalg.norm(frames.acceleration - split, axis=-1)) < 1e-8


class TestSectionCurvature:
    """Tests for the plane-section geodesic curvature."""

    def test_unit_sphere_formula(self, rng):
        """Test k_g^u = <y, u> / <u, n> on the unit sphere."""
        surface = Ellipsoid.unit_sphere()
        curve = BoundaryCurve.circle((0.1, -0.2), 0.4)
        tau = np.linspace(0.0, 6.0, 9)
        frames = curve_frames(surface, curve, tau)
        q = curve.points(tau)
        geometry = surface_geometry(surface, q)
        u = random_direction(rng)
        expected = (frames.y @ u) / (frames.n @ u)
        np.testing.assert_allclose(
            section_curve_curvature(geometry, frames, u), expected, rtol=1e-9
        )

    def test_tangent_direction_is_not_transverse(self):
        """Test u along the curve tangent makes <u, n> vanish."""
        surface = Torus()
        curve = BoundaryCurve.circle((1.0, 2.0), 0.5)
        frames = curve_geometry(surface, curve, 0.7)
        geometry = surface_geometry(surface, curve.points(0.7))
        with pytest.raises(NonTransverseSection):
            section_curve_curvature(geometry, frames, frames.T)


class TestProjections:
    """Tests for tangential projection, pullback and spherical coordinates."""

    def test_normal_direction_has_no_projection(self):
        """Test projecting the plane normal raises."""
        geometry = surface_geometry(Plane(), np.array([0.0, 0.0]))
        with pytest.raises(ProjectionUndefined):
            tangential_projection(geometry, np.array([0.0, 0.0, 1.0]))

    def test_projection_is_tangent(self):
        """Test the projection is a unit vector orthogonal to N."""
        torus = Torus()
        geometry = surface_geometry(torus, np.array([0.4, 1.1]))
        v = tangential_projection(geometry, np.array([0.2, -0.5, 0.8]))
        assert np.linalg.norm(v) == pytest.approx(1.0)
        assert np.dot(v, geometry.N) == pytest.approx(0.0, abs=1e-12)

    def test_pullback_inverts_push_forward(self):
        """Test pullback recovers the parameter vector of a P_s, P_t combination."""
        torus = Torus()
        p = np.array([0.4, 1.1])
        jet = torus.jet(p[0], p[1])
        geometry = surface_geometry(torus, p)
        v = 0.3 * jet.Ps - 1.7 * jet.Pt
        np.testing.assert_allclose(pullback(geometry, jet, v), [0.3, -1.7], atol=1e-12)

    def test_spherical_round_trip(self, rng):
        """Test from_spherical inverts spherical_coords."""
        for _ in range(20):
            u = random_direction(rng)
            y = random_direction(rng)
            coords = spherical_coords(y, u)
            assert isinstance(coords, SphericalCoords)
            assert 0.0 <= coords.theta < 2 * math.pi
            np.testing.assert_allclose(from_spherical(coords, u), y, atol=1e-12)

    def test_polar_distance_of_axis(self):
        """Test u itself sits at polar distance 0 and -u at pi."""
        u = np.array([0.0, 0.6, 0.8])
        assert spherical_coords(u, u).gamma == pytest.approx(0.0)
        assert spherical_coords(-u, u).gamma == pytest.approx(math.pi)
