"""
Unit tests for the finite element layer: mesh, quadrature, elements, assembly, geometry.
"""
import math

import numpy as np
import pytest

from fem.assembly import (
    BoundaryQuadrature,
    assemble_boundary_form,
    assemble_form,
    assemble_trilinear_a,
    divergence_kernel,
    integrate,
    integrate_boundary,
    mass_kernel,
    mass_matrix,
    stiffness_matrix,
)
from fem.element import LagrangeElement
from fem.geometry import centroid_and_contact_angle, evaluate_p1, positive_region, zero_isoline
from fem.mesh import Mesh, build_rect_mesh
from fem.quadrature import line_rule, triangle_rule
from fem.space import Field, FunctionSpace, TaylorHoodSpace, interpolate
from oracles import dense_boundary_mass, dense_p1_matrices, dense_trilinear_a
from physics.droplet import initial_droplet
from utils.errors import AssemblyError, MeshError


class TestMesh:
    """Tests for build_rect_mesh."""

    def test_counts(self, tiny_mesh):
        """2 x 1 cells: 6 nodes, 4 triangles, 9 edges."""
        assert tiny_mesh.n_nodes == 6
        assert tiny_mesh.n_triangles == 4
        assert tiny_mesh.n_edges == 9

    def test_areas_positive_and_cover_domain(self, small_mesh):
        """Counterclockwise triangles tile the rectangle."""
        areas = small_mesh.signed_areas
        assert np.all(areas > 0.0)
        assert areas.sum() == pytest.approx(0.5, abs=1e-14)

    def test_tags(self, tiny_mesh):
        """All four sides are tagged with the right number of edges."""
        assert tiny_mesh.tags == ["bottom", "right", "top", "left"]
        assert tiny_mesh.edges_with_tag("bottom").size == 2
        assert tiny_mesh.edges_with_tag("left").size == 1
        np.testing.assert_array_equal(tiny_mesh.boundary_nodes("bottom"), [0, 1, 2])

    @pytest.mark.parametrize("nx,ny,Lx,Ly", [(0, 1, 1.0, 1.0), (2, 1, -1.0, 1.0), (1.5, 1, 1.0, 1.0)])
    def test_invalid_arguments(self, nx, ny, Lx, Ly):
        """Bad cell counts or lengths raise MeshError."""
        with pytest.raises(MeshError):
            build_rect_mesh(nx, ny, Lx, Ly)

    def test_clockwise_triangle_rejected(self, tiny_mesh):
        """Reversed orientation fails validation."""
        triangles = tiny_mesh.triangles.copy()
        triangles[0] = triangles[0, ::-1]
        with pytest.raises(MeshError, match="non-positive"):
            Mesh(tiny_mesh.nodes, triangles, tiny_mesh.boundary_edges, tiny_mesh.boundary_tags, 1.0, 0.5)


class TestQuadrature:
    """Tests for the reference rules."""

    @pytest.mark.parametrize("degree", [1, 2, 4, 6])
    def test_triangle_rule_exactness(self, degree):
        """Monomials xi^a eta^b with a + b <= degree are integrated exactly."""
        rule = triangle_rule(degree)
        assert rule.weights.sum() == pytest.approx(1.0, abs=1e-14)
        for a in range(degree + 1):
            for b in range(degree + 1 - a):
                exact = math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)
                approx = 0.5 * np.sum(rule.weights * rule.points[:, 0] ** a * rule.points[:, 1] ** b)
                assert approx == pytest.approx(exact, rel=1e-12, abs=1e-15)

    def test_triangle_rule_unavailable(self):
        """No rule above degree 6."""
        with pytest.raises(AssemblyError):
            triangle_rule(7)

    def test_line_rule(self):
        """Three Gauss points integrate t^5 on [0, 1] exactly."""
        rule = line_rule(3)
        assert np.sum(rule.weights * rule.points ** 5) == pytest.approx(1.0 / 6.0, rel=1e-13)
        with pytest.raises(AssemblyError):
            line_rule(0)


class TestElement:
    """Tests for Lagrange basis functions."""

    @pytest.mark.parametrize("degree", [1, 2])
    def test_partition_of_unity(self, degree):
        """Basis values sum to one and gradients to zero."""
        rng = np.random.default_rng(1)
        pts = rng.random((10, 2)) * 0.5
        element = LagrangeElement(degree)
        np.testing.assert_allclose(element.values(pts).sum(axis=1), 1.0, atol=1e-14)
        np.testing.assert_allclose(element.gradients(pts).sum(axis=1), 0.0, atol=1e-13)

    def test_p2_nodal(self):
        """P2 basis is nodal at vertices and edge midpoints."""
        nodes = np.array([[0, 0], [1, 0], [0, 1], [0.5, 0], [0.5, 0.5], [0, 0.5]], dtype=float)
        np.testing.assert_allclose(LagrangeElement(2).values(nodes), np.eye(6), atol=1e-14)

    def test_unknown_degree(self):
        with pytest.raises(AssemblyError):
            LagrangeElement(3)


class TestAssembly:
    """Tests for volume and boundary assembly."""

    def test_mass_total(self, small_mesh):
        """1^T M 1 is the domain area in every space."""
        for kind in ("P1", "P2"):
            V = FunctionSpace(small_mesh, kind)
            M = mass_matrix(V)
            ones = np.ones(V.dof_count)
            assert ones @ (M @ ones) == pytest.approx(0.5, rel=1e-13)

    def test_stiffness_kernel_of_constants(self, small_mesh):
        """Constants lie in the kernel of K, and K is symmetric."""
        V = FunctionSpace(small_mesh, "P2")
        K = stiffness_matrix(V)
        np.testing.assert_allclose(K @ np.ones(V.dof_count), 0.0, atol=1e-12)
        assert abs(K - K.T).max() < 1e-12

    def test_p2_interpolation_exact_for_quadratics(self, small_mesh):
        """int x^2 over (0, 1) x (0, 0.5) equals 1/6."""
        V = FunctionSpace(small_mesh, "P2")
        f = interpolate(lambda x, y: x ** 2, V)
        ones = np.ones(V.dof_count)
        assert ones @ (mass_matrix(V) @ f.coefficients) == pytest.approx(1.0 / 6.0, rel=1e-12)

    def test_integrate_with_field(self, small_mesh):
        """int x y = 1/16."""
        V = FunctionSpace(small_mesh, "P2")
        f = interpolate(lambda x, y: x * y, V)
        assert integrate(small_mesh, lambda coeffs, x: coeffs[0].value, [f]) == pytest.approx(1.0 / 16.0, rel=1e-12)

    def test_divergence(self, small_mesh):
        """int div (x, 0) = area."""
        th = TaylorHoodSpace(small_mesh)
        u = interpolate(lambda x, y: (x, np.zeros_like(y)), th.velocity)
        D = assemble_form(th.velocity, th.pressure, divergence_kernel)
        assert D.shape == (th.pressure.dof_count, th.velocity.dof_count)
        assert np.ones(th.pressure.dof_count) @ (D @ u.coefficients) == pytest.approx(0.5, rel=1e-12)

    def test_trilinear_form_skew(self, small_mesh):
        """a(u, v, w) = -a(u, w, v) for every transport field."""
        V = FunctionSpace(small_mesh, "P2vec")
        u = interpolate(lambda x, y: (np.sin(3 * x) + y, x * y), V)
        A = assemble_trilinear_a(u, V, V)
        assert abs(A + A.T).max() < 1e-12
        assert abs(A).max() > 1e-6

    def test_trilinear_form_matches_element_loop(self, small_mesh):
        V = FunctionSpace(small_mesh, "P2vec")
        u = interpolate(lambda x, y: (np.sin(3 * x) + y, x * y), V)
        A = assemble_trilinear_a(u, V, V).toarray()
        np.testing.assert_allclose(A, dense_trilinear_a(u, V), rtol=0, atol=1e-12)

    def test_trilinear_rejects_scalar_spaces(self, small_mesh):
        V = FunctionSpace(small_mesh, "P1")
        with pytest.raises(AssemblyError):
            assemble_trilinear_a(Field(V), V, V)

    def test_boundary_length(self, tiny_mesh):
        """Bottom has length 1, the whole boundary 3."""
        one = lambda coeffs, x: np.ones(x.shape[:2])  # noqa: E731
        assert integrate_boundary(tiny_mesh, one, "bottom") == pytest.approx(1.0)
        assert integrate_boundary(tiny_mesh, one, tiny_mesh.tags) == pytest.approx(3.0)

    def test_breakpoints_split_edges(self, tiny_mesh):
        """Piecewise constant data with a jump at x = 0.3 integrates exactly."""
        bq = BoundaryQuadrature(tiny_mesh, "bottom", n_points=1, breakpoints=[0.3])
        assert bq.n_segments == 3
        step = lambda coeffs, x: np.where(x[..., 0] < 0.3, 1.0, 2.0)  # noqa: E731
        assert integrate_boundary(tiny_mesh, step, quadrature=bq) == pytest.approx(1.7, rel=1e-14)

    @pytest.mark.parametrize("kind", ["P1", "P2"])
    def test_boundary_mass_matches_edge_matrices(self, small_mesh, kind):
        V = FunctionSpace(small_mesh, kind)
        bq = BoundaryQuadrature(small_mesh, small_mesh.tags, n_points=3, breakpoints=[0.3, 0.55])
        Mb = assemble_boundary_form(V, V, mass_kernel(), quadrature=bq).toarray()
        np.testing.assert_allclose(Mb, dense_boundary_mass(V, small_mesh.tags), rtol=0, atol=1e-12)

    def test_weighted_boundary_mass_matches_edge_quadrature(self, small_mesh):
        V = FunctionSpace(small_mesh, "P1")
        phi = interpolate(lambda x, y: np.cos(2 * x) + y, V)
        bq = BoundaryQuadrature(small_mesh, "bottom", n_points=3, breakpoints=[0.3])
        Mb = assemble_boundary_form(
            V, V, mass_kernel(lambda coeffs, x: coeffs[0].value), coeff_fields=[phi], quadrature=bq
        ).toarray()
        np.testing.assert_allclose(Mb, dense_boundary_mass(V, ["bottom"], weight=phi), rtol=0, atol=1e-12)

    def test_boundary_mass(self, small_mesh):
        """1^T M_b 1 is the bottom length."""
        V = FunctionSpace(small_mesh, "P1")
        Mb = assemble_boundary_form(V, V, mass_kernel(), "bottom")
        ones = np.ones(V.dof_count)
        assert ones @ (Mb @ ones) == pytest.approx(1.0, rel=1e-13)

    def test_unknown_tag(self, tiny_mesh):
        with pytest.raises(AssemblyError):
            BoundaryQuadrature(tiny_mesh, "front")

    def test_space_mismatch(self, tiny_mesh, small_mesh):
        """Spaces on different meshes cannot be combined."""
        with pytest.raises(AssemblyError):
            assemble_form(FunctionSpace(tiny_mesh, "P1"), FunctionSpace(small_mesh, "P1"), mass_kernel())


class TestGeometry:
    """Tests for isolines, centroid and contact angle."""

    def test_straight_isoline(self, p1_space):
        """phi = 0.53 - x has the vertical line x = 0.53 as zero level."""
        phi = interpolate(lambda x, y: 0.53 - x, p1_space)
        lines = zero_isoline(phi)
        assert len(lines) == 1
        np.testing.assert_allclose(lines[0][:, 0], 0.53, atol=1e-12)

    def test_no_sign_change(self, p1_space):
        phi = interpolate(lambda x, y: np.ones_like(x), p1_space)
        assert zero_isoline(phi) == []
        assert positive_region(Field(p1_space, -phi.coefficients)) == (0.0, None)

    def test_positive_region(self, p1_space):
        """Area and centroid of {x < 0.53} are exact for linear fields."""
        phi = interpolate(lambda x, y: 0.53 - x, p1_space)
        area, centroid = positive_region(phi)
        assert area == pytest.approx(0.265, rel=1e-12)
        np.testing.assert_allclose(centroid, [0.265, 0.25], atol=1e-12)

    @pytest.mark.parametrize("slope,expected", [(0.0, 90.0), (1.0, 45.0), (-1.0, 135.0)])
    def test_contact_angle_of_planar_interface(self, p1_space, slope, expected):
        """The angle is the supplement of the liquid opening angle."""
        phi = interpolate(lambda x, y: 0.53 + slope * y - x, p1_space)
        geometry = centroid_and_contact_angle(phi, "bottom", eps=0.1)
        assert len(geometry.contact_points) == 1
        assert geometry.angle == pytest.approx(expected, abs=1e-8)
        assert geometry.contact_points[0].position[1] == pytest.approx(0.0, abs=1e-14)

    def test_left_and_right_contact_points(self, p1_space):
        """A triangular cap with 45 degree flanks; the kink lies on the x = 0.5 grid line."""
        phi = interpolate(lambda x, y: 0.2 - np.abs(x - 0.5) - y, p1_space)
        geometry = centroid_and_contact_angle(phi, "bottom", eps=0.05)
        assert len(geometry.contact_points) == 2
        np.testing.assert_allclose(geometry.contact_points[0].position, [0.3, 0.0], atol=1e-12)
        np.testing.assert_allclose(geometry.contact_points[1].position, [0.7, 0.0], atol=1e-12)
        assert geometry.left_angle == pytest.approx(135.0, abs=1e-8)
        assert geometry.right_angle == pytest.approx(135.0, abs=1e-8)
        assert geometry.angle == pytest.approx(135.0, abs=1e-8)
        np.testing.assert_allclose(geometry.centroid, [0.5, 0.2 / 3.0], atol=1e-10)
        assert geometry.liquid_angle == pytest.approx(45.0, abs=1e-8)

    @pytest.mark.parametrize("eps", [0.02, 0.04])
    def test_semicircular_cap_measures_90_degrees(self, eps):
        space = FunctionSpace(build_rect_mesh(64, 32, 1.0, 0.5), "P1")
        phi = initial_droplet((0.375, 0.0), 0.25, eps, space)
        geometry = centroid_and_contact_angle(phi, "bottom", eps)
        assert len(geometry.contact_points) == 2
        assert geometry.left_angle == pytest.approx(90.0, abs=5.0)
        assert geometry.right_angle == pytest.approx(90.0, abs=5.0)
        assert geometry.angle == pytest.approx(90.0, abs=5.0)
        np.testing.assert_allclose(geometry.contact_points[0].position, [0.125, 0.0], atol=2e-3)
        np.testing.assert_allclose(geometry.contact_points[1].position, [0.625, 0.0], atol=2e-3)
        assert geometry.centroid[0] == pytest.approx(0.375, abs=1e-3)

    def test_geometry_needs_p1(self, small_mesh):
        with pytest.raises(AssemblyError):
            zero_isoline(Field(FunctionSpace(small_mesh, "P2")))

    def test_evaluate_p1(self, p1_space):
        """Linear fields are reproduced at arbitrary points."""
        phi = interpolate(lambda x, y: 2 * x - y, p1_space)
        pts = np.array([[0.31, 0.12], [0.77, 0.41]])
        np.testing.assert_allclose(evaluate_p1(phi, pts), 2 * pts[:, 0] - pts[:, 1], atol=1e-13)
        with pytest.raises(AssemblyError):
            evaluate_p1(phi, np.array([[2.0, 0.1]]))


class TestDenseOracle:
    """Sparse P1 assembly against closed-form element matrices."""

    def test_mass_and_stiffness(self, small_mesh):
        V = FunctionSpace(small_mesh, "P1")
        M, K = dense_p1_matrices(small_mesh)
        np.testing.assert_allclose(mass_matrix(V).toarray(), M, atol=1e-14)
        np.testing.assert_allclose(stiffness_matrix(V).toarray(), K, atol=1e-12)
