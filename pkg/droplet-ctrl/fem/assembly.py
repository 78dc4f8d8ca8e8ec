"""
Vectorized sparse assembly of bilinear, linear and functional forms.

Kernels are pointwise weak-form descriptors evaluated on chunks of elements
at quadrature points:

    form kernel        kernel(u, v, coeffs, x) -> (t, Q, n_test, n_trial)
    vector kernel      kernel(v, coeffs, x)    -> (t, Q, n_test)
    functional kernel  kernel(coeffs, x)       -> (t, Q)

``u``/``v`` are BasisEval objects of the trial/test space, ``coeffs`` the
FieldEval of every coefficient field and ``x`` the physical quadrature
points (t, Q, 2). Element chunks are processed in mesh order, so reductions
are deterministic. Boundary kernels have the same signatures with segments in
place of elements and ``grad`` set to None.
"""
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from utils.errors import AssemblyError
from .mesh import Mesh
from .quadrature import TriangleRule, line_rule, triangle_rule
from .space import Field, FunctionSpace

CHUNK_SIZE = 512


class BasisEval:
    """Basis functions of one space at quadrature points of a chunk.

    Scalar spaces: value (t, Q, n), grad (t, Q, n, 2).
    Vector spaces: value (t, Q, N, 2), grad (t, Q, N, 2, 2) indexed
    [..., function, component, derivative].
    """

    def __init__(self, value: np.ndarray, grad: Optional[np.ndarray], is_vector: bool):
        self.value = value
        self.grad = grad
        self.is_vector = is_vector

    @property
    def n(self) -> int:
        return self.value.shape[2]


class FieldEval:
    """A field at quadrature points: value (t, Q[, 2]) and grad (t, Q[, 2], 2)."""

    def __init__(self, value: np.ndarray, grad: Optional[np.ndarray], is_vector: bool):
        self.value = value
        self.grad = grad
        self.is_vector = is_vector


class ElementGeometry:
    """Affine maps x = x0 + J xi of all triangles."""

    def __init__(self, mesh: Mesh):
        p = mesh.nodes[mesh.triangles]
        self.origin = p[:, 0, :]
        self.jacobian = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
        J = self.jacobian
        self.det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        inv_t = np.empty_like(J)
        inv_t[:, 0, 0] = J[:, 1, 1]
        inv_t[:, 0, 1] = -J[:, 1, 0]
        inv_t[:, 1, 0] = -J[:, 0, 1]
        inv_t[:, 1, 1] = J[:, 0, 0]
        self.inv_jacobian_t = inv_t / self.det[:, None, None]
        self.area = 0.5 * self.det

    def points(self, rule: TriangleRule, sl: slice) -> np.ndarray:
        return np.einsum("tij,qj->tqi", self.jacobian[sl], rule.points) + self.origin[sl, None, :]


def element_geometry(mesh: Mesh) -> ElementGeometry:
    geometry = getattr(mesh, "_geometry", None)
    if geometry is None:
        geometry = ElementGeometry(mesh)
        mesh._geometry = geometry
    return geometry


def _chunks(n: int, size: int):
    for start in range(0, n, size):
        yield slice(start, min(start + size, n))


def _common_mesh(spaces: Sequence[FunctionSpace]) -> Mesh:
    mesh = spaces[0].mesh
    for space in spaces[1:]:
        if space.mesh is not mesh:
            raise AssemblyError("space/mesh mismatch: all spaces must live on the same mesh")
    return mesh


def _check_fields_on(mesh: Mesh, fields: Sequence[Field]) -> None:
    if fields and _common_mesh([f.space for f in fields]) is not mesh:
        raise AssemblyError("space/mesh mismatch: coefficient fields live on another mesh")


def _as_tags(tag: Union[str, Sequence[str]]) -> Tuple[str, ...]:
    return (tag,) if isinstance(tag, str) else tuple(tag)


def _basis(space: FunctionSpace, rule: TriangleRule, geom: ElementGeometry, sl: slice) -> BasisEval:
    ref_v = space.element.values(rule.points)
    ref_g = space.element.gradients(rule.points)
    inv_t = geom.inv_jacobian_t[sl]
    t = inv_t.shape[0]
    q, n = ref_v.shape
    grad = np.einsum("tij,qnj->tqni", inv_t, ref_g)
    value = np.broadcast_to(ref_v, (t, q, n))
    if not space.is_vector:
        return BasisEval(value, grad, False)
    vvalue = np.zeros((t, q, 2 * n, 2))
    vgrad = np.zeros((t, q, 2 * n, 2, 2))
    for c in range(2):
        vvalue[:, :, c * n:(c + 1) * n, c] = value
        vgrad[:, :, c * n:(c + 1) * n, c, :] = grad
    return BasisEval(vvalue, vgrad, True)


class _ChunkCache:
    def __init__(self, rule: TriangleRule, geom: ElementGeometry, sl: slice):
        self.rule = rule
        self.geom = geom
        self.sl = sl
        self._basis = {}

    def basis(self, space: FunctionSpace) -> BasisEval:
        key = id(space)
        if key not in self._basis:
            self._basis[key] = _basis(space, self.rule, self.geom, self.sl)
        return self._basis[key]

    def field(self, field: Field) -> FieldEval:
        space = field.space
        basis = self.basis(space)
        c = field.coefficients[space.dof_map[self.sl]]
        if space.is_vector:
            value = np.einsum("tqnc,tn->tqc", basis.value, c)
            grad = np.einsum("tqncd,tn->tqcd", basis.grad, c)
        else:
            value = np.einsum("tqn,tn->tq", basis.value, c)
            grad = np.einsum("tqnd,tn->tqd", basis.grad, c)
        return FieldEval(value, grad, space.is_vector)


def _check_shape(arr: np.ndarray, shape: Tuple[int, ...], what: str) -> np.ndarray:
    try:
        return np.broadcast_to(arr, shape)
    except ValueError as e:
        raise AssemblyError(f"{what} kernel returned shape {np.shape(arr)}, expected {shape}") from e


def assemble_form(
    space_trial: FunctionSpace,
    space_test: FunctionSpace,
    kernel: Callable,
    coeff_fields: Sequence[Field] = (),
    degree: int = 4,
) -> sp.csr_matrix:
    """
    Assemble a bilinear form into a (test dofs x trial dofs) matrix.

    Args:
        space_trial: Trial (column) space
        space_test: Test (row) space
        kernel: Form kernel ``kernel(u, v, coeffs, x)``
        coeff_fields: Coefficient fields handed to the kernel, in order
        degree: Quadrature degree

    Returns:
        CSR matrix with entries A[i, j] = form(phi_j, psi_i)

    Raises:
        AssemblyError: On space/mesh mismatch or malformed kernel output
    """
    mesh = _common_mesh([space_trial, space_test] + [f.space for f in coeff_fields])
    rule = triangle_rule(degree)
    geom = element_geometry(mesh)
    rows, cols, vals = [], [], []
    for sl in _chunks(mesh.n_triangles, CHUNK_SIZE):
        cache = _ChunkCache(rule, geom, sl)
        u = cache.basis(space_trial)
        v = cache.basis(space_test)
        coeffs = [cache.field(f) for f in coeff_fields]
        x = geom.points(rule, sl)
        t = x.shape[0]
        k = _check_shape(kernel(u, v, coeffs, x), (t, len(rule.weights), v.n, u.n), "form")
        local = np.einsum("tqij,q,t->tij", k, rule.weights, geom.area[sl])
        r = space_test.dof_map[sl]
        c = space_trial.dof_map[sl]
        rows.append(np.broadcast_to(r[:, :, None], local.shape).ravel())
        cols.append(np.broadcast_to(c[:, None, :], local.shape).ravel())
        vals.append(local.ravel())
    return sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(space_test.dof_count, space_trial.dof_count),
    ).tocsr()


def assemble_vector(
    space_test: FunctionSpace,
    kernel: Callable,
    coeff_fields: Sequence[Field] = (),
    degree: int = 4,
) -> np.ndarray:
    """Assemble a linear form ``kernel(v, coeffs, x)`` into a vector over test dofs."""
    mesh = _common_mesh([space_test] + [f.space for f in coeff_fields])
    rule = triangle_rule(degree)
    geom = element_geometry(mesh)
    out = np.zeros(space_test.dof_count)
    for sl in _chunks(mesh.n_triangles, CHUNK_SIZE):
        cache = _ChunkCache(rule, geom, sl)
        v = cache.basis(space_test)
        coeffs = [cache.field(f) for f in coeff_fields]
        x = geom.points(rule, sl)
        k = _check_shape(kernel(v, coeffs, x), (x.shape[0], len(rule.weights), v.n), "vector")
        local = np.einsum("tqi,q,t->ti", k, rule.weights, geom.area[sl])
        out += np.bincount(
            space_test.dof_map[sl].ravel(), weights=local.ravel(), minlength=space_test.dof_count
        )
    return out


def integrate(
    mesh: Mesh,
    kernel: Callable,
    coeff_fields: Sequence[Field] = (),
    degree: int = 4,
) -> float:
    """Integrate ``kernel(coeffs, x)`` over the domain."""
    _check_fields_on(mesh, coeff_fields)
    rule = triangle_rule(degree)
    geom = element_geometry(mesh)
    total = 0.0
    for sl in _chunks(mesh.n_triangles, CHUNK_SIZE):
        cache = _ChunkCache(rule, geom, sl)
        coeffs = [cache.field(f) for f in coeff_fields]
        x = geom.points(rule, sl)
        k = _check_shape(kernel(coeffs, x), x.shape[:2], "functional")
        total += float(np.einsum("tq,q,t->", k, rule.weights, geom.area[sl]))
    return total


# ---------------------------------------------------------------------------
# Standard kernels


def mass_kernel(weight: Optional[Callable] = None) -> Callable:
    """(w(x) u, v) for scalar or vector spaces; ``weight(coeffs, x) -> (t, Q)``."""

    def kernel(u, v, coeffs, x):
        if u.is_vector:
            k = np.einsum("tqjc,tqic->tqij", u.value, v.value)
        else:
            k = np.einsum("tqj,tqi->tqij", u.value, v.value)
        if weight is not None:
            k = k * weight(coeffs, x)[:, :, None, None]
        return k

    return kernel


def stiffness_kernel(weight: Optional[Callable] = None) -> Callable:
    """(w(x) grad u, grad v) for scalar spaces."""

    def kernel(u, v, coeffs, x):
        k = np.einsum("tqjd,tqid->tqij", u.grad, v.grad)
        if weight is not None:
            k = k * weight(coeffs, x)[:, :, None, None]
        return k

    return kernel


def divergence_kernel(u, v, coeffs, x):
    """(div u, q) with vector trial u and scalar test q."""
    div = np.einsum("tqjcc->tqj", u.grad)
    return np.einsum("tqi,tqj->tqij", v.value, div)


def mass_matrix(space: FunctionSpace, degree: int = 4) -> sp.csr_matrix:
    return assemble_form(space, space, mass_kernel(), degree=degree)


def stiffness_matrix(space: FunctionSpace, degree: int = 4) -> sp.csr_matrix:
    return assemble_form(space, space, stiffness_kernel(), degree=degree)


def assemble_trilinear_a(
    u: Union[Field, Callable],
    space_v: FunctionSpace,
    space_w: FunctionSpace,
    coeff_fields: Sequence[Field] = (),
    degree: int = 6,
) -> sp.csr_matrix:
    """
    Matrix of the skew-symmetrized transport form.

    a(u, v, w) = 1/2 ((u . grad) v, w) - 1/2 ((u . grad) w, v), with
    w^T A v = a(u, v, w).

    Args:
        u: Vector Field, or a callable ``u(coeffs, x) -> (t, Q, 2)`` built
            from ``coeff_fields``
        space_v: Vector trial space
        space_w: Vector test space
        coeff_fields: Fields passed to a callable ``u``
        degree: Quadrature degree

    Returns:
        CSR matrix (space_w dofs x space_v dofs)

    Raises:
        AssemblyError: If u is a scalar field or a space is not vector valued
    """
    if not (space_v.is_vector and space_w.is_vector):
        raise AssemblyError("trilinear form needs vector trial and test spaces")
    if isinstance(u, Field):
        if not u.space.is_vector:
            raise AssemblyError("transport field of the trilinear form must be vector valued")
        fields = [u]

        def transport(coeffs, x):
            return coeffs[0].value
    elif callable(u):
        fields = list(coeff_fields)
        transport = u
    else:
        raise AssemblyError("transport must be a vector Field or a callable")

    def kernel(trial, test, coeffs, x):
        U = transport(coeffs, x)
        conv_trial = np.einsum("tqd,tqjcd->tqjc", U, trial.grad)
        conv_test = np.einsum("tqd,tqicd->tqic", U, test.grad)
        first = np.einsum("tqjc,tqic->tqij", conv_trial, test.value)
        second = np.einsum("tqic,tqjc->tqij", conv_test, trial.value)
        return 0.5 * (first - second)

    return assemble_form(space_v, space_w, kernel, fields, degree=degree)


# ---------------------------------------------------------------------------
# Boundary (trace) integrals


class BoundaryQuadrature:
    """
    Gauss points on tagged boundary edges.

    Edges whose x-extent contains a breakpoint are split there, so piecewise
    constant data with jumps at the breakpoints is integrated exactly.

    Attributes:
        boundary_index: (s,) index into mesh.boundary_edges per segment
        tags: (s,) tag per segment
        t: (s, Q) edge parameters of the points
        weights: (s, Q) physical weights
        points: (s, Q, 2) physical points
        midpoints: (s, 2) segment midpoints
    """

    def __init__(
        self,
        mesh: Mesh,
        tag: Union[str, Sequence[str]],
        n_points: int = 3,
        breakpoints: Optional[Sequence[float]] = None,
    ):
        self.mesh = mesh
        self.tag_names = _as_tags(tag)
        for name in self.tag_names:
            if name not in mesh.tags:
                raise AssemblyError(f"unknown boundary tag {name!r}; mesh has {mesh.tags}")
        rule = line_rule(n_points)
        cuts_x = np.asarray(breakpoints if breakpoints is not None else [], dtype=float)

        index, tags, t0, t1 = [], [], [], []
        for name in self.tag_names:
            for b in mesh.edges_with_tag(name):
                xa, xb = mesh.nodes[mesh.boundary_edges[b]]
                cuts = [0.0, 1.0]
                dx = xb[0] - xa[0]
                if cuts_x.size and dx != 0.0:
                    s = (cuts_x - xa[0]) / dx
                    cuts.extend(s[(s > 1e-12) & (s < 1.0 - 1e-12)].tolist())
                cuts = sorted(cuts)
                for lo, hi in zip(cuts[:-1], cuts[1:]):
                    index.append(b)
                    tags.append(name)
                    t0.append(lo)
                    t1.append(hi)

        self.boundary_index = np.array(index, dtype=np.int64)
        self.tags = np.array(tags)
        t0 = np.array(t0)
        t1 = np.array(t1)
        ends = mesh.nodes[mesh.boundary_edges[self.boundary_index]]
        xa, xb = ends[:, 0, :], ends[:, 1, :]
        edge_length = np.sqrt(((xb - xa) ** 2).sum(axis=1))
        self.t = t0[:, None] + (t1 - t0)[:, None] * rule.points[None, :]
        self.weights = (edge_length * (t1 - t0))[:, None] * rule.weights[None, :]
        self.points = xa[:, None, :] + self.t[:, :, None] * (xb - xa)[:, None, :]
        tm = 0.5 * (t0 + t1)
        self.midpoints = xa + tm[:, None] * (xb - xa)

    @property
    def n_segments(self) -> int:
        return self.boundary_index.size

    def basis(self, space: FunctionSpace) -> BasisEval:
        if space.is_vector:
            raise AssemblyError("boundary assembly is only available for scalar spaces")
        return BasisEval(space.element.edge_values(self.t), None, False)

    def field(self, field: Field) -> FieldEval:
        basis = self.basis(field.space)
        c = field.coefficients[field.space.edge_dof_map(self.boundary_index)]
        return FieldEval(np.einsum("sqn,sn->sq", basis.value, c), None, False)

    def dofs(self, space: FunctionSpace) -> np.ndarray:
        return space.edge_dof_map(self.boundary_index)


def _boundary_quadrature(mesh, tag, n_points, breakpoints, quadrature) -> BoundaryQuadrature:
    if quadrature is not None:
        if quadrature.mesh is not mesh:
            raise AssemblyError("space/mesh mismatch: boundary quadrature lives on another mesh")
        return quadrature
    return BoundaryQuadrature(mesh, tag, n_points, breakpoints)


def assemble_boundary_form(
    space_trial: FunctionSpace,
    space_test: FunctionSpace,
    kernel: Callable,
    tag: Union[str, Sequence[str]] = "bottom",
    coeff_fields: Sequence[Field] = (),
    n_points: int = 3,
    breakpoints: Optional[Sequence[float]] = None,
    quadrature: Optional[BoundaryQuadrature] = None,
) -> sp.csr_matrix:
    """
    Assemble a line-integral form over the edges carrying ``tag``.

    Raises:
        AssemblyError: On unknown tag or space/mesh mismatch
    """
    mesh = _common_mesh([space_trial, space_test] + [f.space for f in coeff_fields])
    bq = _boundary_quadrature(mesh, tag, n_points, breakpoints, quadrature)
    u = bq.basis(space_trial)
    v = bq.basis(space_test)
    coeffs = [bq.field(f) for f in coeff_fields]
    s, q = bq.weights.shape
    k = _check_shape(kernel(u, v, coeffs, bq.points), (s, q, v.n, u.n), "boundary form")
    local = np.einsum("sqij,sq->sij", k, bq.weights)
    r = bq.dofs(space_test)
    c = bq.dofs(space_trial)
    return sp.coo_matrix(
        (
            local.ravel(),
            (np.broadcast_to(r[:, :, None], local.shape).ravel(),
             np.broadcast_to(c[:, None, :], local.shape).ravel()),
        ),
        shape=(space_test.dof_count, space_trial.dof_count),
    ).tocsr()


def assemble_boundary_vector(
    space_test: FunctionSpace,
    kernel: Callable,
    tag: Union[str, Sequence[str]] = "bottom",
    coeff_fields: Sequence[Field] = (),
    n_points: int = 3,
    breakpoints: Optional[Sequence[float]] = None,
    quadrature: Optional[BoundaryQuadrature] = None,
) -> np.ndarray:
    """Assemble a boundary linear form ``kernel(v, coeffs, x)``."""
    mesh = _common_mesh([space_test] + [f.space for f in coeff_fields])
    bq = _boundary_quadrature(mesh, tag, n_points, breakpoints, quadrature)
    v = bq.basis(space_test)
    coeffs = [bq.field(f) for f in coeff_fields]
    s, q = bq.weights.shape
    k = _check_shape(kernel(v, coeffs, bq.points), (s, q, v.n), "boundary vector")
    local = np.einsum("sqi,sq->si", k, bq.weights)
    return np.bincount(bq.dofs(space_test).ravel(), weights=local.ravel(),
                       minlength=space_test.dof_count)


def integrate_boundary_segments(
    mesh: Mesh,
    kernel: Callable,
    tag: Union[str, Sequence[str]] = "bottom",
    coeff_fields: Sequence[Field] = (),
    n_points: int = 3,
    breakpoints: Optional[Sequence[float]] = None,
    quadrature: Optional[BoundaryQuadrature] = None,
) -> Tuple[np.ndarray, BoundaryQuadrature]:
    """Integrate ``kernel(coeffs, x)`` over every boundary segment separately."""
    _check_fields_on(mesh, coeff_fields)
    bq = _boundary_quadrature(mesh, tag, n_points, breakpoints, quadrature)
    coeffs = [bq.field(f) for f in coeff_fields]
    k = _check_shape(kernel(coeffs, bq.points), bq.weights.shape, "boundary functional")
    return np.einsum("sq,sq->s", k, bq.weights), bq


def integrate_boundary(
    mesh: Mesh,
    kernel: Callable,
    tag: Union[str, Sequence[str]] = "bottom",
    coeff_fields: Sequence[Field] = (),
    n_points: int = 3,
    breakpoints: Optional[Sequence[float]] = None,
    quadrature: Optional[BoundaryQuadrature] = None,
) -> float:
    """Integrate ``kernel(coeffs, x)`` over the edges carrying ``tag``."""
    values, _ = integrate_boundary_segments(
        mesh, kernel, tag, coeff_fields, n_points, breakpoints, quadrature
    )
    return float(values.sum())
