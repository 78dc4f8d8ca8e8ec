"""
Geometry of P1 phase fields: zero isolines, droplet centroid and contact angles.

Contact angles follow the Young convention of the wetting energy: the angle
between the outward wall normal and the interface normal pointing into the
liquid, theta = arccos(-nu . n_I). This is the angle measured through the gas,
the supplement of the opening angle of {phi > 0} at the wall. A half disc
measures 90 degrees; a liquid wedge with a 45 degree opening measures 135.
The angle through the liquid is reported alongside as 180 - theta.
"""
from collections import defaultdict
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from utils.errors import AssemblyError
from .space import Field

ANGLE_BAND_WIDTHS = 3.0


class ContactPoint(NamedTuple):
    position: np.ndarray   # (2,) point on the wall
    angle: Optional[float]  # degrees, None when the fit is undefined


class DropletGeometry(NamedTuple):
    centroid: Optional[np.ndarray]
    angle: Optional[float]
    contact_points: List[ContactPoint]

    @property
    def left_angle(self) -> Optional[float]:
        return self.contact_points[0].angle if self.contact_points else None

    @property
    def right_angle(self) -> Optional[float]:
        return self.contact_points[-1].angle if len(self.contact_points) > 1 else None

    @property
    def liquid_angle(self) -> Optional[float]:
        """Mean angle measured through the liquid."""
        return None if self.angle is None else 180.0 - self.angle


def _require_p1(phi: Field) -> None:
    if phi.space.kind != "P1":
        raise AssemblyError(f"geometry utilities need a P1 field, got {phi.space.kind}")


def _crossings(phi: Field):
    """Edge crossing points keyed by global edge id and the per-triangle segments."""
    mesh = phi.space.mesh
    f = phi.coefficients
    positive = f > 0.0
    ea, eb = mesh.edges[:, 0], mesh.edges[:, 1]
    crossing = positive[ea] != positive[eb]
    t = np.zeros(mesh.n_edges)
    fa, fb = f[ea[crossing]], f[eb[crossing]]
    t[crossing] = fa / (fa - fb)
    points = mesh.nodes[ea] + t[:, None] * (mesh.nodes[eb] - mesh.nodes[ea])

    segments: List[Tuple[int, int, int]] = []
    tri_cross = crossing[mesh.triangle_edges]
    for tri in np.flatnonzero(tri_cross.any(axis=1)):
        keys = mesh.triangle_edges[tri][tri_cross[tri]]
        if keys.size == 2:
            segments.append((int(keys[0]), int(keys[1]), int(tri)))
    return points, crossing, segments


def _chains(segments: List[Tuple[int, int, int]]):
    """Chain segments sharing an edge key into polylines (key lists, triangle lists)."""
    adjacency: Dict[int, List[int]] = defaultdict(list)
    for i, (a, b, _) in enumerate(segments):
        adjacency[a].append(i)
        adjacency[b].append(i)
    used = np.zeros(len(segments), dtype=bool)

    def walk(key: int):
        keys, tris = [key], []
        while True:
            nxt = [i for i in adjacency[key] if not used[i]]
            if not nxt:
                return keys, tris
            i = nxt[0]
            used[i] = True
            a, b, tri = segments[i]
            key = b if a == key else a
            keys.append(key)
            tris.append(tri)

    chains = []
    for key in sorted(k for k, segs in adjacency.items() if len(segs) == 1):
        if not used[adjacency[key][0]]:
            chains.append(walk(key))
    for i in range(len(segments)):
        if not used[i]:
            chains.append(walk(segments[i][0]))
    return chains


def zero_isoline(phi: Field) -> List[np.ndarray]:
    """
    Zero level set of a P1 field by marching triangles.

    Args:
        phi: P1 field

    Returns:
        Polylines as (k, 2) arrays; empty when phi has no sign change.
        Vertices with phi == 0 count as positive.
    """
    _require_p1(phi)
    points, _, segments = _crossings(phi)
    return [points[np.array(keys)] for keys, _ in _chains(segments)]


def positive_region(phi: Field) -> Tuple[float, Optional[np.ndarray]]:
    """
    Area and centroid of {phi > 0} for the piecewise linear field.

    Triangles are clipped exactly against the zero level.

    Returns:
        (area, centroid); centroid is None when the region is empty
    """
    _require_p1(phi)
    mesh = phi.space.mesh
    f = phi.coefficients[mesh.triangles]
    p = mesh.nodes[mesh.triangles]
    pos = f > 0.0
    full = pos.all(axis=1)
    areas = 0.5 * np.abs(
        (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
        - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
    )
    area = float(areas[full].sum())
    moment = (areas[full, None] * p[full].mean(axis=1)).sum(axis=0)

    for tri in np.flatnonzero(pos.any(axis=1) & ~full):
        poly = []
        for i in range(3):
            j = (i + 1) % 3
            if pos[tri, i]:
                poly.append(p[tri, i])
            if pos[tri, i] != pos[tri, j]:
                s = f[tri, i] / (f[tri, i] - f[tri, j])
                poly.append(p[tri, i] + s * (p[tri, j] - p[tri, i]))
        a, c = _polygon(np.array(poly))
        area += a
        moment = moment + a * c

    if area <= 0.0:
        return 0.0, None
    return area, moment / area


def _polygon(poly: np.ndarray) -> Tuple[float, np.ndarray]:
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * cross.sum()
    if a == 0.0:
        return 0.0, poly.mean(axis=0)
    cx = ((x + xn) * cross).sum() / (6.0 * a)
    cy = ((y + yn) * cross).sum() / (6.0 * a)
    return abs(a), np.array([cx, cy])


def _wall_frame(tag: str, Lx: float, Ly: float):
    """Maps to (along-wall s, distance d) coordinates and the gradient map."""
    if tag == "bottom":
        return (lambda q: np.column_stack([q[:, 0], q[:, 1]]),
                lambda g: np.array([g[0], g[1]]))
    if tag == "top":
        return (lambda q: np.column_stack([q[:, 0], Ly - q[:, 1]]),
                lambda g: np.array([g[0], -g[1]]))
    if tag == "left":
        return (lambda q: np.column_stack([q[:, 1], q[:, 0]]),
                lambda g: np.array([g[1], g[0]]))
    if tag == "right":
        return (lambda q: np.column_stack([q[:, 1], Lx - q[:, 0]]),
                lambda g: np.array([g[1], -g[0]]))
    raise AssemblyError(f"unknown boundary tag {tag!r}")


def _triangle_gradients(phi: Field, tris: np.ndarray) -> np.ndarray:
    mesh = phi.space.mesh
    p = mesh.nodes[mesh.triangles[tris]]
    f = phi.coefficients[mesh.triangles[tris]]
    J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
    df = np.column_stack([f[:, 1] - f[:, 0], f[:, 2] - f[:, 0]])
    # grad^T J = df
    return np.linalg.solve(np.transpose(J, (0, 2, 1)), df[:, :, None])[:, :, 0]


def centroid_and_contact_angle(phi: Field, tag: str = "bottom", eps: float = 0.02) -> DropletGeometry:
    """
    Centroid of the liquid region and contact angles on a wall.

    Each isoline branch that ends on the wall is fitted, by least squares,
    as a quadratic of along-wall position in wall distance over its points
    within 3 eps of the wall; the angle is taken from the tangent at the
    wall. Angles are measured through the gas (see the module docstring).

    Args:
        phi: P1 phase field
        tag: Wall tag
        eps: Interface width; sets the fitting band

    Returns:
        DropletGeometry with per-contact-point angles sorted along the wall
        and their mean (None when no branch reaches the band)
    """
    _require_p1(phi)
    mesh = phi.space.mesh
    if tag not in mesh.tags:
        raise AssemblyError(f"unknown boundary tag {tag!r}")
    to_frame, grad_to_frame = _wall_frame(tag, mesh.Lx, mesh.Ly)
    band = ANGLE_BAND_WIDTHS * eps
    on_wall = 1e-12 * max(mesh.Lx, mesh.Ly)

    _, centroid = positive_region(phi)
    points, _, segments = _crossings(phi)

    contacts: List[Tuple[float, ContactPoint]] = []
    for keys, tris in _chains(segments):
        xy = points[np.array(keys)]
        sd = to_frame(xy)
        for end in (0, -1):
            if sd[end, 1] > on_wall:
                continue
            order = np.arange(len(keys)) if end == 0 else np.arange(len(keys))[::-1]
            taken = []
            for k in order:
                if sd[k, 1] > band:
                    break
                taken.append(k)
            seg_tris = [tris[min(a, b)] for a, b in zip(taken[:-1], taken[1:])]
            angle = _fit_angle(phi, sd[taken], seg_tris, grad_to_frame)
            contacts.append((float(sd[order[0], 0]), ContactPoint(xy[order[0]].copy(), angle)))

    contacts.sort(key=lambda item: item[0])
    contact_points = [cp for _, cp in contacts]
    angles = [cp.angle for cp in contact_points if cp.angle is not None]
    mean_angle = float(np.mean(angles)) if angles else None
    return DropletGeometry(centroid, mean_angle, contact_points)


def _fit_angle(phi: Field, sd: np.ndarray, tris: List[int], grad_to_frame) -> Optional[float]:
    if sd.shape[0] < 2 or np.ptp(sd[:, 1]) <= 0.0 or not tris:
        return None
    d = sd[:, 1]
    s = sd[:, 0]
    # tangent at the wall
    degree = 2 if np.unique(d).size >= 3 else 1
    slope = np.polynomial.polynomial.polyfit(d, s, degree)[1]
    normal = np.array([1.0, -slope]) / np.hypot(1.0, slope)
    g = grad_to_frame(_triangle_gradients(phi, np.array(tris)).mean(axis=0))
    if normal @ g < 0.0:
        normal = -normal
    return float(np.degrees(np.arccos(np.clip(normal[1], -1.0, 1.0))))


def evaluate_p1(phi: Field, points: np.ndarray) -> np.ndarray:
    """
    Evaluate a P1 field at arbitrary points inside the mesh.

    Raises:
        AssemblyError: If a point lies outside every triangle
    """
    _require_p1(phi)
    mesh = phi.space.mesh
    points = np.atleast_2d(points)
    p = mesh.nodes[mesh.triangles]
    J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
    inv = np.linalg.inv(J)
    out = np.empty(points.shape[0])
    tol = 1e-12
    for n, x in enumerate(points):
        ref = np.einsum("tij,tj->ti", inv, x - p[:, 0])
        lam = np.column_stack([1.0 - ref.sum(axis=1), ref])
        inside = np.flatnonzero((lam >= -tol).all(axis=1))
        if inside.size == 0:
            raise AssemblyError(f"point {x} lies outside the mesh")
        t = inside[0]
        out[n] = lam[t] @ phi.coefficients[mesh.triangles[t]]
    return out
