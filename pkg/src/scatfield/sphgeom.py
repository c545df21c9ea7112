"""Spherical geometry primitives: icosphere field grids, coordinate
conversions, uniform direction sampling and solid-angle quadrature weights.

Convention: physics convention throughout, theta is the polar angle from +z
in [0, pi], phi the azimuth from +x in [0, 2*pi). At the poles phi is 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import SphericalVoronoi

from .errors import InvalidArgumentError

MAX_ICOSPHERE_LEVEL = 6


@dataclass(frozen=True)
class Direction:
    """A direction on the unit sphere, (theta, phi) in radians."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi):
            raise InvalidArgumentError(f"theta must be in [0, pi], got {self.theta}")
        object.__setattr__(self, "phi", float(np.mod(self.phi, 2.0 * np.pi)))


@dataclass(frozen=True)
class FieldGrid:
    """Ordered unit vectors sampling the sphere, from icosphere subdivision."""

    points: np.ndarray  # (n, 3) unit vectors
    subdivision_level: int

    def __len__(self):
        return len(self.points)

    @property
    def thetas(self):
        return np.arccos(np.clip(self.points[:, 2], -1.0, 1.0))

    @property
    def phis(self):
        return np.mod(np.arctan2(self.points[:, 1], self.points[:, 0]), 2.0 * np.pi)

    def to_csv(self, path):
        """Write one x,y,z row per grid point."""
        np.savetxt(path, self.points, delimiter=",", header="x,y,z", comments="")


def _base_icosahedron():
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
            (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
            (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
        ],
        dtype=float,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    return list(verts), faces


def icosphere_mesh(level: int):
    """Subdivided icosahedron as (vertices, faces); vertices on the unit sphere.

    Midpoint subdivision with shared-edge vertex dedup; ordering is
    deterministic (base vertices first, then midpoints in creation order).
    """
    if not isinstance(level, (int, np.integer)) or isinstance(level, bool):
        raise InvalidArgumentError(f"level must be an integer, got {level!r}")
    if level < 0 or level > MAX_ICOSPHERE_LEVEL:
        raise InvalidArgumentError(
            f"icosphere level must be in [0, {MAX_ICOSPHERE_LEVEL}], got {level}"
        )
    verts, faces = _base_icosahedron()
    for _ in range(level):
        midpoint_cache = {}

        def midpoint(i, j):
            key = (i, j) if i < j else (j, i)
            if key not in midpoint_cache:
                v = verts[i] + verts[j]
                verts.append(v / np.linalg.norm(v))
                midpoint_cache[key] = len(verts) - 1
            return midpoint_cache[key]

        new_faces = []
        for (a, b, c) in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    return np.array(verts), np.array(faces, dtype=np.int64)


def icosphere(level: int = 3) -> FieldGrid:
    """Field grid with 10 * 4**level + 2 near-evenly distributed unit points."""
    verts, _ = icosphere_mesh(level)
    return FieldGrid(points=verts, subdivision_level=int(level))


def cart_to_sph(v) -> Direction:
    """Unit Cartesian vector -> Direction. Poles map to phi = 0."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if abs(n - 1.0) > 1e-9:
        raise InvalidArgumentError(f"expected a unit vector, |v| = {n}")
    theta = float(np.arccos(np.clip(v[2], -1.0, 1.0)))
    if min(theta, np.pi - theta) < 1e-15:
        phi = 0.0
    else:
        phi = float(np.mod(np.arctan2(v[1], v[0]), 2.0 * np.pi))
    return Direction(theta=theta, phi=phi)


def sph_to_cart(d: Direction) -> np.ndarray:
    st = np.sin(d.theta)
    return np.array([st * np.cos(d.phi), st * np.sin(d.phi), np.cos(d.theta)])


def cart_to_sph_array(vecs):
    """Vectorized (n,3) unit vectors -> (thetas, phis)."""
    vecs = np.asarray(vecs, dtype=float)
    theta = np.arccos(np.clip(vecs[:, 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(vecs[:, 1], vecs[:, 0]), 2.0 * np.pi)
    polar = np.minimum(theta, np.pi - theta) < 1e-15
    phi[polar] = 0.0
    return theta, phi


def uniform_direction(rng) -> Direction:
    """One direction distributed uniformly over the sphere."""
    u, v = rng.random(2)
    theta = np.arccos(1.0 - 2.0 * u)
    return Direction(theta=float(theta), phi=float(2.0 * np.pi * v))


def uniform_directions(rng, n) -> np.ndarray:
    """(n, 3) unit vectors uniform on the sphere, deterministic given rng state."""
    u = rng.random(n)
    v = rng.random(n)
    z = 1.0 - 2.0 * u
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = 2.0 * np.pi * v
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


_solid_angle_cache: dict = {}


def voronoi_solid_angles(grid: FieldGrid) -> np.ndarray:
    """Per-point solid angle weights (spherical Voronoi cell areas), sum 4*pi."""
    key = (grid.subdivision_level, len(grid))
    if key not in _solid_angle_cache:
        sv = SphericalVoronoi(grid.points, radius=1.0)
        _solid_angle_cache[key] = sv.calculate_areas()
    return _solid_angle_cache[key]
