"""Point-cloud construction and preprocessing.

Covers mesh surface sampling, farthest point sampling down to the regressor's
fixed N=1024, scattering-region extraction around ray hit points, rotation of
clouds into the canonical incoming-wave frame (wave travelling along -x), and
uniform random rotations for dataset augmentation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyRegionError, InvalidArgumentError
from .sphgeom import Direction, sph_to_cart

REGRESSOR_POINT_COUNT = 1024
REGION_EXTEND = 0.5          # m along the ray from the hit point
REGION_RADIUS = 1.0          # m search radius around the region center
REGION_JITTER = 1e-6         # m, upper bound for duplicate-point jitter
HASH_CELL = 0.5              # m, spatial hash cell size
MINUS_X = np.array([-1.0, 0.0, 0.0])


def as_rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


@dataclass
class PointCloud:
    """Points in meters; frame is 'world' or 'canonical' (incoming along -x,
    centered at the centroid)."""

    points: np.ndarray
    frame: str = "world"

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 3:
            raise InvalidArgumentError(f"points must have shape (n, 3), got {self.points.shape}")
        if not np.all(np.isfinite(self.points)):
            raise InvalidArgumentError("point coordinates must be finite")
        if self.frame not in ("world", "canonical"):
            raise InvalidArgumentError(f"frame must be 'world' or 'canonical', got {self.frame!r}")

    @property
    def count(self):
        return len(self.points)

    def centroid(self):
        return self.points.mean(axis=0)


@dataclass
class TriangleMesh:
    vertices: np.ndarray
    faces: np.ndarray
    is_wall: bool = False
    is_scatterer: bool = False

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        self.faces = np.asarray(self.faces, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise InvalidArgumentError("vertices must have shape (n, 3)")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise InvalidArgumentError("faces must have shape (m, 3)")
        if len(self.faces) and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise InvalidArgumentError("face indices out of range")
        if len(self.faces) and np.any(self.triangle_areas() <= 1e-12):
            raise InvalidArgumentError("mesh contains degenerate triangles")

    def triangles(self):
        return self.vertices[self.faces]

    def triangle_areas(self):
        t = self.triangles()
        cross = np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0])
        return 0.5 * np.linalg.norm(cross, axis=1)

    def area(self):
        return float(self.triangle_areas().sum())

    def transformed(self, rotation=None, translation=None, about=None):
        """New mesh with vertices rotated about `about` (default rest centroid)
        then translated."""
        v = self.vertices
        if rotation is not None:
            c = v.mean(axis=0) if about is None else np.asarray(about, dtype=float)
            v = (v - c) @ np.asarray(rotation).T + c
        if translation is not None:
            v = v + np.asarray(translation, dtype=float)
        return TriangleMesh(v, self.faces, is_wall=self.is_wall, is_scatterer=self.is_scatterer)


def load_obj(path, is_wall=False, is_scatterer=False) -> TriangleMesh:
    """Wavefront OBJ reader: v and f records, fan-triangulating polygons."""
    verts, faces = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(tok.split("/")[0]) for tok in parts[1:]]
                idx = [i - 1 if i > 0 else len(verts) + i for i in idx]
                for a, b in zip(idx[1:-1], idx[2:]):
                    faces.append((idx[0], a, b))
    if not faces:
        raise InvalidArgumentError(f"no faces found in OBJ file {path}")
    return TriangleMesh(np.array(verts), np.array(faces), is_wall=is_wall, is_scatterer=is_scatterer)


def save_obj(mesh: TriangleMesh, path):
    with open(path, "w") as fh:
        for v in mesh.vertices:
            fh.write("v %.9g %.9g %.9g\n" % tuple(v))
        for f in mesh.faces:
            fh.write("f %d %d %d\n" % (f[0] + 1, f[1] + 1, f[2] + 1))


def sample_surface(mesh: TriangleMesh, n: int, seed) -> PointCloud:
    """n points sampled area-uniformly on the mesh surface."""
    if len(mesh.faces) < 1:
        raise InvalidArgumentError("mesh has no triangles")
    if n < 1:
        raise InvalidArgumentError(f"need n >= 1, got {n}")
    rng = as_rng(seed)
    areas = mesh.triangle_areas()
    tri_idx = rng.choice(len(areas), size=n, p=areas / areas.sum())
    u = rng.random(n)
    v = rng.random(n)
    # square-root trick for uniform barycentric coordinates
    su = np.sqrt(u)
    b0, b1 = 1.0 - su, su * (1.0 - v)
    b2 = su * v
    t = mesh.triangles()[tri_idx]
    pts = b0[:, None] * t[:, 0] + b1[:, None] * t[:, 1] + b2[:, None] * t[:, 2]
    return PointCloud(pts, frame="world")


def sample_sphere_surface(radius, center, n, rng) -> np.ndarray:
    """Area-uniform points on an analytic sphere (oracle-side scatterers)."""
    z = 1.0 - 2.0 * rng.random(n)
    phi = 2.0 * np.pi * rng.random(n)
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    unit = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    return np.asarray(center, dtype=float) + radius * unit


def farthest_point_sample(pc: PointCloud, n: int, seed) -> PointCloud:
    """Greedy max-min subset of exactly n points; output points are input
    points (exact coordinates), starting from a seeded random index."""
    if n < 1 or n > pc.count:
        raise InvalidArgumentError(f"need 1 <= n <= {pc.count}, got {n}")
    rng = as_rng(seed)
    pts = pc.points
    selected = np.empty(n, dtype=np.int64)
    selected[0] = rng.integers(pc.count)
    dist = np.linalg.norm(pts - pts[selected[0]], axis=1)
    for i in range(1, n):
        selected[i] = np.argmax(dist)
        dist = np.minimum(dist, np.linalg.norm(pts - pts[selected[i]], axis=1))
    return PointCloud(pts[selected].copy(), frame=pc.frame)


class SurfacePointIndex:
    """Uniform spatial hash over precomputed surface points, cell size 0.5 m.

    Rebuilt per frame for moving geometry; O(1) radius queries for region
    extraction.
    """

    def __init__(self, points, cell=HASH_CELL):
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.cell = float(cell)
        self._buckets = {}
        keys = np.floor(self.points / self.cell).astype(np.int64)
        for i, key in enumerate(map(tuple, keys)):
            self._buckets.setdefault(key, []).append(i)

    def query_ball(self, center, radius) -> np.ndarray:
        center = np.asarray(center, dtype=float)
        lo = np.floor((center - radius) / self.cell).astype(np.int64)
        hi = np.floor((center + radius) / self.cell).astype(np.int64)
        idx = []
        for i in range(lo[0], hi[0] + 1):
            for j in range(lo[1], hi[1] + 1):
                for k in range(lo[2], hi[2] + 1):
                    idx.extend(self._buckets.get((i, j, k), ()))
        if not idx:
            return np.empty((0, 3))
        cand = self.points[np.asarray(idx, dtype=np.int64)]
        keep = np.linalg.norm(cand - center, axis=1) <= radius
        return cand[keep]


def extract_region(index: SurfacePointIndex, hit_point, ray_dir, seed, n=REGRESSOR_POINT_COUNT) -> PointCloud:
    """Scattering-region cloud: all surface points within 1 m of the point
    0.5 m beyond the hit along the ray, resampled to exactly n points.

    Under-filled regions are upsampled by repetition with sub-micron jitter,
    which leaves a max-pooled representation effectively unchanged.
    """
    hit_point = np.asarray(hit_point, dtype=float)
    ray_dir = np.asarray(ray_dir, dtype=float)
    center = hit_point + REGION_EXTEND * ray_dir
    pts = index.query_ball(center, REGION_RADIUS)
    if len(pts) == 0:
        raise EmptyRegionError(f"no surface points within {REGION_RADIUS} m of {center}")
    rng = as_rng(seed)
    if len(pts) >= n:
        return farthest_point_sample(PointCloud(pts), n, rng)
    reps = -(-n // len(pts))
    tiled = np.tile(pts, (reps, 1))[:n]
    jitter = rng.uniform(-REGION_JITTER / 2.0, REGION_JITTER / 2.0, size=tiled.shape)
    jitter[: len(pts)] = 0.0  # originals stay exact
    return PointCloud(tiled + jitter, frame="world")


def rotation_to_minus_x(incoming_vec) -> np.ndarray:
    """Minimal proper rotation mapping the incoming unit vector onto -x.

    The antipodal case (incoming = +x) uses a half-turn about +z.
    """
    v = np.asarray(incoming_vec, dtype=float)
    v = v / np.linalg.norm(v)
    c = float(v @ MINUS_X)
    if c > 1.0 - 1e-12:
        return np.eye(3)
    if c < -1.0 + 1e-12:
        return np.diag([-1.0, -1.0, 1.0])  # pi about +z
    axis = np.cross(v, MINUS_X)
    s = np.linalg.norm(axis)
    axis = axis / s
    kx, ky, kz = axis
    k_mat = np.array([[0, -kz, ky], [kz, 0, -kx], [-ky, kx, 0]])
    return np.eye(3) + s * k_mat + (1.0 - c) * (k_mat @ k_mat)


def align_incoming(pc: PointCloud, incoming: Direction | np.ndarray) -> PointCloud:
    """Center the cloud at its centroid and rotate the incoming wave
    direction onto -x; the result is in the canonical frame."""
    vec = sph_to_cart(incoming) if isinstance(incoming, Direction) else np.asarray(incoming, float)
    rot = rotation_to_minus_x(vec)
    centered = pc.points - pc.centroid()
    return PointCloud(centered @ rot.T, frame="canonical")


def rescale_longest_dim(obj, target: float):
    """Uniformly scale a cloud or mesh so its longest AABB dimension equals
    target, preserving the AABB center."""
    pts = obj.points if isinstance(obj, PointCloud) else obj.vertices
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    extent = float((hi - lo).max())
    if extent <= 0.0:
        raise InvalidArgumentError("degenerate bounding box, cannot rescale")
    center = (lo + hi) / 2.0
    scaled = (pts - center) * (target / extent) + center
    if isinstance(obj, PointCloud):
        return PointCloud(scaled, frame=obj.frame)
    return TriangleMesh(scaled, obj.faces, is_wall=obj.is_wall, is_scatterer=obj.is_scatterer)


def random_rotation(rng) -> np.ndarray:
    """Uniform random rotation matrix via a uniform unit quaternion."""
    q = rng.standard_normal(4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )
