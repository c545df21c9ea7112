"""Training-data generation and JSON-lines dataset IO.

One record per scatterer object: canonical 1024-point cloud (incoming wave
along -x, centroid at the origin) plus per-frequency oracle labels (grid
pressures and their order-3 SH projection). Records are generated in
rotation-augmented pairs: each base object is followed by a uniformly
rotated copy whose labels are regenerated from the oracle.
"""

from __future__ import annotations

import json

import numpy as np

from . import ASF_BANDS_HZ
from .errors import InvalidArgumentError
from .oracle import DEFAULT_REFERENCE_RADIUS, ScatterConfig, SphereScatterer, compute_asf
from .pointcloud import (
    PointCloud,
    farthest_point_sample,
    random_rotation,
    sample_sphere_surface,
)
from .shfield import project
from .sphgeom import icosphere

DEFAULT_GRID_LEVEL = 3
RAW_SURFACE_SAMPLES = 4096
SH_ORDER = 3

# single spheres: longest dimension (diameter) in [1, 2] m
SINGLE_RADIUS_RANGE = (0.5, 1.0)
# composite parts before rescaling the pair to a [1, 2] m longest dimension
COMPOSITE_RADIUS_RANGE = (0.25, 0.5)
COMPOSITE_GAP_RANGE = (0.0, 0.4)
COMPOSITE_TARGET_RANGE = (1.0, 2.0)


def _random_unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def _make_single(rng):
    radius = rng.uniform(*SINGLE_RADIUS_RANGE)
    return [SphereScatterer(radius=radius, center=(0.0, 0.0, 0.0))], "sphere"


def _make_composite(rng):
    r1 = rng.uniform(*COMPOSITE_RADIUS_RANGE)
    r2 = rng.uniform(*COMPOSITE_RADIUS_RANGE)
    axis = _random_unit(rng)
    half = (r1 + r2 + rng.uniform(*COMPOSITE_GAP_RANGE)) / 2.0
    centers = np.array([-half * axis, half * axis])
    radii = np.array([r1, r2])
    lo = (centers - radii[:, None]).min(axis=0)
    hi = (centers + radii[:, None]).max(axis=0)
    scale = rng.uniform(*COMPOSITE_TARGET_RANGE) / float((hi - lo).max())
    mid = (lo + hi) / 2.0
    centers = (centers - mid) * scale
    radii = radii * scale
    return [
        SphereScatterer(radius=float(r), center=tuple(c)) for r, c in zip(radii, centers)
    ], "composite"


def _cloud_for_spheres(spheres, rng):
    """Canonical cloud: area-weighted surface samples, FPS to 1024, then the
    sphere centers are shifted so the cloud centroid sits at the origin."""
    areas = np.array([s.radius**2 for s in spheres])
    counts = np.maximum(1, np.round(RAW_SURFACE_SAMPLES * areas / areas.sum()).astype(int))
    pts = np.vstack(
        [sample_sphere_surface(s.radius, s.center, int(n), rng) for s, n in zip(spheres, counts)]
    )
    cloud = farthest_point_sample(PointCloud(pts), min(len(pts), 1024), rng)
    centroid = cloud.centroid()
    shifted = [
        SphereScatterer(radius=s.radius, center=tuple(s.center_array - centroid)) for s in spheres
    ]
    return PointCloud(cloud.points - centroid, frame="canonical"), shifted


def _labels_for(spheres, freqs, grid, r_ref):
    labels = {}
    for f in freqs:
        cfg = ScatterConfig(scatterers=tuple(spheres), frequency=float(f))
        asf = compute_asf(cfg, grid, r_ref=r_ref)
        sh = project(asf, order=SH_ORDER)
        labels["%g" % f] = {
            "pressures": [round(float(x), 9) for x in asf.pressures],
            "sh": [round(float(x), 9) for x in sh.coeffs],
            "clip_count": asf.clip_count,
        }
    return labels


def generate_records(count, freqs=ASF_BANDS_HZ, seed=0, composites=0.0,
                     grid_level=DEFAULT_GRID_LEVEL, r_ref=DEFAULT_REFERENCE_RADIUS):
    """Rotation-augmented oracle dataset: `count` records total, generated as
    base/rotated pairs. The `composites` fraction draws two-sphere objects."""
    if count < 1:
        raise InvalidArgumentError(f"count must be >= 1, got {count}")
    if not 0.0 <= composites <= 1.0:
        raise InvalidArgumentError(f"composites fraction must be in [0, 1], got {composites}")
    freqs = [float(f) for f in freqs]
    grid = icosphere(grid_level)
    records = []
    base_index = 0
    while len(records) < count:
        rng = np.random.default_rng([seed, base_index])
        is_comp = rng.random() < composites
        spheres, kind = _make_composite(rng) if is_comp else _make_single(rng)
        cloud, spheres = _cloud_for_spheres(spheres, rng)
        records.append(
            {
                "id": len(records),
                "kind": kind,
                "spheres": [
                    {"radius": round(s.radius, 9), "center": [round(c, 9) for c in s.center]}
                    for s in spheres
                ],
                "grid_level": grid_level,
                "r_ref": r_ref,
                "points": [[round(float(c), 7) for c in p] for p in cloud.points],
                "labels": _labels_for(spheres, freqs, grid, r_ref),
            }
        )
        if len(records) < count:
            rot = random_rotation(rng)
            rot_spheres = [
                SphereScatterer(radius=s.radius, center=tuple(rot @ s.center_array))
                for s in spheres
            ]
            records.append(
                {
                    "id": len(records),
                    "kind": kind,
                    "rotated_from": records[-1]["id"],
                    "spheres": [
                        {"radius": round(s.radius, 9), "center": [round(c, 9) for c in s.center]}
                        for s in rot_spheres
                    ],
                    "grid_level": grid_level,
                    "r_ref": r_ref,
                    "points": [
                        [round(float(c), 7) for c in p] for p in cloud.points @ rot.T
                    ],
                    "labels": _labels_for(rot_spheres, freqs, grid, r_ref),
                }
            )
        base_index += 1
    return records


def save_jsonl(records, path):
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


def load_jsonl(path):
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def split_indices(n_records, seed, train_fraction=0.9):
    """Deterministic train/test split; no index lands in both."""
    order = np.random.default_rng(seed).permutation(n_records)
    n_train = int(round(n_records * train_fraction))
    return np.sort(order[:n_train]), np.sort(order[n_train:])


def arrays_for_frequency(records, freq, indices=None, dtype=np.float64):
    """(X, Y) arrays for one frequency: clouds (m, 1024, 3), SH labels (m, 16)."""
    key = "%g" % float(freq)
    if indices is None:
        indices = range(len(records))
    xs, ys = [], []
    for i in indices:
        rec = records[i]
        if key not in rec["labels"]:
            raise InvalidArgumentError(f"record {rec['id']} has no label at {freq} Hz")
        xs.append(rec["points"])
        ys.append(rec["labels"][key]["sh"])
    return np.asarray(xs, dtype=dtype), np.asarray(ys, dtype=dtype)
