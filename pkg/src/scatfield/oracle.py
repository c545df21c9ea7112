"""Analytic ground truth for plane-wave scattering from sound-hard spheres.

The classical partial-wave series solves the exterior Helmholtz problem with
a zero Neumann boundary condition on the sphere surface. For a unit incident
plane wave exp(i k khat . x) and a sphere of radius a, the scattered pressure
at distance r and angle gamma from the propagation axis (gamma = 0 is the
forward direction) is

    p_s = -sum_l i^l (2l+1) [j_l'(ka) / h_l'(ka)] h_l(kr) P_l(cos gamma),

with h_l the spherical Hankel function of the first kind. Multi-sphere
configurations use single-scattering superposition with the plane-wave phase
at each sphere center; inter-sphere multiple scattering is ignored.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import spherical_jn, spherical_yn

from .errors import InvalidArgumentError, NumericalFailureError
from .sphgeom import Direction, FieldGrid, sph_to_cart
from .shfield import SphericalField

log = logging.getLogger(__name__)

SUPPORTED_FREQUENCIES = (125.0, 250.0, 500.0, 1000.0)
DEFAULT_SOUND_SPEED = 343.0
DEFAULT_REFERENCE_RADIUS = 5.0
CONVERGENCE_RTOL = 1e-9

# incoming waves travel toward -x unless configured otherwise
CANONICAL_INCOMING = Direction(theta=np.pi / 2.0, phi=np.pi)


@dataclass(frozen=True)
class SphereScatterer:
    radius: float
    center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not (self.radius > 0.0) or not np.isfinite(self.radius):
            raise InvalidArgumentError(f"sphere radius must be > 0, got {self.radius}")
        c = tuple(float(x) for x in self.center)
        if len(c) != 3 or not all(np.isfinite(c)):
            raise InvalidArgumentError(f"sphere center must be a finite 3-vector, got {self.center}")
        object.__setattr__(self, "center", c)

    @property
    def center_array(self):
        return np.asarray(self.center, dtype=float)


@dataclass(frozen=True)
class ScatterConfig:
    scatterers: tuple
    frequency: float
    sound_speed: float = DEFAULT_SOUND_SPEED
    incoming: Direction = CANONICAL_INCOMING

    def __post_init__(self):
        if self.frequency not in SUPPORTED_FREQUENCIES:
            raise InvalidArgumentError(
                f"frequency must be one of {SUPPORTED_FREQUENCIES}, got {self.frequency}"
            )
        scats = tuple(self.scatterers)
        if not scats:
            raise InvalidArgumentError("at least one scatterer is required")
        object.__setattr__(self, "scatterers", scats)

    @property
    def wavenumber(self):
        return 2.0 * np.pi * self.frequency / self.sound_speed

    @property
    def propagation_axis(self):
        return sph_to_cart(self.incoming)

    def to_dict(self):
        return {
            "scatterers": [{"radius": s.radius, "center": list(s.center)} for s in self.scatterers],
            "frequency": self.frequency,
            "sound_speed": self.sound_speed,
            "incoming": {"theta": self.incoming.theta, "phi": self.incoming.phi},
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            scatterers=tuple(
                SphereScatterer(radius=s["radius"], center=tuple(s["center"]))
                for s in d["scatterers"]
            ),
            frequency=float(d["frequency"]),
            sound_speed=float(d.get("sound_speed", DEFAULT_SOUND_SPEED)),
            incoming=Direction(**d["incoming"]) if "incoming" in d else CANONICAL_INCOMING,
        )


def truncation_order(ka: float) -> int:
    return int(np.ceil(ka + 10.0 + 4.0 * ka ** (1.0 / 3.0)))


def _hankel1(orders, z):
    return spherical_jn(orders, z) + 1j * spherical_yn(orders, z)


def _hankel1_deriv(orders, z):
    return spherical_jn(orders, z, derivative=True) + 1j * spherical_yn(orders, z, derivative=True)


def _series_pair(ka, kr, cosg, order):
    """Scattered field summed to `order` and to order // 2, one evaluation."""
    ls = np.arange(order + 1)
    coef = (
        -((1j) ** ls)
        * (2 * ls + 1)
        * spherical_jn(ls, ka, derivative=True)
        / _hankel1_deriv(ls, ka)
    )
    radial = _hankel1(ls[None, :], kr[:, None])
    angular = np.polynomial.legendre.legvander(cosg, order)
    terms = radial * angular * coef[None, :]
    half = order // 2
    return terms.sum(axis=1), terms[:, : half + 1].sum(axis=1)


def _scattered_series(ka, kr, cosg):
    """Converged scattered pressure for one sphere, vectorized over points.

    Evaluates at twice the nominal truncation order and checks that the
    doubled tail changes nothing beyond CONVERGENCE_RTOL of the field scale.
    """
    full, half = _series_pair(ka, kr, cosg, 2 * truncation_order(ka))
    scale = np.max(np.abs(full))
    if scale > 0.0:
        drift = np.max(np.abs(full - half)) / scale
        if not np.isfinite(drift) or drift > CONVERGENCE_RTOL:
            raise NumericalFailureError(
                f"partial-wave series did not converge at ka={ka:.4g} "
                f"(relative drift {drift:.3e} after doubling the truncation order)"
            )
    return full


def sphere_scattered_pressure(ka, kr, gamma):
    """Complex scattered pressure for a rigid sphere under a unit plane wave.

    Arguments broadcast; gamma is the angle from the propagation axis
    (gamma = 0 forward, gamma = pi backscatter). Exterior points only.
    """
    ka = float(ka)
    if ka <= 0.0:
        raise InvalidArgumentError(f"ka must be > 0, got {ka}")
    kr_arr, gamma_arr = np.broadcast_arrays(
        np.asarray(kr, dtype=float), np.asarray(gamma, dtype=float)
    )
    shape = kr_arr.shape
    kr_flat = kr_arr.reshape(-1)
    if np.any(kr_flat <= ka):
        raise InvalidArgumentError("kr must be > ka (exterior point)")
    out = _scattered_series(ka, kr_flat, np.cos(gamma_arr.reshape(-1)))
    if shape == ():
        return complex(out[0])
    return out.reshape(shape)


def incident_plane_wave(kr, cosg):
    """Unit plane wave exp(i k khat . x) expressed in (kr, cos gamma)."""
    return np.exp(1j * np.asarray(kr, dtype=float) * np.asarray(cosg, dtype=float))


def scattered_field_at(cfg: ScatterConfig, points) -> np.ndarray:
    """Complex scattered pressure at Cartesian points (n, 3), superposed
    over the configuration's spheres in a canonical order."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    k = cfg.wavenumber
    khat = cfg.propagation_axis
    total = np.zeros(len(points), dtype=complex)
    for s in sorted(cfg.scatterers, key=lambda s: (s.radius, s.center)):
        rel = points - s.center_array
        r = np.linalg.norm(rel, axis=1)
        if np.any(r <= s.radius):
            raise InvalidArgumentError(
                f"field point inside scatterer (radius {s.radius} at {s.center})"
            )
        cosg = (rel @ khat) / r
        phase = np.exp(1j * k * (khat @ s.center_array))
        total = total + phase * _scattered_series(k * s.radius, k * r, np.clip(cosg, -1.0, 1.0))
    return total


def compute_asf(
    cfg: ScatterConfig, grid: FieldGrid, r_ref: float = DEFAULT_REFERENCE_RADIUS
) -> SphericalField:
    """Acoustic scattering field: |scattered pressure| at radius r_ref on the
    grid, for a unit incident plane wave, clipped to the [0, 1] gain range."""
    max_extent = max(np.linalg.norm(s.center_array) + s.radius for s in cfg.scatterers)
    if r_ref <= max_extent:
        raise InvalidArgumentError(
            f"r_ref={r_ref} must exceed the scatterer extent {max_extent:.3f}"
        )
    mags = np.abs(scattered_field_at(cfg, grid.points * r_ref))
    clipped = int(np.count_nonzero(mags > 1.0))
    if clipped:
        log.warning("ASF clipping: %d of %d field points exceeded gain 1", clipped, len(mags))
    return SphericalField(
        grid=grid,
        pressures=np.clip(mags, 0.0, 1.0),
        frequency=cfg.frequency,
        reference_radius=r_ref,
        clip_count=clipped,
    )


DEFAULT_FALLOFF_AZIMUTHS_DEG = (0.0, 72.0, 144.0, 216.0, 288.0)


def falloff_directions(cfg: ScatterConfig, azimuths_deg=DEFAULT_FALLOFF_AZIMUTHS_DEG):
    """Directions in the incidence plane (the x-y plane for -x incidence),
    rotated from the propagation axis by the given azimuths."""
    khat = cfg.propagation_axis
    dirs = []
    for az in azimuths_deg:
        a = np.radians(az)
        # rotate khat about +z, valid while the incidence axis lies in x-y
        rot = np.array(
            [[np.cos(a), -np.sin(a), 0.0], [np.sin(a), np.cos(a), 0.0], [0.0, 0.0, 1.0]]
        )
        dirs.append(rot @ khat)
    return np.array(dirs)


def radial_falloff_study(cfg: ScatterConfig, directions=None, radii=None, r_ref=DEFAULT_REFERENCE_RADIUS):
    """Inverse-distance-law study: oracle |p| against the r_ref-anchored fit.

    Returns a list of rows
    (azimuth_deg, radius, oracle_mag, fitted_mag, relative_error)
    where fitted_mag = |p(r_ref)| * r_ref / r.
    """
    if directions is None:
        azimuths = DEFAULT_FALLOFF_AZIMUTHS_DEG
        dirs = falloff_directions(cfg, azimuths)
    else:
        dirs = np.array([sph_to_cart(d) for d in directions])
        azimuths = [np.degrees(np.arccos(np.clip(d @ cfg.propagation_axis, -1, 1))) for d in dirs]
    if radii is None:
        radii = np.arange(1.0, 10.0 + 1e-9, 0.5)
    radii = np.asarray(radii, dtype=float)
    if np.any(radii < 1.0) or np.any(radii > 10.0):
        raise InvalidArgumentError("radii must lie in [1, 10] m")

    rows = []
    for az, d in zip(azimuths, dirs):
        anchor = float(np.abs(scattered_field_at(cfg, d[None, :] * r_ref))[0])
        mags = np.abs(scattered_field_at(cfg, d[None, :] * radii[:, None]))
        for r, mag in zip(radii, mags):
            fit = anchor * r_ref / r
            rows.append((float(az), float(r), float(mag), float(fit), abs(fit - mag) / mag))
    return rows


def falloff_rows_to_csv(rows, path):
    with open(path, "w") as f:
        f.write("azimuth_deg,radius_m,oracle_mag,fitted_mag,relative_error\n")
        for row in rows:
            f.write("%.6g,%.6g,%.10g,%.10g,%.6g\n" % row)
