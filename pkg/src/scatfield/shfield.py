"""Real spherical-harmonic basis, least-squares projection of sampled
angular fields, field evaluation, and the normalized reproduction error.

The basis is the orthonormal real basis without the Condon-Shortley phase:

    Y_lm = N_lm * P_l^|m|(cos theta) * {sqrt(2) cos(m phi)  m > 0
                                        1                   m = 0
                                        sqrt(2) sin(|m| phi) m < 0}

Coefficients are stored in canonical order: l ascending, m from -l to +l.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import lpmv

from .errors import InvalidArgumentError, NumericalFailureError, UndefinedMetricError
from .sphgeom import Direction, FieldGrid, voronoi_solid_angles

DEFAULT_ORDER = 3
CONDITION_LIMIT = 1e8


@dataclass
class SHCoefficients:
    """Real SH coefficient vector of length (order+1)**2 for one frequency."""

    order: int
    coeffs: np.ndarray
    frequency: float

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        n = (self.order + 1) ** 2
        if self.coeffs.shape != (n,):
            raise InvalidArgumentError(
                f"order {self.order} needs {n} coefficients, got shape {self.coeffs.shape}"
            )
        if not np.all(np.isfinite(self.coeffs)):
            raise InvalidArgumentError("coefficients must be finite")

    def to_json(self):
        return json.dumps(
            {"frequency": self.frequency, "order": self.order, "coeffs": self.coeffs.tolist()}
        )

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(order=int(d["order"]), coeffs=np.array(d["coeffs"]), frequency=float(d["frequency"]))


@dataclass
class SphericalField:
    """Scattering gains sampled on a field grid at a reference radius."""

    grid: FieldGrid
    pressures: np.ndarray
    frequency: float
    reference_radius: float
    clip_count: int = 0

    def __post_init__(self):
        self.pressures = np.asarray(self.pressures, dtype=float)
        if self.pressures.shape != (len(self.grid),):
            raise InvalidArgumentError(
                f"pressures length {self.pressures.shape} does not match grid size {len(self.grid)}"
            )
        if self.reference_radius <= 0:
            raise InvalidArgumentError("reference_radius must be positive")
        if np.any(self.pressures < -1e-12) or np.any(self.pressures > 1.0 + 1e-12):
            raise InvalidArgumentError("pressures must lie in [0, 1]")


def _norm_factor(l, m):
    am = abs(m)
    return math.sqrt((2 * l + 1) / (4.0 * math.pi) * math.factorial(l - am) / math.factorial(l + am))


def sh_basis(l: int, m: int, d: Direction) -> float:
    """Real orthonormal spherical harmonic Y_lm evaluated at one direction."""
    if l < 0 or abs(m) > l:
        raise InvalidArgumentError(f"require 0 <= |m| <= l, got l={l}, m={m}")
    am = abs(m)
    # lpmv includes the Condon-Shortley phase; (-1)^m removes it
    p = lpmv(am, l, math.cos(d.theta)) * (-1) ** am
    n = _norm_factor(l, m)
    if m == 0:
        return float(n * p)
    if m > 0:
        return float(math.sqrt(2.0) * n * p * math.cos(m * d.phi))
    return float(math.sqrt(2.0) * n * p * math.sin(am * d.phi))


def basis_matrix(order: int, thetas, phis) -> np.ndarray:
    """(n_points, (order+1)**2) design matrix of the real SH basis."""
    if order < 0:
        raise InvalidArgumentError(f"order must be >= 0, got {order}")
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    ct = np.cos(thetas)
    cols = []
    for l in range(order + 1):
        for m in range(-l, l + 1):
            am = abs(m)
            p = lpmv(am, l, ct) * (-1) ** am
            n = _norm_factor(l, m)
            if m == 0:
                cols.append(n * p)
            elif m > 0:
                cols.append(math.sqrt(2.0) * n * p * np.cos(m * phis))
            else:
                cols.append(math.sqrt(2.0) * n * p * np.sin(am * phis))
    return np.stack(cols, axis=1)


def project(field: SphericalField, order: int = DEFAULT_ORDER) -> SHCoefficients:
    """Least-squares SH projection of a sampled field.

    Solves via normal equations; falls back to QR-based lstsq when the design
    matrix condition number exceeds 1e8.
    """
    n_coeff = (order + 1) ** 2
    if order < 0:
        raise InvalidArgumentError(f"order must be >= 0, got {order}")
    if len(field.grid) < n_coeff:
        raise InvalidArgumentError(
            f"underdetermined: {len(field.grid)} points for {n_coeff} coefficients"
        )
    a = basis_matrix(order, field.grid.thetas, field.grid.phis)
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or np.linalg.matrix_rank(a) < n_coeff:
        raise NumericalFailureError(
            f"rank-deficient SH design matrix (condition number {cond:.3e})"
        )
    if cond > CONDITION_LIMIT:
        coeffs, *_ = np.linalg.lstsq(a, field.pressures, rcond=None)
    else:
        coeffs = np.linalg.solve(a.T @ a, a.T @ field.pressures)
    return SHCoefficients(order=order, coeffs=coeffs, frequency=field.frequency)


def evaluate(c: SHCoefficients, d: Direction) -> float:
    """Sum_{l,m} c_lm Y_lm at one direction. Unclamped; callers clamp for gains."""
    row = basis_matrix(c.order, np.array([d.theta]), np.array([d.phi]))
    return float(row[0] @ c.coeffs)


def evaluate_many(c: SHCoefficients, thetas, phis) -> np.ndarray:
    return basis_matrix(c.order, thetas, phis) @ c.coeffs


def evaluate_on_grid(c: SHCoefficients, grid: FieldGrid) -> np.ndarray:
    return evaluate_many(c, grid.thetas, grid.phis)


def reconstruct_field(c: SHCoefficients, grid: FieldGrid, reference_radius: float) -> SphericalField:
    """Field from coefficients on a grid, clamped to the [0, 1] gain range."""
    values = np.clip(evaluate_on_grid(c, grid), 0.0, 1.0)
    return SphericalField(
        grid=grid, pressures=values, frequency=c.frequency, reference_radius=reference_radius
    )


def nre(target: SphericalField, predicted: SphericalField) -> float:
    """Normalized reproduction error between two fields on the same grid.

    Discretized with per-point Voronoi solid-angle weights:
    sum w |t - p|^2 / sum w |t|^2.
    """
    if target.grid is not predicted.grid and len(target.grid) != len(predicted.grid):
        raise InvalidArgumentError("fields must share a grid")
    if target.frequency != predicted.frequency:
        raise InvalidArgumentError("fields must share a frequency")
    w = voronoi_solid_angles(target.grid)
    denom = float(w @ target.pressures**2)
    if denom == 0.0:
        raise UndefinedMetricError("NRE undefined for an all-zero target field")
    num = float(w @ (target.pressures - predicted.pressures) ** 2)
    return num / denom


def nre_values(target_values, predicted_values, weights) -> float:
    """NRE on raw sample arrays with explicit quadrature weights."""
    denom = float(weights @ np.asarray(target_values) ** 2)
    if denom == 0.0:
        raise UndefinedMetricError("NRE undefined for an all-zero target field")
    num = float(weights @ (np.asarray(target_values) - np.asarray(predicted_values)) ** 2)
    return num / denom


def fit_error_curve(field: SphericalField, max_order: int):
    """Relative SH fitting error of a field for orders 0..max_order.

    Returns a list of (order, amplitude_error, energy_error) where
    amplitude_error is the solid-angle-weighted relative L2 norm of the
    residual (the square root of the energy ratio) and energy_error is its
    square, i.e. the NRE of the unclamped reconstruction.
    """
    if max_order < 0:
        raise InvalidArgumentError(f"max_order must be >= 0, got {max_order}")
    w = voronoi_solid_angles(field.grid)
    denom = float(w @ field.pressures**2)
    if denom == 0.0:
        raise UndefinedMetricError("fit error undefined for an all-zero field")
    out = []
    for order in range(max_order + 1):
        c = project(field, order)
        resid = field.pressures - evaluate_on_grid(c, field.grid)
        energy = float(w @ resid**2) / denom
        out.append((order, math.sqrt(max(energy, 0.0)), energy))
    return out
