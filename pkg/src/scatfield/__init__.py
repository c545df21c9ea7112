"""scatfield: learned acoustic scattering fields coupled into a Monte Carlo ray tracer.

The package covers the full pipeline: analytic ground-truth scattering fields
for rigid spheres, spherical-harmonic encoding of angular fields, a from-scratch
point-cloud regression network, a band-split ray tracer with scattering-field
coupling and diffraction compensation, and broadband impulse response synthesis.
"""

__version__ = "0.1.0"

ASF_BANDS_HZ = (125.0, 250.0, 500.0, 1000.0)
GEOMETRIC_BANDS_HZ = (2000.0, 4000.0, 8000.0)
ALL_BANDS_HZ = ASF_BANDS_HZ + GEOMETRIC_BANDS_HZ

SOUND_SPEED = 343.0
