"""Scaled zonal kernel quasi-interpolation on the sphere."""

__version__ = "0.1.0"

from .geometry import (PointKind, PointSet, QuadratureRule, fill_distance, load_points,  # noqa: E402
                       product_quadrature, random_points, save_points, separation_distance, spiral_points)
from .harmonics import SpectralFunction, eval_harmonic, harmonic, harmonic_dim, legendre  # noqa: E402
from .kernels import (KernelSpectrum, RadialProfile, ZonalKernel, gaussian_profile, make_kernel,  # noqa: E402
                      profile_for_order, spectrum_quadrature, spectrum_wendland, wendland_profile)
from .quasi import Approximant, NoiseModel, add_noise, qi_mc, qi_qmc, qi_weighted  # noqa: E402
from .multilevel import build_schedule, expand_operators, multilevel_approximate  # noqa: E402
from .baselines import filter_h, filtered_hyperinterpolate, hyperinterpolate  # noqa: E402
from .metrics import fit_slope, l2_error, linf_error, mmse  # noqa: E402
