"""Numerical laboratory for the periodic Schrodinger-Boussinesq system.

Builds the explicit cnoidal traveling waves and their frequency branch,
verifies the spectral and convexity conditions behind orbital stability,
evolves the full coupled system with an exponential integrator, and
probes the modulation-space product estimates and their sharpness
exponents on a discrete lattice.
"""

__version__ = "0.1.0"

from .cnoidal import (
    WaveParams,
    WaveProfile,
    branch_sample,
    build_wave,
    ode_residual,
    period,
    roots_from_beta2,
    solve_beta2,
)
from .continuation import SolutionPair, continue_branch, newton_solve, pair_from_wave
from .elliptic import EllipticModulus, EllipticPair, complete_elliptic, jacobi
from .evolution import EvolveResult, SBState, SolverConfig, evolve, linear_symbols, step
from .functionals import (
    ConservedReport,
    StabilityIndex,
    b_norm,
    d_prime,
    d_second,
    energy,
    mass,
)
from .grid import FourierGrid, SpectralField, dealias, derivative, sobolev_norm, sobolev_product
from .hill import Spectrum, assemble, kernel_check, spectrum
from .orbital import OrbitalDistanceResult, stability_experiment, x_distance
from .probe import (
    LatticeFunction,
    bilinear_ratio_sample,
    counterexample_slope,
    lemma31_check,
    lemma32_sup,
    lemma33_sup,
    x_norm,
)
