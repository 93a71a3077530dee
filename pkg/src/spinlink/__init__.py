"""Entangled qudit links through interacting spin-s chains.

Thermal and quench protocols for engineering maximally entangled states
between the two end sites of an open chain, with a Lanczos eigensolver,
Chebyshev time propagation, and logarithmic-negativity measures.
"""

from .dynamics import (
    BoundsError,
    OmegaScanResult,
    QuenchSetup,
    Trajectory,
    chebyshev_evolve,
    default_time_grid,
    entanglement_trajectory,
    maximize_over_omega,
    prepare_initial_state,
)
from .eigensolver import (
    ConvergenceError,
    EigenPairs,
    dense_spectrum,
    lanczos_lowest,
    spectral_bounds,
)
from .equilibrium import (
    LambdaScanSummary,
    ThermalPoint,
    entanglement_vs_lambda,
    thermal_link_state,
)
from .measures import (
    LinkDensityMatrix,
    LogNegativity,
    SpectralEnsemble,
    log_negativity,
    partial_transpose,
    purity,
    reduce_to_links,
    reduce_to_links_naive,
)
from .model import (
    CapacityError,
    ChainSpec,
    build_hamiltonian,
    total_sz,
    two_site_coupling,
)
from .spins import (
    SiteLayout,
    SparseHermitian,
    SpinOps,
    embed_operator,
    rotation_unitary,
    spin_operators,
)

__version__ = "0.1.0"

__all__ = [
    "BoundsError",
    "CapacityError",
    "ChainSpec",
    "ConvergenceError",
    "EigenPairs",
    "LambdaScanSummary",
    "LinkDensityMatrix",
    "LogNegativity",
    "OmegaScanResult",
    "QuenchSetup",
    "SiteLayout",
    "SparseHermitian",
    "SpectralEnsemble",
    "SpinOps",
    "ThermalPoint",
    "Trajectory",
    "build_hamiltonian",
    "chebyshev_evolve",
    "default_time_grid",
    "dense_spectrum",
    "embed_operator",
    "entanglement_trajectory",
    "entanglement_vs_lambda",
    "lanczos_lowest",
    "log_negativity",
    "maximize_over_omega",
    "partial_transpose",
    "prepare_initial_state",
    "purity",
    "reduce_to_links",
    "reduce_to_links_naive",
    "rotation_unitary",
    "spectral_bounds",
    "spin_operators",
    "thermal_link_state",
    "total_sz",
    "two_site_coupling",
]
