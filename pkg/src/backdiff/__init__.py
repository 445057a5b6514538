"""Stable backward diffusion as gradient descent on convex repulsion
energies with range constraints, applied to image contrast enhancement."""

__version__ = "0.1.0"

from .evolution import (
    EnergyTrace,
    EvolutionConfig,
    ParticleState,
    descent_direction,
    energy,
    evolve,
    max_step,
    optimal_step,
    step,
)
from .imaging import (
    ColourImage,
    GreyImage,
    enhance_colour,
    enhance_grey_global,
    enhance_grey_local,
    from_unit,
    hue_preserving_remap,
    luminance,
    to_unit,
)
from .penaliser import (
    Penaliser,
    dflux,
    flux,
    flux_lipschitz_coarse,
    flux_lipschitz_tight,
    psi,
)
from .steady_state import (
    equalisation_lut,
    linear_flux_steady_state,
    rank_permutation,
    uniform_steady_state,
)
from .weights import (
    DenseWeights,
    GlobalHistogramWeights,
    LocalDiskWeights,
    WeightProvider,
    build_global_histogram_weights,
    build_local_disk_weights,
    gamma1,
    gamma2,
)

__all__ = [
    "__version__",
    "Penaliser", "psi", "flux", "dflux",
    "flux_lipschitz_tight", "flux_lipschitz_coarse",
    "WeightProvider", "DenseWeights", "GlobalHistogramWeights", "LocalDiskWeights",
    "build_global_histogram_weights", "build_local_disk_weights", "gamma1", "gamma2",
    "ParticleState", "EvolutionConfig", "EnergyTrace",
    "energy", "descent_direction", "step", "max_step", "optimal_step", "evolve",
    "rank_permutation", "uniform_steady_state", "linear_flux_steady_state",
    "equalisation_lut",
    "GreyImage", "ColourImage", "to_unit", "from_unit", "luminance",
    "hue_preserving_remap",
    "enhance_grey_global", "enhance_grey_local", "enhance_colour",
]
