"""phasekit: numerical phase-space quasi-probability distributions.

Builds, inter-converts, verifies and time-evolves the real Wigner
distribution and the complex Sobouti-Nasiri (Kirkwood-type) distribution on
spectrally paired periodic grids.
"""

from .core import (
    DensityMatrix,
    Kind,
    MomentumGrid,
    PhaseSpaceDistribution,
    PhysicalConstants,
    PositionGrid,
    Wavefunction,
    from_momentum_representation,
    make_position_grid,
    momentum_grid_of,
    to_momentum_representation,
)
from .dynamics import (
    EvolutionConfig,
    PolynomialPotential,
    evolve_schrodinger_oracle,
    evolve_wigner,
    wigner_rhs,
)
from .errors import (
    BoundaryLeak,
    DegenerateInterval,
    GridMismatch,
    InvalidSpec,
    InvariantViolation,
    NonPowerOfTwo,
    PhasekitError,
    StepTooLarge,
    WeightMismatch,
    WrongKind,
)
from .observables import (
    BuiltinObservable,
    OperatorKernel,
    WeylSymbol,
    builtin_symbol,
    expect_operator_oracle,
    expect_phase_space,
    hamiltonian_kernel,
    identity_kernel,
    kernel_from_symbol,
    kinetic_kernel,
    momentum_kernel,
    observable_pair,
    position_kernel,
    potential_kernel,
    weyl_symbol_of_kernel,
)
from .states import (
    StateSpec,
    build_state,
    density_from_pure,
    density_mixture,
    ho_eigenstates,
    seeded_level_mixtures,
)
from .transforms import (
    MarginalVector,
    momentum_density_oracle,
    momentum_marginal,
    normalization,
    position_marginal,
    sn_from_density,
    sn_to_wigner,
    wigner_from_density,
    wigner_from_wavefunction,
)

__version__ = "0.1.0"
