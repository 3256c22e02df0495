"""Approximation of non-periodic functions on the cube [-1/2, 1/2]^d.

The pipeline periodizes a cube function with a torus-to-cube transformation,
samples it along a reconstructing rank-1 lattice, and recovers or evaluates
its coefficients on a hyperbolic cross with a single 1-D FFT per direction.
"""

from .errors import (
    DegenerateInputError,
    DivergentDensityError,
    DomainError,
    LatcubeError,
    LatticeSearchError,
    NonReconstructingLatticeError,
    ResourceLimitError,
)
from .experiment import (
    ExperimentConfig,
    SweepRow,
    builtin_function,
    loglog_slope,
    random_coefficients,
    read_csv,
    run_sweep,
    write_csv,
)
from .freqset import (
    FrequencySet,
    cross_cardinality,
    difference_set,
    from_indices,
    hc_weight,
    hyperbolic_cross,
    read_frequency_set,
    write_frequency_set,
)
from .lattice import (
    Rank1Lattice,
    TransformedLattice,
    find_reconstructing_lattice,
    is_reconstructing,
    lattice_from_line,
    lattice_to_line,
)
from .plotting import render_plot
from .spectral import (
    CoefficientVector,
    TransformedPolynomial,
    dft_forward,
    dft_inverse,
    evaluate_at_lattice,
    evaluate_partial_sum,
    lattice_quadrature,
    read_coefficients,
    read_samples,
    reconstruct_from_lattice,
    rel_discrete_error,
    sample_transformed_function,
    write_coefficients,
    write_samples,
)
from .transforms import (
    ConstantWeight,
    ErrorFunctionTransform,
    IdentityTransform,
    LogarithmicTransform,
    ProductTransform,
    SineTransform,
    Transform,
    boundary_vanishing_check,
    constant_weight,
    min_eta_for_smoothness,
    parse_product_transform,
    parse_transform,
    periodized_sample,
    periodized_samples,
)

__version__ = "0.1.0"
