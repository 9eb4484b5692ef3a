"""Interior p-energy and boundary p-forms on model domains.

Computes the interior energy p(p-1) int |u|^{p-2} |grad u|^2, its
signed-power variant, and the boundary Bregman double form against the
Feller kernel on the interval, the unit disk, and the unit ball, and
cross-checks the identities relating them (Douglas, Hardy-Stein,
p-variance, remainder, vanishing-boundary) by independent quadrature and
Monte Carlo.
"""

from .errors import (
    AccuracyError,
    AliasingError,
    ConfigurationError,
    DomainError,
    InvalidArgumentError,
    NonTerminationError,
    PDouglasError,
    PreconditionError,
    SingularityError,
    UnsupportedInputError,
)
from .forms import (
    BallLinearData,
    FormValue,
    QuadratureGrid,
    base_grid,
    boundary_form_hdp,
    boundary_pnorm,
    diagonal_limit,
    green_weighted_energy,
    interior_energy_edp,
    interior_energy_tilde,
    poisson_expectation,
)
from .harmonic import (
    BoundaryFunction,
    HarmonicDiskFunction,
    IntervalHarmonic,
    eval_grad_sq,
    eval_u,
    fourier_project,
    poisson_extend_pointwise,
    radial_trace,
)
from .identities import (
    FpEnvelopeReport,
    IdentityReport,
    check_douglas,
    check_fpequiv,
    check_hardy_stein,
    check_minimizer,
    check_p_variance,
    check_quasimin,
    check_remainder,
    check_trace_roundtrip,
    check_vanishing,
)
from .kernels import (
    Ball,
    Disk,
    DomainSpec,
    Exponent,
    Interval,
    KernelSet,
    bregman_fp,
    signed_power,
    symmetrized_hp,
)
from .montecarlo import (
    McConfig,
    McEstimate,
    disk_exit_cdf,
    mc_expectation,
    sample_exit_disk,
    stream_rng,
    walk_on_spheres,
)

__version__ = "0.1.0"
