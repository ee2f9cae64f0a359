"""Radial groundstate solver and identity-verification harness for the
generalized Choquard equation -Delta u + u = (I_alpha * |u|^p)|u|^(p-2) u."""

from .errors import (
    ChoquardError,
    DegenerateInputError,
    DomainError,
    InputError,
    InvalidArgumentError,
    NonexistenceError,
    PairingError,
    RegimeError,
    StagnationError,
    UnreliableTailError,
)
from .grid import (
    ProblemParams,
    RadialGrid,
    RadialProfile,
    dilate,
    grad_norm_sq,
    integrate,
    load_profile_csv,
    make_grid,
    save_profile_csv,
)
from .riesz import (
    KernelMatrix,
    angular_kernel,
    assemble_kernel,
    farfield_deviation,
    load_kernel,
    riesz_constant,
    riesz_convolve,
    save_kernel,
)
from .functionals import (
    FunctionalValues,
    ScanReport,
    dilation_scan,
    evaluate,
    integral_identity_residual,
    mass_energy_coefficient,
    nehari_project,
    nehari_residual,
    pohozaev_residual,
)
from .linsolve import PlateauReport, RadialBVP, power_rhs_check, solve_bvp
from .groundstate import (
    GroundstateResult,
    SolverConfig,
    VerificationReport,
    init_profile,
    solve_groundstate,
    verify_groundstate,
)
from .asymptotics import (
    DecayReport,
    agmon_integral,
    decay_limit,
    fit_tail_power,
    log_derivative,
    nu_parameter,
)
from .polarization import (
    DiscreteField,
    HalfSpace,
    pairing_inequality_check,
    polarize,
    reflect,
    riesz_pairing,
    run_campaign,
    symmetry_fixed_point_check,
)

__version__ = "0.1.0"
