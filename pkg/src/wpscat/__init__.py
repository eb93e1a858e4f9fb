"""Spectral simulation of quantum scattering diagnostics in phase space."""

from .errors import (
    BoundaryMassError,
    BudgetError,
    GridMismatchError,
    ParameterError,
    StepAlignmentError,
    UnsupportedOperationError,
    WpscatError,
)
from .fitting import DecayFit, fit_power_law
from .grid import (
    SpatialGrid,
    WaveFunction,
    fourier,
    gaussian,
    inner,
    inverse_fourier,
    load_wavefunction,
    save_wavefunction,
)
from .phasespace import (
    PhaseSpaceField,
    PhaseSpaceMask,
    load_field,
    mask_membership,
    masked_norm,
    ps_inner,
    ps_norm,
    save_field,
    wpt_forward,
    wpt_inverse,
    wpt_shifted,
)
from .potentials import PotentialSpec, bound_state, evaluate, sup_bound_check
from .propagators import EvolutionConfig, convergence_order, evolve, free_evolve
from .scattering import (
    ClassifyResult,
    WaveOperatorRun,
    classify_scattering,
    cook_integrand,
    estimate_wave_operator,
    inverse_limit,
    orthogonality_check,
    phase_space_bump,
    remainder,
    rho_consistency,
)
from .scattering import MaskSeries
from .windows import (
    Window,
    bump_profile,
    check_dispersion_decay,
    load_window,
    make_annulus_window,
    make_scat_window,
    save_window,
)
