"""Gaussian-state Fisher information toolbox (hbar = 2 convention, vacuum V = I)."""

from .gaussian_core import (
    GaussianState,
    SymplecticOp,
    omega,
    vacuum,
    thermal,
    coherent,
    squeezed_vacuum,
    rotation,
    single_mode_squeezer,
    two_mode_squeezer,
    beam_splitter_5050,
    displacement_op,
    apply,
    compose,
    purity,
    probe_tmsdt,
    wigner_at,
    char_fn_at,
    duan_criterion,
)
from .channels import NoisyChannel, diffusion_matrix, evolve
from .qfi_gaussian import (
    GaussianModel,
    displacement_model,
    phase_model,
    sld_components,
    rld_components,
    qfim_sld,
    qfim_rld,
    incompatibility,
    quantumness,
    bound_chain,
    qfim_report,
)
from .scenarios import ScenarioConfig, closed_form_bounds, run_point, sweep

__version__ = "0.1.0"
