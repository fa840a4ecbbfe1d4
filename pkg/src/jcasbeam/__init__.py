"""Joint communications and sensing beamformer design for multi-carrier MIMO.

Design flow: eigenmode precoding per subcarrier, selection of the weakest
subcarriers for sensing duty, beampattern-matching covariance design, and
Riemannian refinement of the sensing precoders on the transmit power sphere.
"""

from .beamgrid import (
    BeamGrid,
    angle_grid,
    build_grid,
    carrier_frequencies,
    desired_beampattern,
    steering_vector,
)
from .channel import ChannelSet, generate_rayleigh, load_channels, save_channels
from .config import SPEED_OF_LIGHT, SystemConfig, load_config, write_config
from .covariance import (
    CovarianceSolution,
    beampattern_values,
    diag_project,
    psd_project,
    solve_pattern_covariance,
    solve_radar_covariance,
)
from .errors import ConfigError, DegenerateChannelError, SolverError
from .evaluation import (
    SweepPoint,
    SweepResult,
    average_jcas_pattern,
    beampattern_gain,
    beampattern_mse,
    median_member_pattern,
    precoder_pattern,
    sweep,
)
from .manifold import (
    RcgResult,
    armijo_step,
    polak_ribiere_mu,
    project_to_tangent,
    retract,
    solve_rcg,
    tradeoff_gradient,
    tradeoff_objective,
    transport,
)
from .pipeline import (
    DesignResult,
    assemble_final_precoders,
    build_run_manifest,
    eigen_stage,
    run_design,
    select_jcas_subcarriers,
)
from .precoding import (
    WaterfillAllocation,
    achievable_rate,
    eigenmode_precoder,
    optimal_combiner,
    waterfill,
)
from .selfcheck import run_selfcheck
from .tables import emit_table, parse_table, write_table

__version__ = "0.1.0"

__all__ = [
    "BeamGrid",
    "ChannelSet",
    "ConfigError",
    "CovarianceSolution",
    "DegenerateChannelError",
    "DesignResult",
    "RcgResult",
    "SPEED_OF_LIGHT",
    "SolverError",
    "SweepPoint",
    "SweepResult",
    "SystemConfig",
    "WaterfillAllocation",
    "achievable_rate",
    "angle_grid",
    "armijo_step",
    "assemble_final_precoders",
    "average_jcas_pattern",
    "beampattern_gain",
    "beampattern_mse",
    "beampattern_values",
    "build_grid",
    "build_run_manifest",
    "carrier_frequencies",
    "desired_beampattern",
    "diag_project",
    "eigen_stage",
    "eigenmode_precoder",
    "emit_table",
    "generate_rayleigh",
    "load_channels",
    "load_config",
    "median_member_pattern",
    "optimal_combiner",
    "parse_table",
    "polak_ribiere_mu",
    "precoder_pattern",
    "project_to_tangent",
    "psd_project",
    "retract",
    "run_design",
    "run_selfcheck",
    "save_channels",
    "select_jcas_subcarriers",
    "solve_pattern_covariance",
    "solve_radar_covariance",
    "solve_rcg",
    "steering_vector",
    "sweep",
    "tradeoff_gradient",
    "tradeoff_objective",
    "transport",
    "waterfill",
    "write_config",
    "write_table",
]
