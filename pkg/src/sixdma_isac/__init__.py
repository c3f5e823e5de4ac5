"""UAV-mounted passive 6D movable IRS for ISAC: channel synthesis and two-stage optimisation."""
from .beamformer import BeamformerInfeasible, BfSolution, solve_beamformer
from .channel import ChannelSet, Scenario, build_channels, comm_channel, sensing_channels
from .config import AoOptions, SolverConfig, load_config, parse_config
from .geometry import Pose6D, Region
from .manifold import PbfOptions, PbfProblem, assemble_pbf, optimize_pbf
from .pso import InfeasiblePoseError, SwarmConfig, run_pso
from .runner import (
    Scheme,
    SchemeResult,
    alternate_optimize,
    export_results,
    read_results,
    run_scheme,
    scheme_from_name,
    standard_schemes,
    sweep_elements,
    sweep_gamma,
)

__version__ = "0.1.0"
