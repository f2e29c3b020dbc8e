"""QND coupling of OAM light modes with atomic spin waves and a parallel SWAP protocol."""
from .errors import ConfigError, ConsistencyError, NumericFailure, QndSwapError, SingularParameterError
from .lgmodes import BeamGeometry, OverlapTable, overlap_chi, overlap_table
from .coupling import SystemConfig, build_H, build_M, build_S, couplings_for, effective_constants
from .bogoliubov import LinearOpMap, OperatorLinearForm, compose, invert, qnd_map, rotation_map, substitute
from .spectral import EigenSystem, QubitEncoding, eigendecompose, group_tetrads
from .fock import FockState, apply_form, decompose, evaluate_on_vacuum, fidelity, inner
from .protocol import (
    ProtocolParams,
    QubitAmplitudes,
    Scenario,
    alpha_closed_form,
    pick_constants,
    run_parallel,
    run_scenario,
    run_swap,
    sweep,
)

__version__ = "0.1.0"
