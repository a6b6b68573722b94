"""Numerical laboratory for many-body quantum metrology: Fisher-information
engines for dynamical, diagonal-ensemble, Gibbs and transient scenarios,
optimal-control constructions, precision bounds, and a scenario harness.
"""
from .version import __version__
from .errors import (ConfigError, ContractViolationError, DegenerateEncodingError,
                     FlatSignalError, IntegrationAccuracyError, MetrolabError)
from .spin import (DickeSpace, EigenspacePartition, HermitianOperator,
                   QuantumState, SpectralDecomposition, collective_ops,
                   collective_sum, eig_hermitian, group_eigenspaces, hermitian,
                   min_gap, mixed_state, pinch, pure_state, spin_coherent_state,
                   tensor_operator)
from .models import (HamiltonianFamily, build_central_spin, build_qutrit_dephasing_control,
                     build_result2_control, build_result2_control_for_signal,
                     build_spin_squeezing, gibbs_state)
from .fisher import (FisherReport, cfi_projective, dephased_state_family,
                     error_propagation_precision, fd_default_step, oat_closed_form,
                     qfi_diagonal_ensemble, qfi_mixed, qfi_pinched_asymptotic,
                     qfi_pure_dynamical, qfi_thermal, unitary_state_family)
from .evolve import (LindbladModel, RateChain, build_rate_chain,
                     chain_fisher_information, evolve_unitary, lindblad_evolve,
                     phase_average_filter, rate_chain_evolve, time_averaged_state)
from .bounds import (BoundReport, cramer_rao, dephasing_bound, dephasing_s_constant,
                     dynamical_bound, low_temperature_bound, thermal_bound)
from .table import ResultTable, emit, parse_csv
from .scenarios import SCENARIOS, fit_inverse_sqrt_regression, run_scenario, time_to_plateau
from .config import ExperimentConfig, load_config
