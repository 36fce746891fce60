"""Photon-coincidence statistics of thermal cavities at arbitrary coupling.

Dressed-basis treatment of a thermalized cavity QED system: exact
diagonalization of the Rabi Hamiltonian and its variants, the canonical
thermal state, a dressed-basis thermal master equation, and generalized
output-field correlation functions (zero-delay and delayed intensity
correlations, frequency-filtered cross-correlations, emission spectra).
"""

from .correlations import (CorrelationTrace, Spectrum, emission_spectrum,
                           first_order_correlation, g2_cross_filtered, g2_tau,
                           normalize_spectra, oscillation_frequency,
                           spectrum_from_correlation, two_time)
from .dressed import (CrossingInterval, DressedBasis, LevelSweep,
                      TransitionTable, default_level_cut, diagonalize,
                      emission_channel_names, level_sweep, standard_channels,
                      transition_table, xdot_plus, xdot_plus_filtered)
from .dynamics import (BathSpec, Liouvillian, TransitionRates,
                       build_liouvillian, dressed_hamiltonian, evolve, rates,
                       standard_me_baseline, steady_state, unvec, vec)
from .errors import (ConfigError, DegenerateSteadyStateError, DimensionError,
                     HermiticityError, ModelError, StiffnessError,
                     ThermalRabiError, UndefinedStatisticsError, WindowError,
                     ZeroTransitionError)
from .models import (DIM_CAP, MultiTlsParams, RabiParams, TwoModeParams,
                     build_multi_tls, build_rabi, build_rwa, build_two_mode,
                     cavity_field, cavity_lowering, excitation_number,
                     parity_operator)
from .operators import (HERMITICITY_TOL, HilbertSpace, QOperator, embed,
                        fock_annihilation, identity, tls_lowering)
from .pipeline import System, assemble, diagonalize_model
from .sweep import (MARKERS, SweepConfig, SweepResult, classify_region,
                    parse_config, run_g2zero_sweep, run_point_sweep,
                    run_trace_task)
from .thermal import (ThermalState, bare_mode_g2, bose_occupation, g2_zero,
                      g2_zero_rwa_baseline, photon_flux, thermal_state)

__version__ = "0.1.0"
