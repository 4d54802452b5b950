"""Lab-frame DRAG-pulse simulation and calibration for ladder qubits.

Build a finite-difference junction model on a phase grid, truncate it to
its lowest levels, synthesize two-quadrature drive signals and propagate
the time-dependent Schrodinger equation in the lab frame; co-optimize
drive detuning and amplitude against the two-state gate error.
"""

__version__ = "0.1.0"

from .errors import (ConvergenceError, DragsimError, NumericalError,
                     PropagationError, ValidationError)
from .lattice import (EigenSystem, LatticeHamiltonian, TransmonParams,
                      analytic_transmon_estimate, build_lattice,
                      phase_operator, solve_eigensystem,
                      transition_frequencies)
from .optimizer import (FidelityCurve, FomResult, OptimizeConfig,
                        OptimizeResult, figure_of_merit, optimize_pulse,
                        sweep)
from .propagator import (FidelityReport, PropagationResult,
                         adiabatic_leakage_estimate, evolve,
                         evolve_lattice_state, evolve_qubit_block,
                         evolve_state, fidelity_report, full_fidelity,
                         leakage_population, transition_probability,
                         two_state_fidelity)
from .pulses import (CosineEnvelope, DriveConfig, GaussianEnvelope,
                     calibrate_base_amplitude, drive_signal)
from .spectra import (SpectrumResult, linewidth, power_spectrum,
                      spectral_hole_depth, spectrum_of_samples)
from .truncation import PseudoPauliSet, TruncatedModel, pseudo_pauli, truncate
