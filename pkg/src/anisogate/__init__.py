"""Compiler, simulator and verifier for pulsed anisotropic-exchange spin gates."""

from .chain import (ChainState, ReadoutResult, apply_gate, init_ground,
                    logical_basis_state, pair_ground_state, readout, run_program)
from .cnot import (CnotPlan, Correction, complete_cnot, phase_constraint_check,
                   plan_record, procedure_one, procedure_two)
from .errors import (AnisogateError, AxisPlaneError, DegenerateAxisError,
                     DegenerateDeviceError, ProgramFormatError, SingularTiltError,
                     SynthesisError, VerificationError, WedgeError)
from .kernel import (GateParams, PhysicalDevice, PseudospinRotation, PulseControls,
                     SINGLET, TRIPLET0, TwoSpinGate, gate_from_pseudospin,
                     gate_unitary, hamiltonian, params_from_controls,
                     precession_angle, pseudospin_form, spin_orbit_strength)
from .rotation import (AxisError, Rotation, compose, compose_all, euler_decompose,
                       pi_pair, pi_pair_with_errors)
from .sequence import (Pulse, PulseSequence, pair_label, parse_pair_label,
                       parse_program_record, program_record, pulse_rotation)
from .verify import (EquivalenceReport, LogicalGate, decomposition_check, fidelity,
                     is_cnot_equivalent, logical_action, makhlin_invariants,
                     operator_norm, verify_cnot_plan)
from .wedge import (SynthesisResult, Wedge, direct_wedge, nu_range,
                    synthesize_1q, synthesize_x_rotation, wedge_from_controls,
                    x_rotation_pulse_count)

__version__ = "0.1.0"
