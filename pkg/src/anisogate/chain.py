"""State-vector simulator for a linear chain of spins.

Spins are numbered 1..N along the chain; basis states are bit strings
with spin 1 as the most significant bit, up = 0 and down = 1 (so
|ud ud> on four spins is index 0b0101 = 5).  Logical qubits live on the
pairs (1,2), (3,4), ...; |0L> = |S> and |1L> = |T0> per pair.
Initialization is modeled as exact ground-state preparation of the
switched-on pair interaction, and readout as a projective measurement
along the singlet-like ground eigenvector of the measurement pulse's
Hamiltonian (a pseudospin axis nearly parallel to z).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from collections.abc import Sequence

import numpy as np

from .kernel import GateParams, TwoSpinGate, gate_unitary, hamiltonian
from .sequence import PulseSequence

NORM_TOL = 1e-12
MAX_SPINS = 20


@dataclass(frozen=True)
class ChainState:
    """Normalized amplitudes over the 2^N spin configurations."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitudes, dtype=complex)
        n = int(round(math.log2(amp.size)))
        if 2 ** n != amp.size:
            raise ValueError("amplitude vector length must be a power of two")
        if n % 2 != 0 or not 4 <= n <= MAX_SPINS:
            raise ValueError(f"chain size must be even and in [4, {MAX_SPINS}]")
        if abs(np.linalg.norm(amp) - 1.0) > NORM_TOL:
            raise ValueError("state must be normalized")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def n_spins(self) -> int:
        return int(round(math.log2(self.amplitudes.size)))


@dataclass(frozen=True)
class ReadoutResult:
    """Singlet projection probability and the measurement-axis tilt."""

    p_singlet: float
    axis_tilt: float

    def __post_init__(self) -> None:
        if not -NORM_TOL <= self.p_singlet <= 1.0 + NORM_TOL:
            raise ValueError("probability out of range")
        object.__setattr__(self, "p_singlet", float(min(max(self.p_singlet, 0.0), 1.0)))


def _check_pair(pair, n_spins: int) -> int:
    if isinstance(pair, (tuple, list)):
        i, j = pair
        if j != i + 1:
            raise ValueError("gates act on neighboring pairs (i, i+1)")
    else:
        i = pair
    i = int(i)
    if not 1 <= i < n_spins:
        raise ValueError(f"pair ({i}, {i + 1}) out of range for {n_spins} spins")
    return i


def apply_gate(state: ChainState, pair, gate: TwoSpinGate | np.ndarray) -> ChainState:
    """Apply a 4x4 pair gate to spins (i, i+1) of the chain."""
    n = state.n_spins
    i = _check_pair(pair, n)
    matrix = gate.matrix if isinstance(gate, TwoSpinGate) else np.asarray(gate, complex)
    psi = state.amplitudes.reshape((2,) * n)
    out = np.tensordot(matrix.reshape(2, 2, 2, 2), psi, axes=([2, 3], [i - 1, i]))
    out = np.moveaxis(out, [0, 1], [i - 1, i])
    return ChainState(amplitudes=out.reshape(-1))


def run_program(state: ChainState, program: PulseSequence) -> ChainState:
    """Apply the pulses of a program in listed order."""
    for pulse in program:
        state = apply_gate(state, pulse.pair, gate_unitary(pulse.params))
    return state


def pair_ground_state(params: GateParams) -> np.ndarray:
    """Singlet-like ground eigenvector of the pair Hamiltonian.

    Phase-fixed so the |ud> component is real and positive (falling back
    to the largest component for exotic parameters), which makes ground
    states deterministic across runs.
    """
    vals, vecs = np.linalg.eigh(hamiltonian(params))
    g = vecs[:, int(np.argmin(vals))]
    anchor = g[1] if abs(g[1]) > 1e-8 else g[int(np.argmax(np.abs(g)))]
    g = g * (anchor.conjugate() / abs(anchor))
    return g


def init_ground(n_spins: int, pair_params: GateParams | Sequence[GateParams]
                ) -> ChainState:
    """Cooled initial state: tensor product of pair ground states.

    ``pair_params`` is one GateParams per encoded pair (1,2), (3,4), ...,
    or a single GateParams broadcast to all pairs.  Isotropic parameters
    give |S> per pair, i.e. the all-|0L> logical state.
    """
    if n_spins % 2 != 0:
        raise ValueError("the encoded chain needs an even number of spins")
    n_pairs = n_spins // 2
    if isinstance(pair_params, GateParams):
        params_list = [pair_params] * n_pairs
    else:
        params_list = list(pair_params)
        if len(params_list) != n_pairs:
            raise ValueError(f"need {n_pairs} pair parameter sets, got {len(params_list)}")
    state = np.array([1.0 + 0.0j])
    for params in params_list:
        state = np.kron(state, pair_ground_state(params))
    return ChainState(amplitudes=state)


def logical_basis_state(n_spins: int, bits: Sequence[int] | str) -> ChainState:
    """Exact logical basis state, e.g. "01" for |0L 1L> on four spins."""
    from .kernel import SINGLET, TRIPLET0
    bits = [int(b) for b in bits]
    if len(bits) != n_spins // 2 or any(b not in (0, 1) for b in bits):
        raise ValueError("bits must give 0 or 1 per encoded pair")
    state = np.array([1.0 + 0.0j])
    for b in bits:
        state = np.kron(state, TRIPLET0 if b else SINGLET)
    return ChainState(amplitudes=state)


def readout(state: ChainState, pair, measure_params: GateParams) -> ReadoutResult:
    """Project the pair onto the measurement pulse's singlet-like ground state.

    The measurement axis tilt from z is atan2(beta, 1 + gamma); isotropic
    parameters measure exactly in the {|0L>, |1L>} basis.
    """
    n = state.n_spins
    i = _check_pair(pair, n)
    g = pair_ground_state(measure_params).reshape(2, 2)
    psi = state.amplitudes.reshape((2,) * n)
    overlap = np.tensordot(g.conj(), psi, axes=([0, 1], [i - 1, i]))
    p = float(np.linalg.norm(overlap) ** 2)
    tilt = math.atan2(measure_params.beta, 1.0 + measure_params.gamma)
    return ReadoutResult(p_singlet=p, axis_tilt=tilt)
