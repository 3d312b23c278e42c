"""Two-spin exchange pulse kernel.

Builds the Hamiltonian and unitary of a single exchange pulse between two
neighboring spins, maps physical device controls to gate parameters, and
converts between the 4x4 matrix form and the pseudospin axis/angle form.

Conventions (fixed for the whole package):

* hbar = 1 and spin operators are S = sigma/2.
* Two-spin basis order is (|uu>, |ud>, |du>, |dd>).
* The spin z axis is the spin-orbit precession axis of the device.
* Pseudospin basis of a pair is {|S>, |T0>} with
  |S> = (|ud> - |du>)/sqrt(2) and |T0> = (|ud> + |du>)/sqrt(2).
  The pseudospin Pauli convention used everywhere is
  sigma_z|T0> = +|T0>, sigma_z|S> = -|S>; in the (|ud>, |du>) product
  block the pseudospin triple is (tau_z, -tau_y, tau_x).  This is the
  unique sign choice under which direct exponentiation of the pulse
  Hamiltonian reproduces exp(i*lam/2) * exp(-i*phivec.sigma/2) with
  phivec = lam*(alpha, beta, gamma+1); it is validated against a
  general-purpose matrix-exponential oracle in the test suite.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateAxisError

UNITARITY_TOL = 1e-12
HERMITICITY_TOL = 1e-14
AXIS_TOL = 1e-12
FOUR_PI = 4.0 * math.pi

#: |S> and |T0> in the fixed product basis.
SINGLET = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)
TRIPLET0 = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2.0)


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PhysicalDevice:
    """Static description of one pair of neighboring dots.

    ``k_matrix_element`` is the momentum matrix element between the two
    dot orbitals, supplied as an input scalar (1/length); it is not
    computed here.
    """

    a0: float
    omega0: float
    f_dresselhaus: float
    f_rashba: float
    t: float
    k_matrix_element: float

    def __post_init__(self) -> None:
        for name in ("a0", "omega0", "f_dresselhaus", "f_rashba", "t", "k_matrix_element"):
            _require_finite(name, getattr(self, name))
        if self.a0 <= 0:
            raise ValueError("a0 must be positive")
        if self.omega0 <= 0:
            raise ValueError("omega0 must be positive")
        if self.t == 0:
            raise ValueError("tunneling amplitude t must be nonzero")


@dataclass(frozen=True)
class PulseControls:
    """Dimensionless pulse controls: spin-orbit strength and shape coefficients."""

    s: float
    c_alpha: float
    c_beta: float
    c_gamma: float
    lam: float

    def __post_init__(self) -> None:
        for name in ("s", "c_alpha", "c_beta", "c_gamma", "lam"):
            _require_finite(name, getattr(self, name))
        if abs(self.s) > 0.3:
            warnings.warn(
                f"|s| = {abs(self.s):.3g} is outside the weak spin-orbit regime (> 0.3)",
                stacklevel=2,
            )

    @property
    def time_symmetric(self) -> bool:
        return self.c_alpha == 0.0

    def to_record(self) -> dict:
        return {"s": self.s, "cAlpha": self.c_alpha, "cBeta": self.c_beta,
                "cGamma": self.c_gamma, "lambda": self.lam}

    @classmethod
    def from_record(cls, rec: dict) -> "PulseControls":
        return cls(s=rec["s"], c_alpha=rec["cAlpha"], c_beta=rec["cBeta"],
                   c_gamma=rec["cGamma"], lam=rec.get("lambda", 0.0))


@dataclass(frozen=True)
class GateParams:
    """Pulse descriptor: integrated isotropic strength and anisotropies."""

    lam: float
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        for name in ("lam", "alpha", "beta", "gamma"):
            _require_finite(name, getattr(self, name))
        if self.lam < 0:
            raise ValueError("lam must be >= 0")

    def to_record(self) -> dict:
        return {"lambda": self.lam, "alpha": self.alpha,
                "beta": self.beta, "gamma": self.gamma}

    @classmethod
    def from_record(cls, rec: dict) -> "GateParams":
        return cls(lam=rec["lambda"], alpha=rec.get("alpha", 0.0),
                   beta=rec.get("beta", 0.0), gamma=rec.get("gamma", 0.0))


@dataclass(frozen=True)
class TwoSpinGate:
    """A 4x4 pulse unitary with its integrated strength carried exactly.

    ``lam`` is kept alongside the matrix so accumulated phase bookkeeping
    never has to be recovered from mod-2pi data.
    """

    matrix: np.ndarray
    lam: float

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError("gate matrix must be 4x4")
        d = m.conj().T @ m - np.eye(4)
        if np.linalg.norm(d, 2) > UNITARITY_TOL:
            raise ValueError("gate matrix is not unitary to 1e-12")
        e0 = np.zeros(4, dtype=complex); e0[0] = 1.0
        e3 = np.zeros(4, dtype=complex); e3[3] = 1.0
        if (np.abs(m[:, 0] - e0).max() > UNITARITY_TOL
                or np.abs(m[:, 3] - e3).max() > UNITARITY_TOL):
            raise ValueError("gate must fix |T+> and |T-> pointwise")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "lam", float(self.lam))


@dataclass(frozen=True)
class PseudospinRotation:
    """Axis/angle/global-phase image of a pulse on the {S, T0} block.

    ``global_phase`` is lam/2, tracked exactly as a real and never reduced
    mod 2pi.  ``angle`` is reduced to [0, 4pi).
    """

    axis: np.ndarray
    angle: float
    global_phase: float

    def __post_init__(self) -> None:
        axis = np.asarray(self.axis, dtype=float)
        if axis.shape != (3,):
            raise ValueError("axis must be a 3-vector")
        if abs(np.linalg.norm(axis) - 1.0) > AXIS_TOL:
            raise ValueError("axis must be a unit vector")
        if not (0.0 <= self.angle < FOUR_PI):
            raise ValueError("angle must lie in [0, 4pi)")
        axis.setflags(write=False)
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "angle", float(self.angle))
        object.__setattr__(self, "global_phase", float(self.global_phase))


def spin_orbit_strength(device: PhysicalDevice) -> float:
    """Dimensionless spin-orbit strength (f_D - f_R)/(a0*omega0)."""
    return (device.f_dresselhaus - device.f_rashba) / (device.a0 * device.omega0)


def precession_angle(device: PhysicalDevice) -> float:
    """Spin precession angle eta during a tunneling event.

    tan(eta/2) = s * a0*omega0 * <k> / (sqrt(2) t).
    """
    s = spin_orbit_strength(device)
    arg = s * device.a0 * device.omega0 * device.k_matrix_element / (math.sqrt(2.0) * device.t)
    return 2.0 * math.atan(arg)


def params_from_controls(controls: PulseControls) -> GateParams:
    """Map pulse controls to gate parameters via the small-s scaling laws.

    alpha = C_alpha*s, beta = C_beta*s, gamma = C_gamma*s**2.
    """
    s = controls.s
    return GateParams(lam=controls.lam, alpha=controls.c_alpha * s,
                      beta=controls.c_beta * s, gamma=controls.c_gamma * s * s)


def hamiltonian(params: GateParams) -> np.ndarray:
    """4x4 pulse Hamiltonian in the fixed product basis.

    H = S1.S2 + (alpha/2)(S1z - S2z) + beta(S1x S2y - S1y S2x)
        + gamma(S1x S2x + S1y S2y) - 1/4.

    The -1/4 makes H annihilate |T+-> for every parameter set, so the
    full trace is exactly -1.
    """
    a, b, g = params.alpha, params.beta, params.gamma
    h = np.zeros((4, 4), dtype=complex)
    h[1, 1] = 0.5 * (a - 1.0)
    h[2, 2] = 0.5 * (-a - 1.0)
    h[1, 2] = 0.5 * ((1.0 + g) + 1j * b)
    h[2, 1] = 0.5 * ((1.0 + g) - 1j * b)
    return h


def _rotation_vector(params: GateParams) -> np.ndarray:
    return np.array([params.alpha, params.beta, params.gamma + 1.0])


def _pseudo_pauli_dot(n: np.ndarray) -> np.ndarray:
    """n . sigma in the (|ud>, |du>) product block for pseudospin axis n."""
    nx, ny, nz = n
    return np.array([[nx, nz + 1j * ny], [nz - 1j * ny, -nx]], dtype=complex)


def _block_gate(block: np.ndarray, lam: float) -> TwoSpinGate:
    m = np.eye(4, dtype=complex)
    m[1:3, 1:3] = block
    return TwoSpinGate(matrix=m, lam=lam)


def gate_unitary(params: GateParams) -> TwoSpinGate:
    """Pulse unitary exp(-i*lam*H) by closed-form block exponentiation.

    Only the (|ud>, |du>) block is nontrivial; |T+-> are fixed exactly.
    """
    a = _rotation_vector(params)
    r = float(np.linalg.norm(a))
    lam = params.lam
    phase = np.exp(0.5j * lam)
    if r == 0.0:
        block = phase * np.eye(2, dtype=complex)
    else:
        phi = lam * r
        block = phase * (math.cos(0.5 * phi) * np.eye(2)
                         - 1j * math.sin(0.5 * phi) * _pseudo_pauli_dot(a / r))
    return _block_gate(block, lam)


def pseudospin_form(params: GateParams) -> PseudospinRotation:
    """Axis, angle and global phase of the pulse as a pseudospin rotation.

    The rotation vector is lam*(alpha, beta, gamma+1); the angle is
    lam*sqrt(1 + 2*gamma + alpha^2 + beta^2 + gamma^2) reduced to
    [0, 4pi).  lam = 0 maps to the identity rotation about z.
    """
    lam = params.lam
    if lam == 0.0:
        return PseudospinRotation(axis=np.array([0.0, 0.0, 1.0]), angle=0.0,
                                  global_phase=0.0)
    a = _rotation_vector(params)
    r = float(np.linalg.norm(a))
    if r == 0.0:
        raise DegenerateAxisError(
            "rotation vector vanishes (gamma = -1 with alpha = beta = 0)")
    return PseudospinRotation(axis=a / r, angle=(lam * r) % FOUR_PI,
                              global_phase=0.5 * lam)


def gate_from_pseudospin(rot: PseudospinRotation) -> TwoSpinGate:
    """Rebuild the 4x4 pulse unitary from its pseudospin form."""
    phase = np.exp(1j * rot.global_phase)
    block = phase * (math.cos(0.5 * rot.angle) * np.eye(2)
                     - 1j * math.sin(0.5 * rot.angle) * _pseudo_pauli_dot(rot.axis))
    return _block_gate(block, 2.0 * rot.global_phase)


def ideal_x_sequence_gate(lambda_total: float, phi: float) -> TwoSpinGate:
    """Ideal net gate of a pulse sequence whose pseudospin rotation is about x.

    Diagonal in the product basis:
    diag(1, exp(i(L-phi)/2), exp(i(L+phi)/2), 1).
    """
    m = np.eye(4, dtype=complex)
    m[1, 1] = np.exp(0.5j * (lambda_total - phi))
    m[2, 2] = np.exp(0.5j * (lambda_total + phi))
    return TwoSpinGate(matrix=m, lam=lambda_total)
