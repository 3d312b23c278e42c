"""Two-qubit (CNOT) pulse-sequence compiler.

A two-qubit gate between logical qubits (spins 1,2) and (spins 3,4) is a
sequence of pulses on the middle pair (2,3).  Leakage-free sequences have
a net pseudospin rotation about x; writing the net gate as U(Lambda, Phi)
with Lambda the exact accumulated strength and Phi the net x-rotation
angle, the gate is CNOT-equivalent up to single-qubit rotations iff
Lambda = (2n+1)*pi.  Two constructions are provided:

* procedure 1 -- an x rotation by pi built from pi pulses, sandwiched
  between two strength-tuned pulses about one wedge axis that absorb the
  accumulated-strength mismatch mu.
* procedure 2 -- a train of full 2pi pseudospin rotations whose per-pulse
  strength mismatches nu are steered so their sum is an odd multiple of pi.

``complete_cnot`` attaches the single-logical-qubit corrections (layout
frozen by an exact numerical search over a small discrete set): a
Hadamard on the control before and after the core, and an x rotation by
psi = (Phi + Lambda)/2 mod 2pi on both qubits after the core.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import SynthesisError
from .rotation import Rotation, x_rotation_phase
from .sequence import Pulse, PulseSequence, program_record
from .wedge import Wedge, nu_range, synthesize_1q, synthesize_x_rotation

TWO_PI = 2.0 * math.pi
PHASE_TOL = 1e-9
AXIS_TOL = 1e-10

CONTROL_PAIR = 1   # spins (1,2)
CORE_PAIR = 2      # spins (2,3)
TARGET_PAIR = 3    # spins (3,4)

#: Logical matrices of the correction gates (basis |0L>, |1L> per qubit).
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)

#: Pseudospin rotation realizing each correction: (axis, angle).  The
#: logical-to-pseudospin axis map is (x, y, z) -> (x, -y, -z).
_H_PSEUDO_AXIS = np.array([1.0, 0.0, -1.0]) / math.sqrt(2.0)
_X_PSEUDO_AXIS = np.array([1.0, 0.0, 0.0])


@dataclass(frozen=True)
class Correction:
    """One logical single-qubit correction gate of the CNOT construction."""

    kind: str                       # "H" or "Rx"
    qubit: int                      # 1 = control (pair 1-2), 2 = target (pair 3-4)
    place: str                      # "before" or "after" the core
    angle: float | None = None      # psi for Rx
    sequence: PulseSequence | None = None

    @property
    def pair(self) -> int:
        return CONTROL_PAIR if self.qubit == 1 else TARGET_PAIR


@dataclass(frozen=True)
class CnotPlan:
    """A compiled CNOT: the middle-pair core plus logical corrections."""

    core_sequence: PulseSequence
    procedure: int
    n: int
    phi_net_angle: float
    psi: float
    corrections: tuple[Correction, ...]
    mu: float | None = None
    mu_estimate: float | None = None
    nus: tuple[float, ...] | None = None

    @property
    def lambda_total(self) -> float:
        return self.core_sequence.lambda_total

    @property
    def completed(self) -> bool:
        return all(c.sequence is not None for c in self.corrections)

    @property
    def pulse_count(self) -> int:
        count = len(self.core_sequence)
        for c in self.corrections:
            if c.sequence is not None:
                count += len(c.sequence)
        return count

    def full_sequence(self) -> PulseSequence:
        """All pulses in execution order (corrections must be compiled)."""
        before = [c for c in self.corrections if c.place == "before"]
        after = [c for c in self.corrections if c.place == "after"]
        pulses: list[Pulse] = []
        for c in before:
            pulses.extend(self._correction_pulses(c))
        pulses.extend(self.core_sequence.pulses)
        for c in after:
            pulses.extend(self._correction_pulses(c))
        return PulseSequence(tuple(pulses))

    @staticmethod
    def _correction_pulses(c: Correction) -> tuple[Pulse, ...]:
        if c.sequence is None:
            raise SynthesisError("corrections are not compiled; run complete_cnot")
        return c.sequence.pulses


def phase_constraint_check(seq: PulseSequence) -> tuple[int, float]:
    """Nearest odd-multiple index n and residual |Lambda - (2n+1)pi|."""
    lam = seq.lambda_total
    n = round((lam / math.pi - 1.0) / 2.0)
    return n, abs(lam - (2 * n + 1) * math.pi)


def _net_x_rotation(seq: PulseSequence) -> float:
    """Phi mod 4pi of the core's net rotation; rejects off-x-axis nets."""
    net = seq.phi_net()
    phi, off_axis = x_rotation_phase(net)
    if off_axis > AXIS_TOL:
        raise SynthesisError(
            f"net pseudospin rotation is off the x axis by {off_axis:.3e}; "
            "the construction does not apply to this wedge")
    return phi


def _corrections_for(psi: float) -> tuple[Correction, ...]:
    layout = _fig3_layout()
    out = []
    for kind, qubit, place in layout:
        out.append(Correction(kind=kind, qubit=qubit, place=place,
                              angle=psi if kind == "Rx" else None))
    return tuple(out)


def _finish_plan(seq: PulseSequence, procedure: int, **extra) -> CnotPlan:
    n, residual = phase_constraint_check(seq)
    if residual >= PHASE_TOL:
        raise SynthesisError(
            f"accumulated strength misses the odd-pi constraint by {residual:.3e}")
    phi = _net_x_rotation(seq)
    psi = 0.5 * (phi + seq.lambda_total) % TWO_PI
    return CnotPlan(core_sequence=seq, procedure=procedure, n=n,
                    phi_net_angle=phi, psi=psi,
                    corrections=_corrections_for(psi), **extra)


def procedure_one(wedge: Wedge, a_axis: float | None = None) -> CnotPlan:
    """Core from an x rotation by pi sandwiched by two strength-tuned pulses.

    The 2n pi pulses of the x rotation accumulate strength 2n*pi + mu; the
    two sandwich pulses about ``a_axis`` carry strength pi/2 - mu/2 each,
    so the total lands on (2n+1)*pi exactly.  The sandwich leaves the net
    x rotation unchanged regardless of the sandwich rotation angle.
    """
    theta_a = wedge.zmost_axis if a_axis is None else float(a_axis)
    if not (wedge.theta_lo - 1e-12 <= theta_a <= wedge.theta_hi + 1e-12):
        raise SynthesisError("sandwich axis lies outside the wedge")
    core_x = synthesize_x_rotation(math.pi, wedge, pair=CORE_PAIR)
    two_n = len(core_x.sequence)
    mu = math.fsum(p.params.lam for p in core_x.sequence) - two_n * math.pi
    # First-order estimate of the per-pulse mismatch, reported for comparison.
    mu_estimate = -math.pi * math.fsum(
        p.params.gamma + 0.5 * p.params.beta**2 for p in core_x.sequence)
    lam_a = 0.5 * math.pi - 0.5 * mu
    if lam_a < 0.0:
        raise SynthesisError(
            f"mismatch mu = {mu:.3e} too large for this wedge: sandwich strength < 0")
    a_pulse = Pulse(pair=CORE_PAIR, params=wedge.params_with_lambda(theta_a, lam_a))
    seq = PulseSequence((a_pulse, *core_x.sequence.pulses, a_pulse))
    return _finish_plan(seq, procedure=1, mu=mu, mu_estimate=mu_estimate)


def _nu_schedule_offside(lo: float, hi: float) -> tuple[list[float], float]:
    """Pulse schedule when 0 < lo <= hi: smallest k whose window [k*lo, k*hi]
    contains an odd multiple of pi, plus that target."""
    if hi - lo <= 0.0:
        raise SynthesisError("nu range is a single nonzero point; "
                             "the odd-pi constraint is unreachable")
    bound = math.floor(hi / (hi - lo)) + 2 + math.floor(math.pi / hi)
    for k in range(max(1, math.ceil(math.pi / hi)), bound + 1):
        m_lo = math.ceil(k * lo / math.pi)
        m_hi = math.floor(k * hi / math.pi)
        for m in range(m_lo, m_hi + 1):
            if m % 2 == 1:
                return [hi] * k, m * math.pi
    raise SynthesisError("no odd multiple of pi is reachable within the pulse bound")


def procedure_two(wedge: Wedge) -> CnotPlan:
    """Core from full 2pi pseudospin rotations with steered strength mismatch.

    Each pulse is a 2pi rotation of strength 2pi + nu_i; the nu_i are
    chosen at the extreme of the achievable range except the last, which
    is solved exactly so that the sum of mismatches is an odd multiple of
    pi.  The net rotation angle is a multiple of 2pi, so the core is
    diagonal regardless of the axes used.
    """
    nu1, nu2 = nu_range(wedge)
    if nu1 == 0.0 and nu2 == 0.0:
        raise SynthesisError("no anisotropy: nu = 0 only, constraint unreachable")
    if nu1 <= 0.0 <= nu2:
        nu_max = max(abs(nu1), abs(nu2))
        side = 1.0 if nu2 >= -nu1 else -1.0
        extreme = nu2 if side > 0 else nu1
        target = side * math.pi
        plan_nus = [extreme] * math.floor(math.pi / nu_max)
    else:
        sign = 1.0 if nu1 > 0.0 else -1.0
        lo, hi = (nu1, nu2) if sign > 0 else (-nu2, -nu1)
        schedule, tgt = _nu_schedule_offside(lo, hi)
        plan_nus = [sign * v for v in schedule[:-1]]
        target = sign * tgt
    pulses: list[Pulse] = []
    for nu in plan_nus:
        pulses.append(Pulse(pair=CORE_PAIR, params=wedge.params_for_nu(nu)))
    achieved = math.fsum(p.params.lam - TWO_PI for p in pulses)
    last = target - achieved
    slack = 1e-9
    if last != 0.0:
        if not (nu1 - slack <= last <= nu2 + slack):
            raise SynthesisError(
                f"final mismatch {last:.3e} escapes the achievable range "
                f"[{nu1:.3e}, {nu2:.3e}]")
        pulses.append(Pulse(pair=CORE_PAIR, params=wedge.params_for_nu(last)))
    seq = PulseSequence(tuple(pulses))
    nus = tuple(p.params.lam - TWO_PI for p in pulses)
    return _finish_plan(seq, procedure=2, nus=nus)


def complete_cnot(plan: CnotPlan, wedge: Wedge) -> CnotPlan:
    """Compile the plan's logical corrections into pulses on their pairs."""
    compiled = []
    for c in plan.corrections:
        if c.kind == "H":
            target = Rotation.from_axis_angle(_H_PSEUDO_AXIS, math.pi)
        elif c.kind == "Rx":
            target = Rotation.from_axis_angle(_X_PSEUDO_AXIS, c.angle)
        else:
            raise SynthesisError(f"unknown correction kind {c.kind!r}")
        result = synthesize_1q(target, wedge, pair=c.pair)
        compiled.append(replace(c, sequence=result.sequence))
    return replace(plan, corrections=tuple(compiled))


def plan_record(plan: CnotPlan) -> dict:
    """Serialize a plan (completed or core-only) to the interchange format."""
    seq = plan.full_sequence() if plan.completed else plan.core_sequence
    meta = {"procedure": plan.procedure, "n": plan.n,
            "Lambda": plan.lambda_total, "Phi": plan.phi_net_angle,
            "psi": plan.psi, "pulseCount": plan.pulse_count}
    return program_record(seq, meta)


# -- frozen correction layout ----------------------------------------------

def _logical_core_matrix(lam: float, phi: float) -> np.ndarray:
    """Net core gate on the two logical qubits (exact closed form)."""
    x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    eye = np.eye(2, dtype=complex)

    def rot(m: np.ndarray, a: float) -> np.ndarray:
        return math.cos(a) * np.eye(m.shape[0], dtype=complex) + 1j * math.sin(a) * m

    return (np.exp(0.25j * lam)
            * rot(np.kron(x, x), 0.25 * lam)
            @ rot(np.kron(x, eye), 0.25 * phi)
            @ rot(np.kron(eye, x), 0.25 * phi))


def _rx_matrix(angle: float) -> np.ndarray:
    x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    return math.cos(0.5 * angle) * np.eye(2, dtype=complex) - 1j * math.sin(0.5 * angle) * x


_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                 dtype=complex)


def _layer(gate: np.ndarray, placement: str) -> np.ndarray:
    eye = np.eye(2, dtype=complex)
    on_control = gate if placement in ("control", "both") else eye
    on_target = gate if placement in ("target", "both") else eye
    return np.kron(on_control, on_target)


@lru_cache(maxsize=1)
def _fig3_layout() -> tuple[tuple[str, int, str], ...]:
    """Correction layout, frozen by exact search over a small discrete set.

    Searches H placement x Rx placement; a layout passes if the assembled
    logical circuit equals CNOT (control = pair 1-2) up to global phase
    for every sampled (Lambda, Phi) with Lambda an odd multiple of pi.
    """
    samples = [(math.pi, math.pi), (3 * math.pi, 0.6),
               (math.pi, TWO_PI), (5 * math.pi, 4.3)]
    placements = ("control", "target", "both")
    for h_place in placements:
        for rx_place in placements:
            ok = True
            for lam, phi in samples:
                psi = 0.5 * (phi + lam) % TWO_PI
                asm = (_layer(HADAMARD, h_place)
                       @ _layer(_rx_matrix(psi), rx_place)
                       @ _logical_core_matrix(lam, phi)
                       @ _layer(HADAMARD, h_place))
                fid = abs(np.trace(asm.conj().T @ _CNOT)) ** 2 / 16.0
                if fid < 1.0 - 1e-12:
                    ok = False
                    break
            if ok:
                qubits = {"control": (1,), "target": (2,), "both": (1, 2)}
                layout = [("H", q, "before") for q in qubits[h_place]]
                layout += [("Rx", q, "after") for q in qubits[rx_place]]
                layout += [("H", q, "after") for q in qubits[h_place]]
                return tuple(layout)
    raise SynthesisError("no correction layout in the search set completes a CNOT")
