"""Achievable-axis wedge model and single-qubit pulse synthesis.

With time-symmetric pulsing (alpha = 0) the pseudospin rotation axis of a
pulse lies in the yz plane at polar angle theta = atan2(beta, 1+gamma).
Sweeping the controls sweeps a wedge of available axes; its angular size
theta_m measures the degree of spin-orbit control.  Arbitrary rotations
are synthesized from pi rotations about wedge axes (pairs of which give x
rotations) plus direct rotations about one wedge axis.

Two control models are supported:

* ``coupled``   -- beta = C_beta*s and gamma = C_gamma*s^2 with s swept
  over a range and the shape coefficients over (usually tight) ranges.
* ``independent`` -- beta and gamma range over independent intervals
  (``direct_wedge`` builds this from explicit theta/gamma bounds).

Emission policy: a pulse for a requested axis (or requested 2pi-rotation
strength mismatch nu) is solved in closed form on a deterministic
sequence of candidate control settings (coefficient-range corners first,
then a fixed s grid with the remaining coefficient solved exactly), so
identical requests always produce identical pulses.

Useful identities (alpha = 0): with rho = sqrt(1 + 2*gamma + beta^2 +
gamma^2) = hypot(1+gamma, beta), a pulse of strength lam rotates by
phi = lam*rho, so lam = phi/rho realizes a requested angle exactly, and a
2pi rotation has lam = 2pi + nu with nu = 2pi*(1/rho - 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SynthesisError, WedgeError
from .kernel import GateParams
from .rotation import Rotation, euler_decompose
from .sequence import Pulse, PulseSequence

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi
AXIS_SLACK = 1e-12
RESIDUAL_TOL = 1e-9
_FALLBACK_GRID = 4001


def _as_range(value, name: str) -> tuple[float, float]:
    if value is None:
        raise WedgeError(f"{name} range is required")
    if np.isscalar(value):
        value = (float(value), float(value))
    lo, hi = (float(v) for v in value)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise WedgeError(f"{name} range must be finite")
    return (lo, hi) if lo <= hi else (hi, lo)


def _axis_vector(theta: float) -> np.ndarray:
    return np.array([0.0, math.sin(theta), math.cos(theta)])


def _rho(beta: float, gamma: float) -> float:
    return math.hypot(1.0 + gamma, beta)


def _theta_of(beta: float, gamma: float) -> float:
    return math.atan2(beta, 1.0 + gamma)


def _nu_of(beta: float, gamma: float) -> float:
    return TWO_PI * (1.0 / _rho(beta, gamma) - 1.0)


@dataclass(frozen=True)
class Wedge:
    """The set of achievable pseudospin rotation axes and strengths.

    ``theta_lo``/``theta_hi`` bound the axis polar angles (from +z in the
    yz plane); ``gamma_of`` maps an axis angle to its achievable gamma
    range, which fixes the strength mismatch nu available for 2pi pulses.
    """

    theta_lo: float
    theta_hi: float
    mode: str
    s_range: tuple[float, float] | None = None
    c_beta_range: tuple[float, float] | None = None
    c_gamma_range: tuple[float, float] | None = None
    gamma_range: tuple[float, float] | None = None
    beta_range: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("coupled", "independent"):
            raise WedgeError(f"unknown wedge mode {self.mode!r}")
        if self.theta_m <= 0.0:
            raise WedgeError("degenerate wedge: theta_m must be positive")
        if self.theta_m > 0.5 * math.pi + 1e-12:
            raise WedgeError("wedge wider than pi/2 is outside the model")

    @property
    def theta_m(self) -> float:
        return self.theta_hi - self.theta_lo

    @property
    def includes_z(self) -> bool:
        return self.theta_lo <= 0.0 <= self.theta_hi

    @property
    def zmost_axis(self) -> float:
        """Wedge axis polar angle closest to +z."""
        if self.includes_z:
            return 0.0
        return self.theta_lo if abs(self.theta_lo) <= abs(self.theta_hi) else self.theta_hi

    def _contains(self, theta: float) -> bool:
        return self.theta_lo - AXIS_SLACK <= theta <= self.theta_hi + AXIS_SLACK

    # -- control-point searches -------------------------------------------

    def _coupled_corners(self) -> list[tuple[float, float]]:
        cb_lo, cb_hi = self.c_beta_range
        cg_lo, cg_hi = self.c_gamma_range
        corners = [(cb_hi, cg_lo), (cb_hi, cg_hi), (cb_lo, cg_lo), (cb_lo, cg_hi)]
        seen, out = set(), []
        for c in corners:
            if c not in seen:
                seen.add(c)
                out.append(c)
        return out

    def _s_in_range(self, s: float) -> bool:
        lo, hi = self.s_range
        slack = 1e-9 * max(1.0, abs(lo), abs(hi))
        return lo - slack <= s <= hi + slack

    def _s_grid(self) -> np.ndarray:
        lo, hi = self.s_range
        grid = np.linspace(lo, hi, _FALLBACK_GRID)
        return grid[np.lexsort((grid, np.abs(grid)))]

    def _coupled_axis_candidates(self, theta: float):
        """Yield (beta, gamma) control points whose axis angle is exactly theta."""
        tau = math.tan(theta)
        for cb, cg in self._coupled_corners():
            if tau == 0.0:
                if self._s_in_range(0.0):
                    yield 0.0, 0.0
                continue
            if cb == 0.0:
                continue
            roots = []
            if cg == 0.0:
                roots = [tau / cb]
            else:
                disc = cb * cb - 4.0 * cg * tau * tau
                if disc >= 0.0:
                    rt = math.sqrt(disc)
                    roots = [(cb - rt) / (2.0 * cg * tau), (cb + rt) / (2.0 * cg * tau)]
            for s in sorted(roots, key=abs):
                if self._s_in_range(s) and 1.0 + cg * s * s > 0.0:
                    yield cb * s, cg * s * s
        if tau != 0.0:
            # Continuation family: fixed coefficient, gamma solved per grid s.
            cb_lo, cb_hi = self.c_beta_range
            cg_lo, cg_hi = self.c_gamma_range
            for cb in (cb_hi, cb_lo):
                if cb == 0.0:
                    continue
                for s in self._s_grid():
                    if s == 0.0:
                        continue
                    denom = cb * s / tau    # = 1 + cg*s^2, must be positive
                    if denom <= 0.0:
                        continue
                    cg = (denom - 1.0) / (s * s)
                    if cg_lo - 1e-12 <= cg <= cg_hi + 1e-12:
                        cg = min(max(cg, cg_lo), cg_hi)
                        yield cb * s, cg * s * s

    def _independent_axis_candidates(self, theta: float):
        tau = math.tan(theta)
        g_lo, g_hi = self.gamma_range
        lo, hi = g_lo, g_hi
        if self.beta_range is not None and tau != 0.0:
            b_lo, b_hi = self.beta_range
            # beta = (1+gamma)*tan(theta) must fall in the beta box.
            bounds = sorted((b_lo / tau - 1.0, b_hi / tau - 1.0))
            lo, hi = max(lo, bounds[0]), min(hi, bounds[1])
        if lo > hi + 1e-15:
            return
        for gamma in (lo, hi):
            if 1.0 + gamma > 0.0:
                yield (1.0 + gamma) * tau, gamma

    def _axis_point(self, theta: float) -> tuple[float, float]:
        if not self._contains(theta):
            raise SynthesisError(f"axis angle {theta} lies outside the wedge")
        gen = (self._coupled_axis_candidates(theta) if self.mode == "coupled"
               else self._independent_axis_candidates(theta))
        for beta, gamma in gen:
            return beta, gamma
        raise SynthesisError(f"no achievable controls for axis angle {theta}")

    # -- public surface ----------------------------------------------------

    def gamma_of(self, theta: float) -> tuple[float, float]:
        """Achievable gamma range for a given axis angle."""
        gen = (self._coupled_axis_candidates(theta) if self.mode == "coupled"
               else self._independent_axis_candidates(theta))
        gammas = [g for _, g in gen]
        if not gammas:
            raise WedgeError(f"no achievable gamma for axis angle {theta}")
        return min(gammas), max(gammas)

    def params_with_lambda(self, theta: float, lam: float) -> GateParams:
        """Pulse with the given exact strength about the axis at theta."""
        beta, gamma = self._axis_point(theta)
        return GateParams(lam=lam, alpha=0.0, beta=beta, gamma=gamma)

    def params_for_axis(self, theta: float, phi: float) -> GateParams:
        """Pulse rotating by exactly phi (taken mod 4pi) about the axis at theta."""
        beta, gamma = self._axis_point(theta)
        lam = (phi % FOUR_PI) / _rho(beta, gamma)
        return GateParams(lam=lam, alpha=0.0, beta=beta, gamma=gamma)

    def nu_bounds(self) -> tuple[float, float]:
        """Range of the strength mismatch nu = lam - 2pi over achievable 2pi pulses."""
        nus = []
        if self.mode == "coupled":
            s_lo, s_hi = self.s_range
            for cb, cg in self._coupled_corners():
                us = [s_lo * s_lo, s_hi * s_hi]
                if s_lo <= 0.0 <= s_hi:
                    us.append(0.0)
                if cg != 0.0:
                    u_crit = -(2.0 * cg + cb * cb) / (2.0 * cg * cg)
                    if min(us) <= u_crit <= max(us):
                        us.append(u_crit)
                for u in us:
                    if u < 0.0 or 1.0 + cg * u <= 0.0:
                        continue
                    s = math.sqrt(u)
                    if self._s_in_range(s) or self._s_in_range(-s):
                        nus.append(_nu_of(cb * s, cg * u))
        else:
            g_lo, g_hi = self.gamma_range
            thetas = [self.theta_lo, self.theta_hi]
            if self.includes_z:
                thetas.append(0.0)
            for theta in thetas:
                for beta, gamma in self._independent_axis_candidates(theta):
                    nus.append(_nu_of(beta, gamma))
            if not nus:
                raise WedgeError("no achievable gamma anywhere in the wedge")
        if not nus:
            raise WedgeError("empty achievable set for nu")
        return min(nus), max(nus)

    def params_for_nu(self, nu: float) -> GateParams:
        """A full 2pi pseudospin rotation whose strength is 2pi + nu."""
        rho_target = TWO_PI / (nu + TWO_PI)
        if self.mode == "coupled":
            point = self._coupled_nu_point(rho_target)
        else:
            point = self._independent_nu_point(rho_target)
        if point is None:
            raise SynthesisError(f"nu = {nu} is not achievable in this wedge")
        beta, gamma = point
        theta = _theta_of(beta, gamma)
        if not self._contains(theta):
            raise SynthesisError(f"solved axis {theta} escaped the wedge")
        return GateParams(lam=TWO_PI / _rho(beta, gamma), alpha=0.0,
                          beta=beta, gamma=gamma)

    def _coupled_nu_point(self, rho: float):
        target = rho * rho
        for cb, cg in self._coupled_corners():
            roots = []
            if cg == 0.0:
                if cb != 0.0 and target >= 1.0:
                    roots = [(target - 1.0) / (cb * cb)]
            else:
                bq = 2.0 * cg + cb * cb
                disc = bq * bq - 4.0 * cg * cg * (1.0 - target)
                if disc >= 0.0:
                    rt = math.sqrt(disc)
                    roots = [(-bq + rt) / (2.0 * cg * cg), (-bq - rt) / (2.0 * cg * cg)]
            for u in sorted((u for u in roots if u >= 0.0)):
                for s in (math.sqrt(u), -math.sqrt(u)):
                    if self._s_in_range(s) and 1.0 + cg * u > 0.0:
                        return cb * s, cg * u
        cb_lo, cb_hi = self.c_beta_range
        cg_lo, cg_hi = self.c_gamma_range
        for cb in (cb_hi, cb_lo):
            for s in self._s_grid():
                if s == 0.0:
                    continue
                u = s * s
                rem = target - cb * cb * u    # (1 + cg*u)^2
                if rem <= 0.0:
                    continue
                cg = (math.sqrt(rem) - 1.0) / u
                if cg_lo - 1e-12 <= cg <= cg_hi + 1e-12:
                    cg = min(max(cg, cg_lo), cg_hi)
                    return cb * s, cg * u
        return None

    def _independent_nu_point(self, rho: float):
        g_lo, g_hi = self.gamma_range
        for gamma in (g_lo, g_hi):
            c = (1.0 + gamma) / rho    # required cos(theta)
            if not (0.0 < c <= 1.0):
                continue
            for theta in (math.acos(c), -math.acos(c)):
                if self._contains(theta) and self._beta_ok((1.0 + gamma) * math.tan(theta)):
                    return (1.0 + gamma) * math.tan(theta), gamma
        for theta in np.linspace(self.theta_lo, self.theta_hi, _FALLBACK_GRID):
            gamma = rho * math.cos(theta) - 1.0
            if g_lo - 1e-15 <= gamma <= g_hi + 1e-15:
                gamma = min(max(gamma, g_lo), g_hi)
                beta = (1.0 + gamma) * math.tan(theta)
                if self._beta_ok(beta):
                    return beta, gamma
        return None

    def _beta_ok(self, beta: float) -> bool:
        if self.beta_range is None:
            return True
        b_lo, b_hi = self.beta_range
        return b_lo - 1e-12 <= beta <= b_hi + 1e-12


def wedge_from_controls(s_range, c_beta_range=(1.0, 1.0), c_gamma_range=(1.0, 1.0),
                        mode: str = "coupled") -> Wedge:
    """Build the wedge swept by the given control ranges.

    The axis polar angle achievable at (s, C_beta, C_gamma) is
    atan2(C_beta*s, 1 + C_gamma*s^2); the wedge extent is its exact
    extremum over the control box (endpoint and stationary-point
    candidates).  A degenerate wedge (theta_m = 0) is an error.
    """
    s_range = _as_range(s_range, "s")
    cb_range = _as_range(c_beta_range, "c_beta")
    cg_range = _as_range(c_gamma_range, "c_gamma")
    s_lo, s_hi = s_range
    thetas = []
    for cb in cb_range:
        for cg in cg_range:
            cand = [s_lo, s_hi]
            if cg > 0.0:
                s_crit = 1.0 / math.sqrt(cg)
                for s in (s_crit, -s_crit):
                    if s_lo <= s <= s_hi:
                        cand.append(s)
            for s in cand:
                if 1.0 + cg * s * s <= 0.0:
                    raise WedgeError(
                        "control range reaches 1 + C_gamma*s^2 <= 0, outside the model")
                thetas.append(math.atan2(cb * s, 1.0 + cg * s * s))
    theta_lo, theta_hi = min(thetas), max(thetas)
    if theta_hi - theta_lo <= 0.0:
        raise WedgeError("controls give a single axis: theta_m = 0")
    if mode == "independent":
        betas = [cb * s for cb in cb_range for s in s_range]
        gammas = [cg * s * s for cg in cg_range
                  for s in (s_lo, s_hi, 0.0 if s_lo <= 0.0 <= s_hi else s_lo)]
        return Wedge(theta_lo=theta_lo, theta_hi=theta_hi, mode="independent",
                     s_range=s_range, c_beta_range=cb_range, c_gamma_range=cg_range,
                     gamma_range=(min(gammas), max(gammas)),
                     beta_range=(min(betas), max(betas)))
    return Wedge(theta_lo=theta_lo, theta_hi=theta_hi, mode="coupled",
                 s_range=s_range, c_beta_range=cb_range, c_gamma_range=cg_range)


def direct_wedge(theta_lo: float, theta_hi: float, gamma_range=(0.0, 0.0)) -> Wedge:
    """Wedge specified directly by axis bounds and a gamma range."""
    return Wedge(theta_lo=float(theta_lo), theta_hi=float(theta_hi),
                 mode="independent", gamma_range=_as_range(gamma_range, "gamma"))


@dataclass(frozen=True)
class SynthesisResult:
    """A compiled pulse sequence with its audit data."""

    sequence: PulseSequence
    pulse_count: int
    net_rotation: Rotation
    target_residual: float

    def __post_init__(self) -> None:
        if self.pulse_count != len(self.sequence):
            raise SynthesisError("pulse count does not match sequence length")
        if self.target_residual >= RESIDUAL_TOL:
            raise SynthesisError(
                f"synthesis residual {self.target_residual:.3e} exceeds 1e-9")


def x_rotation_pulse_count(theta: float, theta_m: float) -> int:
    """Pulse count law for an x rotation by theta (normalized to [0, 2pi))."""
    theta = theta % TWO_PI
    return 2 * math.floor(theta / (2.0 * theta_m)) + 2


def _pi_pulse(wedge: Wedge, theta: float, pair: int) -> Pulse:
    return Pulse(pair=pair, params=wedge.params_for_axis(theta, math.pi))


def synthesize_x_rotation(theta: float, wedge: Wedge, pair: int = 1) -> SynthesisResult:
    """Rotation by theta about the pseudospin x axis from pi pulses.

    Uses floor(Theta/(2*theta_m)) full steps between the two extreme wedge
    axes plus one fractional step against an interior axis (ties toward
    theta_lo), for exactly 2*floor(Theta/(2*theta_m)) + 2 pulses.  Theta
    is normalized to [0, 2pi) with the mathematical floor, so an exact
    multiple of 2*theta_m costs two extra pulses.  The net rotation
    matches R_x(Theta) up to spinor sign.
    """
    theta = float(theta) % TWO_PI
    tm = wedge.theta_m
    full = math.floor(theta / (2.0 * tm))
    remainder = 0.5 * (theta - 2.0 * tm * full)
    pulses = []
    for _ in range(full):
        # First pulse about the higher axis: pi@t1 then pi@t2 gives 2*(t1-t2) about +x.
        pulses.append(_pi_pulse(wedge, wedge.theta_hi, pair))
        pulses.append(_pi_pulse(wedge, wedge.theta_lo, pair))
    pulses.append(_pi_pulse(wedge, wedge.theta_lo + remainder, pair))
    pulses.append(_pi_pulse(wedge, wedge.theta_lo, pair))
    seq = PulseSequence(tuple(pulses))
    net = seq.phi_net()
    target = Rotation.from_axis_angle([1.0, 0.0, 0.0], theta)
    return SynthesisResult(sequence=seq, pulse_count=len(seq), net_rotation=net,
                           target_residual=net.distance(target))


def synthesize_1q(target: Rotation, wedge: Wedge, pair: int = 1,
                  w_axis: float | None = None) -> SynthesisResult:
    """Arbitrary pseudospin rotation from wedge-constrained pulses.

    Euler-decomposes the target about (w, x, w) where w is a wedge axis
    (nearest to +z unless given).  The two w rotations are single pulses;
    the middle x rotation is synthesized from pi pulses, so the total
    count grows as 1/theta_m.
    """
    theta_w = wedge.zmost_axis if w_axis is None else float(w_axis)
    if not (wedge.theta_lo - AXIS_SLACK <= theta_w <= wedge.theta_hi + AXIS_SLACK):
        raise SynthesisError("w axis lies outside the wedge")
    a, b, c = euler_decompose(target, _axis_vector(theta_w))
    pulses = []
    c_mod = c % FOUR_PI
    if c_mod != 0.0:
        pulses.append(Pulse(pair=pair, params=wedge.params_for_axis(theta_w, c_mod)))
    if b % FOUR_PI != 0.0:
        pulses.extend(synthesize_x_rotation(b, wedge, pair=pair).sequence.pulses)
    a_mod = a % FOUR_PI
    if a_mod != 0.0:
        pulses.append(Pulse(pair=pair, params=wedge.params_for_axis(theta_w, a_mod)))
    seq = PulseSequence(tuple(pulses))
    net = seq.phi_net() if len(seq) else Rotation.identity()
    return SynthesisResult(sequence=seq, pulse_count=len(seq), net_rotation=net,
                           target_residual=net.distance(target))


def nu_range(wedge: Wedge) -> tuple[float, float]:
    """Achievable range of nu = lam - 2pi for full 2pi pseudospin rotations."""
    return wedge.nu_bounds()
