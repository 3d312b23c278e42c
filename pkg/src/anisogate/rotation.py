"""Exact SU(2) composition with explicit phase bookkeeping.

Rotations are unit quaternions q = (w, x, y, z) mapped to SU(2) by
U = w*I - i*(x*sx + y*sy + z*sz), so a rotation by angle t about unit
axis n is (cos(t/2), sin(t/2)*n).  Quaternion sign is physical here: it
carries the mod-4pi part of composed rotation angles, so composition
never canonicalizes.  ``accumulated_lambda`` rides along as an exactly
additive real so integrated pulse strength is never recovered from
mod-2pi data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AxisPlaneError, SingularTiltError

PLANE_TOL = 1e-12
X_HAT = np.array([1.0, 0.0, 0.0])


def _quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    w1, v1 = a[0], a[1:]
    w2, v2 = b[0], b[1:]
    out = np.empty(4)
    out[0] = w1 * w2 - v1 @ v2
    out[1:] = w1 * v2 + w2 * v1 + np.cross(v1, v2)
    return out


@dataclass(frozen=True)
class Rotation:
    """An SU(2) element together with its accumulated pulse strength."""

    quaternion: np.ndarray
    accumulated_lambda: float = 0.0

    def __post_init__(self) -> None:
        q = np.asarray(self.quaternion, dtype=float)
        if q.shape != (4,):
            raise ValueError("quaternion must be a 4-vector")
        if abs(np.linalg.norm(q) - 1.0) > 1e-12:
            raise ValueError("quaternion must be normalized")
        q.setflags(write=False)
        object.__setattr__(self, "quaternion", q)
        object.__setattr__(self, "accumulated_lambda", float(self.accumulated_lambda))

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(np.array([1.0, 0.0, 0.0, 0.0]))

    @classmethod
    def from_axis_angle(cls, axis, angle: float,
                        accumulated_lambda: float = 0.0) -> "Rotation":
        axis = np.asarray(axis, dtype=float)
        n = np.linalg.norm(axis)
        if n == 0:
            raise ValueError("axis must be nonzero")
        q = np.empty(4)
        q[0] = math.cos(0.5 * angle)
        q[1:] = math.sin(0.5 * angle) * axis / n
        return cls(q, accumulated_lambda)

    def inverse(self) -> "Rotation":
        q = self.quaternion.copy()
        q[1:] = -q[1:]
        return Rotation(q, -self.accumulated_lambda)

    def canonical(self) -> "Rotation":
        """Representative with w >= 0 (first nonzero component positive on ties).

        For comparisons only; composition never canonicalizes.
        """
        q = self.quaternion
        for c in q:
            if c != 0.0:
                return self if c > 0 else Rotation(-q, self.accumulated_lambda)
        return self

    def axis_angle(self) -> tuple[np.ndarray, float]:
        """Principal axis and angle in [0, 2pi]; identity reports the z axis."""
        q = self.quaternion
        vn = float(np.linalg.norm(q[1:]))
        if vn == 0.0:
            return np.array([0.0, 0.0, 1.0]), 0.0 if q[0] > 0 else 2.0 * math.pi
        return q[1:] / vn, 2.0 * math.atan2(vn, q[0])

    def matrix(self) -> np.ndarray:
        """The SU(2) matrix w*I - i*v.sigma."""
        w, x, y, z = self.quaternion
        return np.array([[w - 1j * z, -y - 1j * x],
                         [y - 1j * x, w + 1j * z]])

    def distance(self, other: "Rotation") -> float:
        """Quaternion distance up to global sign."""
        d1 = float(np.linalg.norm(self.quaternion - other.quaternion))
        d2 = float(np.linalg.norm(self.quaternion + other.quaternion))
        return min(d1, d2)


@dataclass(frozen=True)
class AxisError:
    """First-order axis tilt of a pair of imperfect pi rotations."""

    tilt_y_prime: float
    tilt_z_prime: float
    angle_predicted: float


def compose(first: Rotation, second: Rotation) -> Rotation:
    """Rotation doing ``first`` then ``second`` (matrix order second*first)."""
    return Rotation(_quat_mul(second.quaternion, first.quaternion),
                    first.accumulated_lambda + second.accumulated_lambda)


def compose_all(rotations) -> Rotation:
    out = Rotation.identity()
    for r in rotations:
        out = compose(out, r)
    return out


def _check_yz_unit(name: str, n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    if n.shape != (3,):
        raise AxisPlaneError(f"{name} must be a 3-vector")
    if abs(np.linalg.norm(n) - 1.0) > PLANE_TOL:
        raise AxisPlaneError(f"{name} must be a unit vector")
    if abs(n[0]) > PLANE_TOL:
        raise AxisPlaneError(f"{name} must lie in the yz plane")
    return n


def _polar(n: np.ndarray) -> float:
    """Polar angle from +z within the yz plane, in (-pi, pi]."""
    return math.atan2(n[1], n[2])


def pi_pair(n1, n2) -> Rotation:
    """Composite of a pi rotation about n1 followed by a pi rotation about n2.

    For axes in the yz plane at polar angles t1, t2 the composite is,
    up to spinor sign, an x rotation by 2*(t1 - t2): the axis listed
    first at the *larger* polar angle rotates by +2*theta about +x.
    Swapping the order reverses the sense.
    """
    n1 = _check_yz_unit("n1", n1)
    n2 = _check_yz_unit("n2", n2)
    return compose(Rotation.from_axis_angle(n1, math.pi),
                   Rotation.from_axis_angle(n2, math.pi))


def pi_pair_with_errors(n1, n2, delta1: float, delta2: float
                        ) -> tuple[Rotation, AxisError]:
    """Pair of pi rotations with angle errors, plus its first-order axis tilt.

    The exact composite is (pi+delta1 about n1) then (pi+delta2 about n2).
    With z' || (n1+n2), y' = z' x xhat and theta the angle between the
    axes, the exact first-order tilts of the net axis away from the x
    axis are

        tilt_y' = (delta2 - delta1) / (4*cos(theta/2))
        tilt_z' = sign(t1 - t2) * (delta1 + delta2) / (4*sin(theta/2))

    where t1, t2 are the polar angles of n1, n2.  For small theta the z'
    tilt behaves as (delta1 + delta2)/(2*theta), which is why tighter
    wedges are more error sensitive.  The predicted angle is 2*theta;
    its O(delta^2/theta) correction is not included.
    """
    n1 = _check_yz_unit("n1", n1)
    n2 = _check_yz_unit("n2", n2)
    exact = compose(Rotation.from_axis_angle(n1, math.pi + delta1),
                    Rotation.from_axis_angle(n2, math.pi + delta2))
    t1, t2 = _polar(n1), _polar(n2)
    dot = min(1.0, max(-1.0, float(n1 @ n2)))
    theta = math.acos(dot)
    if theta == 0.0:
        if delta1 + delta2 != 0.0:
            raise SingularTiltError(
                "parallel axes with a net angle error: z' tilt diverges")
        tilt_z = 0.0
    else:
        tilt_z = math.copysign(1.0, t1 - t2) * (delta1 + delta2) / (4.0 * math.sin(0.5 * theta))
    tilt_y = (delta2 - delta1) / (4.0 * math.cos(0.5 * theta))
    return exact, AxisError(tilt_y_prime=tilt_y, tilt_z_prime=tilt_z,
                            angle_predicted=2.0 * theta)


def error_frame(n1, n2) -> tuple[np.ndarray, np.ndarray]:
    """(y', z') frame of the tilt report: z' || (n1+n2), y' = z' x xhat."""
    n1 = _check_yz_unit("n1", n1)
    n2 = _check_yz_unit("n2", n2)
    zp = n1 + n2
    nz = np.linalg.norm(zp)
    if nz == 0:
        raise SingularTiltError("antiparallel axes have no tilt frame")
    zp = zp / nz
    return np.cross(zp, X_HAT), zp


_GIMBAL_TOL = 1e-11


def _zxz_angles(m: np.ndarray) -> tuple[float, float, float]:
    """Angles of M = Rz(a) Rx(b) Rz(c) for an SU(2) matrix M (c applied first)."""
    m00, m01 = m[0, 0], m[0, 1]
    if abs(m01) < _GIMBAL_TOL:
        # b ~ 0: fold everything into a.
        return -2.0 * np.angle(m00), 0.0, 0.0
    if abs(m00) < _GIMBAL_TOL:
        # b ~ pi: a - c is the only free combination; set c = 0.
        return -2.0 * np.angle(1j * m01), math.pi, 0.0
    b = 2.0 * math.atan2(abs(m01), abs(m00))
    half_sum = -np.angle(m00)
    half_diff = -np.angle(1j * m01)
    return half_sum + half_diff, b, half_sum - half_diff


def euler_decompose(target: Rotation, w) -> tuple[float, float, float]:
    """Angles (a, b, c) with target = R_w(a) R_x(b) R_w(c), w in the yz plane.

    The middle axis is always x, orthogonal to w.  c is applied first.
    Near-degenerate b (0 or pi) resolves by setting c = 0 and folding the
    w rotation into a.  Reconstruction matches the target up to quaternion
    sign.
    """
    w = _check_yz_unit("w", w)
    tw = _polar(w)
    # V maps z to w; conjugating by V^{-1} turns the w-x-w problem into z-x-z.
    v = Rotation.from_axis_angle(X_HAT, -tw)
    m = compose(compose(v, target), v.inverse()).matrix()
    return _zxz_angles(m)


def x_rotation_phase(rot: Rotation) -> tuple[float, float]:
    """Rotation angle about +x mod 4pi and the off-x-axis quaternion weight."""
    w, x, y, z = rot.quaternion
    phi = (2.0 * math.atan2(x, w)) % (4.0 * math.pi)
    return phi, math.hypot(y, z)
