"""Per-edge dihedral geometry and the coefficient vectors of the angle derivative.

For an edge with frame (x, y, z1, z2) write ``w = y - x``, ``w1 = z1 - x``
and ``w2 = z2 - x``. With doubled face areas ``A1 = |w x w1|`` and
``A2 = |w x w2|`` the interior dihedral angle satisfies::

    A1 A2 cos(phi) = |w|^2 (w1.w2) - (w1.w) (w2.w)          (= theta)
    A1 A2 sin(phi) = -|w| w.(w1 x w2)

Differentiating both identities along a motion that keeps the three edge
lengths of each face stationary gives two linear expressions for the rate
of change of ``phi`` in terms of the relative velocities
``W = v_y - v_x``, ``W1 = v_z1 - v_x`` and ``W2 = v_z2 - v_x``:
the "r" triple (valid when sin(phi) != 0) and the "s" triple (valid when
cos(phi) != 0). Coefficient triples are stored as (3, 3) arrays whose rows
pair with (W, W1, W2).
"""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BothBranchesUndefined, BranchUndefined, DegenerateFace
from .mesh import DEGENERACY_TOL

TRIG_TOL = 1e-9
TWO_PI = 2.0 * math.pi


class Policy(enum.Enum):
    PREFER_STABLE = "prefer-stable"
    FORCE_R = "force-r"
    FORCE_S = "force-s"
    # slot-wise mixing of r and s rows; experimental
    MIXED_SLOTS = "mixed-slots"


class Variant(enum.Enum):
    R_TRIPLE = "r"
    S_TRIPLE = "s"
    MIXED = "mixed"


@dataclass(frozen=True)
class DihedralData:
    ell: float
    ell1: float
    ell2: float
    area1: float
    area2: float
    n1: np.ndarray
    n2: np.ndarray
    cos_phi: float
    sin_phi: float
    phi: float


@dataclass(frozen=True)
class EdgeCoefficients:
    p: np.ndarray  # (3, 3)
    q: np.ndarray  # (3, 3)
    theta: float
    triple: float  # w . (w1 x w2)
    ell: float
    r: Optional[np.ndarray] = None
    s: Optional[np.ndarray] = None


@dataclass(frozen=True)
class GSelection:
    g: np.ndarray  # (3, 3), rows pair with (W, W1, W2)
    variant: Variant

    def contract(self, rel):
        return float(np.sum(self.g * rel))


def frame_points(positions, frame):
    pos = np.asarray(positions, dtype=float)
    return pos[frame.x], pos[frame.y], pos[frame.z1], pos[frame.z2]


def relative_velocities(flex, frame):
    """Stack (v_y - v_x, v_z1 - v_x, v_z2 - v_x) as a (3, 3) array."""
    v = np.asarray(flex, dtype=float)
    vx = v[frame.x]
    return np.stack([v[frame.y] - vx, v[frame.z1] - vx, v[frame.z2] - vx])


def _angle(sin_phi, cos_phi, trig_tol=TRIG_TOL):
    if abs(sin_phi) <= trig_tol and cos_phi < 0:
        return math.pi
    return math.atan2(sin_phi, cos_phi) % TWO_PI


def dihedral_from_points(x, y, z1, z2, trig_tol=TRIG_TOL):
    x, y, z1, z2 = (np.asarray(a, dtype=float) for a in (x, y, z1, z2))
    w, w1, w2 = y - x, z1 - x, z2 - x
    c1 = np.cross(w, w1)
    c2 = np.cross(w2, w)
    a1 = float(np.linalg.norm(c1))
    a2 = float(np.linalg.norm(c2))
    ell = float(np.linalg.norm(w))
    ell1 = float(np.linalg.norm(w1))
    ell2 = float(np.linalg.norm(w2))
    if a1 < DEGENERACY_TOL * max(ell, ell1, float(np.linalg.norm(z1 - y))) ** 2 or a2 < (
        DEGENERACY_TOL * max(ell, ell2, float(np.linalg.norm(z2 - y))) ** 2
    ):
        raise DegenerateFace("an adjacent face has (near) zero area")
    denom = a1 * a2
    cos_phi = (ell**2 * np.dot(w1, w2) - np.dot(w1, w) * np.dot(w2, w)) / denom
    sin_phi = -ell * np.dot(w, np.cross(w1, w2)) / denom
    return DihedralData(
        ell=ell,
        ell1=ell1,
        ell2=ell2,
        area1=a1,
        area2=a2,
        n1=c1 / a1,
        n2=c2 / a2,
        cos_phi=float(cos_phi),
        sin_phi=float(sin_phi),
        phi=_angle(float(sin_phi), float(cos_phi), trig_tol),
    )


def dihedral_data(p, frame, trig_tol=TRIG_TOL):
    return dihedral_from_points(*frame_points(p.vertices, frame), trig_tol=trig_tol)


def dihedral_angles(positions, frames, trig_tol=TRIG_TOL):
    """Interior angles for many frames at once, in [0, 2pi)."""
    pos = np.asarray(positions, dtype=float)
    idx = np.array([f.quad for f in frames], dtype=np.int64)
    x, y, z1, z2 = (pos[idx[:, k]] for k in range(4))
    w, w1, w2 = y - x, z1 - x, z2 - x
    ell = np.linalg.norm(w, axis=1)
    cos_num = ell**2 * np.einsum("ij,ij->i", w1, w2) - np.einsum(
        "ij,ij->i", w1, w
    ) * np.einsum("ij,ij->i", w2, w)
    sin_num = -ell * np.einsum("ij,ij->i", w, np.cross(w1, w2))
    # the common positive factor A1*A2 does not change atan2
    phi = np.mod(np.arctan2(sin_num, cos_num), TWO_PI)
    denom = np.linalg.norm(np.cross(w, w1), axis=1) * np.linalg.norm(np.cross(w2, w), axis=1)
    flat = (np.abs(sin_num) <= trig_tol * denom) & (cos_num < 0)
    phi[flat] = math.pi
    return phi


def _pq_from_points(x, y, z1, z2):
    w, w1, w2 = y - x, z1 - x, z2 - x
    ell = float(np.linalg.norm(w))
    ww1 = float(np.dot(w, w1))
    ww2 = float(np.dot(w, w2))
    p = np.stack(
        [
            ww2 * w1 + ww1 * w2,
            ww2 * w - ell**2 * w2,
            ww1 * w - ell**2 * w1,
        ]
    )
    q = np.stack(
        [
            -ell * np.cross(w1, w2),
            ell * np.cross(w, w2),
            -ell * np.cross(w, w1),
        ]
    )
    theta = ell**2 * float(np.dot(w1, w2)) - ww1 * ww2
    triple = float(np.dot(w, np.cross(w1, w2)))
    return p, q, theta, triple, ell


def pq_vectors(p, frame):
    pv, qv, theta, triple, ell = _pq_from_points(*frame_points(p.vertices, frame))
    return EdgeCoefficients(p=pv, q=qv, theta=theta, triple=triple, ell=ell)


def rs_from_points(x, y, z1, z2, trig_tol=TRIG_TOL):
    x, y, z1, z2 = (np.asarray(a, dtype=float) for a in (x, y, z1, z2))
    pv, qv, theta, triple, ell = _pq_from_points(x, y, z1, z2)
    a1a2 = float(np.linalg.norm(np.cross(y - x, z1 - x)) * np.linalg.norm(np.cross(z2 - x, y - x)))
    if a1a2 == 0.0:
        raise DegenerateFace("an adjacent face has zero area")
    # normalised trig values decide which denominators are usable
    sin_phi = -ell * triple / a1a2
    cos_phi = theta / a1a2
    r = s = None
    if abs(sin_phi) > trig_tol:
        r = -pv / (ell * triple)
    if abs(cos_phi) > trig_tol:
        s = qv / theta
    if r is None and s is None:
        raise BothBranchesUndefined(
            f"|sin phi| and |cos phi| both <= {trig_tol}; tolerance too large"
        )
    return EdgeCoefficients(p=pv, q=qv, theta=theta, triple=triple, ell=ell, r=r, s=s), (
        sin_phi,
        cos_phi,
    )


def rs_vectors(p, frame, trig_tol=TRIG_TOL):
    coeffs, _ = rs_from_points(*frame_points(p.vertices, frame), trig_tol=trig_tol)
    return coeffs


def select_g(coeffs, trig, policy=Policy.PREFER_STABLE, slots="rss"):
    """Choose the coefficient triple used for the angle derivative."""
    sin_phi, cos_phi = trig
    policy = Policy(policy)
    if policy is Policy.PREFER_STABLE:
        if coeffs.s is not None and (abs(cos_phi) >= abs(sin_phi) or coeffs.r is None):
            return GSelection(coeffs.s, Variant.S_TRIPLE)
        return GSelection(coeffs.r, Variant.R_TRIPLE)
    if policy is Policy.FORCE_R:
        if coeffs.r is None:
            raise BranchUndefined("r triple undefined: sin(phi) = 0")
        return GSelection(coeffs.r, Variant.R_TRIPLE)
    if policy is Policy.FORCE_S:
        if coeffs.s is None:
            raise BranchUndefined("s triple undefined: cos(phi) = 0")
        return GSelection(coeffs.s, Variant.S_TRIPLE)
    if len(slots) != 3 or set(slots) - {"r", "s"}:
        raise ValueError("slots must be a 3-letter string over {'r', 's'}")
    rows = []
    for k, c in enumerate(slots):
        src = coeffs.r if c == "r" else coeffs.s
        if src is None:
            raise BranchUndefined(f"{c} triple undefined for slot {k}")
        rows.append(src[k])
    return GSelection(np.stack(rows), Variant.MIXED)


def g_vectors(p, frame, policy=Policy.PREFER_STABLE, trig_tol=TRIG_TOL, slots="rss"):
    coeffs, trig = rs_from_points(*frame_points(p.vertices, frame), trig_tol=trig_tol)
    return select_g(coeffs, trig, policy, slots)


def angle_derivative(p, frame, flex, trig_tol=TRIG_TOL, check=True):
    """Rate of change of the dihedral angle at ``frame`` along a first-order flex."""
    if check:
        # local import: flex_space depends on this module
        from .flexspace import check_first_order_flex

        check_first_order_flex(p, flex)
    sel = g_vectors(p, frame, Policy.PREFER_STABLE, trig_tol)
    return sel.contract(relative_velocities(flex, frame))
