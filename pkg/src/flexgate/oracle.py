"""Independent checks: finite differences, numeric flex continuation and
canonical example polyhedra."""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .edges import dihedral_from_points, frame_points
from .errors import (
    AngleUnwrapFailure,
    ContinuationStalled,
    DegenerateFace,
    InvalidParams,
    KernelCollapse,
    UnknownExample,
)
from .flexspace import RANK_TOL, flex_space, rigidity_rows, trivial_motions
from .mesh import build_polyhedron, degenerate_faces
from .minors import minor_value

FD_STEP = 1e-6
NEWTON_TOL = 1e-12
NEWTON_CAP = 50
# corrected step shorter than this fraction of the predictor step means no progress
STALL_RATIO = 0.5


# --- example polyhedra ---------------------------------------------------


class Example(enum.Enum):
    TETRA_REGULAR = "tetra-regular"
    BIPYRAMID_Q = "bipyramid-q"
    BRICARD1 = "bricard1"
    OCTA_REGULAR = "octa-regular"


BRICARD1_DEFAULTS = {"A": (2.0, 0.0, 1.0), "B": (0.0, 1.5, 2.0), "C": (1.0, -1.0, 3.0)}


def bipyramid_q_vertices():
    s3, s6 = math.sqrt(3.0), math.sqrt(6.0)
    return np.array(
        [
            [4.0 / 3.0 * s3 - 3.0, 0.0, -8.0 / 3.0 * s6],
            [4.0 * s3 - 3.0, 0.0, 0.0],
            [-3.0, 4.0, 0.0],
            [-3.0, -4.0, 0.0],
            [0.0, 0.0, 0.0],
        ]
    )


BIPYRAMID_Q_FACES = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 2, 4), (2, 3, 4), (3, 1, 4)]


def octahedron_faces():
    """Faces over vertices (a, b, c, a', b', c') = (0..5); primes are opposite.

    Winding follows the cross-polytope: (±e1, ±e2, ±e3) is counter-clockwise
    seen from outside exactly when the sign product is positive.
    """
    faces = []
    for s1 in (1, -1):
        for s2 in (1, -1):
            for s3 in (1, -1):
                tri = (0 if s1 > 0 else 3, 1 if s2 > 0 else 4, 2 if s3 > 0 else 5)
                faces.append(tri if s1 * s2 * s3 > 0 else tri[::-1])
    return faces


def bricard1_vertices(A, B, C):
    try:
        pts = np.array([A, B, C], dtype=float)
    except ValueError:
        raise InvalidParams("A, B, C must be finite 3-vectors") from None
    if pts.shape != (3, 3) or not np.all(np.isfinite(pts)):
        raise InvalidParams("A, B, C must be finite 3-vectors")
    if np.any(np.hypot(pts[:, 0], pts[:, 1]) < 1e-12):
        raise InvalidParams("A, B, C must lie off the symmetry axis")
    # half-turn about the z-axis
    images = pts * np.array([-1.0, -1.0, 1.0])
    return np.vstack([pts, images])


def gen_example(name, **params):
    """Build one of the canonical fixtures as a validated Polyhedron."""
    try:
        name = Example(name)
    except ValueError:
        raise UnknownExample(name) from None
    if name is Example.TETRA_REGULAR:
        a = float(params.get("a", 1.0))
        if not a > 0:
            raise InvalidParams("edge length must be positive")
        h = a / math.sqrt(2.0)
        verts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) * (h / 2)
        return build_polyhedron(verts, [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)])
    if name is Example.OCTA_REGULAR:
        a = float(params.get("a", 1.0))
        if not a > 0:
            raise InvalidParams("edge length must be positive")
        r = a / math.sqrt(2.0)
        verts = np.vstack([np.eye(3), -np.eye(3)]) * r
        return build_polyhedron(verts, octahedron_faces())
    if name is Example.BIPYRAMID_Q:
        return build_polyhedron(bipyramid_q_vertices(), BIPYRAMID_Q_FACES)
    # BRICARD1
    pars = {**BRICARD1_DEFAULTS, **params}
    unknown = set(pars) - set(BRICARD1_DEFAULTS)
    if unknown:
        raise InvalidParams(f"unknown parameters {sorted(unknown)}")
    verts = bricard1_vertices(pars["A"], pars["B"], pars["C"])
    try:
        p = build_polyhedron(verts, octahedron_faces())
    except ValueError as exc:
        raise InvalidParams(str(exc)) from exc
    if degenerate_faces(p):
        raise InvalidParams("parameters give a degenerate face")
    if flex_space(p).kernel_dim < 7:
        raise InvalidParams("parameters give an infinitesimally rigid octahedron")
    return p


# --- finite differences ----------------------------------------------------


def fd_angle_derivative(p, frame, flex, h=FD_STEP):
    """Central difference of the dihedral angle at ``frame`` along p + t*flex."""
    if not h > 0:
        raise ValueError("step must be positive")
    v = np.asarray(flex, dtype=float)
    phi0 = dihedral_from_points(*frame_points(p.vertices, frame)).phi
    phis = []
    for sign in (1.0, -1.0):
        phi = dihedral_from_points(*frame_points(p.vertices + sign * h * v, frame)).phi
        phi -= 2 * math.pi * round((phi - phi0) / (2 * math.pi))
        if abs(phi - phi0) > math.pi / 2:
            raise AngleUnwrapFailure(f"angle jumps by {phi - phi0:.3f} rad; step too large")
        phis.append(phi)
    return (phis[0] - phis[1]) / (2 * h)


def fd_minor_derivative(p, flex, idx, h=FD_STEP):
    if not h > 0:
        raise ValueError("step must be positive")
    v = np.asarray(flex, dtype=float)
    plus = minor_value(rigidity_rows(p.vertices + h * v, p.edges), idx)
    minus = minor_value(rigidity_rows(p.vertices - h * v, p.edges), idx)
    return (plus - minus) / (2 * h)


# --- continuation ----------------------------------------------------------


@dataclass(frozen=True)
class ContinuationStep:
    t: float
    positions: np.ndarray
    tangent: np.ndarray
    kernel_dim: int
    edge_drift: float
    newton_iterations: int


@dataclass(frozen=True)
class ContinuationResult:
    steps: list = field(default_factory=list)

    @property
    def max_edge_drift(self):
        return max((s.edge_drift for s in self.steps), default=0.0)

    @property
    def newton_iterations(self):
        return [s.newton_iterations for s in self.steps]

    @property
    def final_positions(self):
        return self.steps[-1].positions


def _nontrivial_kernel(p, rank_tol):
    rep = flex_space(p, rank_tol)
    return rep.kernel_dim, rep.nontrivial_basis.reshape(len(rep.nontrivial_basis), 3 * p.n_vertices)


def _closest_tangent(basis, previous):
    """Unit vector of span(basis) nearest in angle to ``previous``."""
    c = basis @ previous
    t = basis.T @ c
    norm = np.linalg.norm(t)
    if norm == 0:
        raise KernelCollapse("previous tangent is orthogonal to the current flex space")
    return t / norm


def _newton(pos, edges, target_sq, lengths, tol, cap):
    for it in range(cap + 1):
        d = pos[edges[:, 0]] - pos[edges[:, 1]]
        f = np.einsum("ij,ij->i", d, d) - target_sq
        drift = np.abs(np.sqrt(target_sq + f) - lengths)
        if np.all(drift <= tol * lengths):
            return pos, it, float(drift.max())
        if it == cap:
            break
        J = 2.0 * rigidity_rows(pos, edges)
        step = np.linalg.lstsq(J, -f, rcond=None)[0]
        pos = pos + step.reshape(pos.shape)
    raise ContinuationStalled(f"Newton corrector did not converge in {cap} iterations")


def continue_flex(
    p,
    direction,
    step_size=1e-2,
    n_steps=50,
    newton_tol=NEWTON_TOL,
    rank_tol=RANK_TOL,
    newton_cap=NEWTON_CAP,
):
    """Follow the edge-length-preserving curve through ``p`` starting along ``direction``.

    Predictor: a step of length ``step_size`` along the current unit tangent.
    Corrector: least-norm Newton iterations on squared edge lengths. The new
    tangent is the vector of the current nontrivial flex space closest in
    angle to the previous one.
    """
    kdim, basis = _nontrivial_kernel(p, rank_tol)
    if kdim < 7:
        raise KernelCollapse(f"kernel dimension {kdim}: no nontrivial first-order flex")
    d = np.asarray(direction, dtype=float).ravel()
    tangent = _closest_tangent(basis, d)
    if np.linalg.norm(basis @ d) < 1e-8 * np.linalg.norm(d):
        raise ValueError("direction has no component in the nontrivial flex space")

    edges = p.edges
    lengths = p.edge_lengths()
    target_sq = lengths**2
    pos = p.vertices.copy()
    steps = [ContinuationStep(0.0, pos.copy(), tangent.reshape(pos.shape), kdim, 0.0, 0)]
    cur = p
    for n in range(1, n_steps + 1):
        guess = pos + step_size * tangent.reshape(pos.shape)
        new, iters, drift = _newton(guess, edges, target_sq, lengths, newton_tol, newton_cap)
        moved = (new - pos).ravel()
        T = trivial_motions(cur).reshape(6, -1)
        progress = np.linalg.norm(moved - T.T @ (T @ moved))
        if progress < STALL_RATIO * step_size:
            raise ContinuationStalled(
                f"step {n}: corrector undid the predictor (progress {progress:.2e} "
                f"for step {step_size:.2e}); the direction does not extend"
            )
        cur = p.with_vertices(new)
        if degenerate_faces(cur):
            raise DegenerateFace(f"step {n}: a face degenerated along the path")
        kdim, basis = _nontrivial_kernel(cur, rank_tol)
        if kdim < 7:
            raise KernelCollapse(f"step {n}: kernel dimension dropped to {kdim}")
        tangent = _closest_tangent(basis, tangent)
        pos = new
        steps.append(ContinuationStep(n * step_size, pos.copy(), tangent.reshape(pos.shape), kdim, drift, iters))
    return ContinuationResult(steps)
