"""Linear conditions on a first-order flex coming from Dehn invariants.

Given a basis lambda_1..lambda_m of the rational span of the edge lengths and
rational coordinates alpha[e, j] with length(e) = sum_j alpha[e, j] lambda_j,
the sums ``sum_e alpha[e, j] phi_e`` stay constant along any flex. Their
derivatives are linear in the vertex velocities; a first-order flex that
violates one of them cannot be the tangent of a flex.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .edges import (
    TRIG_TOL,
    Policy,
    Variant,
    dihedral_angles,
    frame_points,
    relative_velocities,
    rs_from_points,
    select_g,
)
from .errors import DecompositionFailed, TheoremHypothesisViolated
from .flexspace import check_first_order_flex
from .mesh import degenerate_faces, edge_frames

DECOMP_TOL = 1e-14
MAX_DENOMINATOR = 10**6
DEHN_TOL = 1e-8


@dataclass(frozen=True)
class LengthBasis:
    labels: tuple
    values: tuple

    def __post_init__(self):
        if len(self.labels) != len(self.values) or not self.values:
            raise ValueError("basis needs matching, non-empty labels and values")
        if any(not (v > 0 and math.isfinite(v)) for v in self.values):
            raise ValueError("basis values must be positive and finite")
        if len(set(self.values)) != len(self.values):
            raise ValueError("basis values must be pairwise distinct")

    @classmethod
    def from_values(cls, values, labels=None):
        values = tuple(float(v) for v in values)
        if labels is None:
            labels = tuple(f"lambda{j + 1}" for j in range(len(values)))
        return cls(tuple(labels), values)

    @property
    def m(self):
        return len(self.values)


@dataclass(frozen=True)
class LengthDecomposition:
    basis: LengthBasis
    alpha: tuple  # per edge, a tuple of m Fractions

    def matrix(self):
        return np.array([[float(a) for a in row] for row in self.alpha], dtype=float).reshape(
            len(self.alpha), self.basis.m
        )


@dataclass(frozen=True, eq=False)
class DehnEquation:
    j: int
    terms: tuple  # (edge_id, frame, scaled (3, 3) g)
    vector: np.ndarray  # (V, 3); equation reads sum(vector * flex) = 0


@dataclass(frozen=True, eq=False)
class DehnReport:
    residuals: np.ndarray
    scales: np.ndarray
    passed: np.ndarray
    variants: tuple  # per edge
    tol: float

    @property
    def all_passed(self):
        return bool(np.all(self.passed))


def auto_basis(p, rel_tol=1e-12):
    """Distinct edge lengths as a basis; rational independence is assumed."""
    vals = []
    for ell in sorted(p.edge_lengths()):
        if not vals or ell - vals[-1] > rel_tol * ell:
            vals.append(float(ell))
    return LengthBasis.from_values(vals, [f"len{j + 1}" for j in range(len(vals))])


def _reconstruct(ell, values, support, tol, max_den):
    if len(support) == 1:
        lam = values[support[0]]
        a = Fraction(ell / lam).limit_denominator(max_den)
        if a == 0:
            return None
        coeffs = {support[0]: a}
    else:
        # integer relation c0*ell + sum c_j lambda_j = 0 with c0 != 0
        with mpmath.workdps(15):
            rel = mpmath.pslq(
                [ell] + [values[j] for j in support], tol=tol, maxcoeff=max_den, maxsteps=10**4
            )
        if rel is None or rel[0] == 0 or any(c == 0 for c in rel[1:]):
            return None
        coeffs = {j: Fraction(-c, rel[0]) for j, c in zip(support, rel[1:])}
        if any(c.denominator > max_den for c in coeffs.values()):
            return None
    approx = sum(float(a) * values[j] for j, a in coeffs.items())
    if abs(approx - ell) > tol * ell:
        return None
    return coeffs


def decompose_lengths(p, basis, decomp_tol=DECOMP_TOL, max_denominator=MAX_DENOMINATOR):
    """Rational coordinates of every edge length over ``basis``.

    Supports are tried in order of size; single-element supports use
    continued-fraction rounding, larger ones an integer-relation search.
    """
    if degenerate_faces(p):
        raise TheoremHypothesisViolated("faces must be non-degenerate")
    values = basis.values
    rows = []
    cache = {}
    for n, ell in enumerate(p.edge_lengths()):
        key = float(ell)
        if key not in cache:
            found = None
            for size in range(1, basis.m + 1):
                for support in itertools.combinations(range(basis.m), size):
                    found = _reconstruct(key, values, support, decomp_tol, max_denominator)
                    if found is not None:
                        break
                if found is not None:
                    break
            if found is None:
                raise DecompositionFailed(
                    f"edge {tuple(p.edges[n])} of length {key!r} has no rational "
                    f"decomposition over the basis with denominators <= {max_denominator}"
                )
            cache[key] = tuple(found.get(j, Fraction(0)) for j in range(basis.m))
        rows.append(cache[key])
    return LengthDecomposition(basis, tuple(rows))


def decomposition_from_alpha(p, basis, alpha, decomp_tol=1e-12):
    """Build a decomposition from explicit coefficients.

    ``alpha`` maps an edge (pair of vertex indices, or an ``"i-j"`` string) to
    m rationals (Fractions, ints or ``"p/q"`` strings). Every edge must be
    present.
    """
    table = {}
    for key, coeffs in alpha.items():
        if isinstance(key, str):
            i, j = (int(s) for s in key.split("-"))
        else:
            i, j = key
        if len(coeffs) != basis.m:
            raise ValueError(f"edge {key}: expected {basis.m} coefficients")
        table[(min(i, j), max(i, j))] = tuple(Fraction(c) for c in coeffs)
    rows = []
    for (i, j), ell in zip(p.edges, p.edge_lengths()):
        key = (int(i), int(j))
        if key not in table:
            raise DecompositionFailed(f"no coefficients given for edge {key}")
        row = table[key]
        approx = sum(float(a) * v for a, v in zip(row, basis.values))
        if abs(approx - ell) > decomp_tol * ell:
            raise DecompositionFailed(
                f"edge {key}: coefficients give {approx!r}, length is {float(ell)!r}"
            )
        rows.append(row)
    return LengthDecomposition(basis, tuple(rows))


def _check_hypotheses(p):
    if not p.oriented:
        raise TheoremHypothesisViolated("the surface must be orientable")
    if degenerate_faces(p):
        raise TheoremHypothesisViolated("faces must be non-degenerate")


def _edge_selections(p, policy, trig_tol, slots):
    out = []
    for fr in edge_frames(p):
        coeffs, trig = rs_from_points(*frame_points(p.vertices, fr), trig_tol=trig_tol)
        out.append((fr, select_g(coeffs, trig, policy, slots)))
    return out


def dehn_equations(p, decomp, policy=Policy.PREFER_STABLE, trig_tol=TRIG_TOL, slots="rss"):
    _check_hypotheses(p)
    A = decomp.matrix()
    sel = _edge_selections(p, policy, trig_tol, slots)
    eqs = []
    for j in range(decomp.basis.m):
        vec = np.zeros((p.n_vertices, 3))
        terms = []
        for fr, g in sel:
            a = A[fr.edge_id, j]
            if a == 0:
                continue
            gs = a * g.g
            terms.append((fr.edge_id, fr, gs))
            vec[fr.y] += gs[0]
            vec[fr.z1] += gs[1]
            vec[fr.z2] += gs[2]
            vec[fr.x] -= gs.sum(axis=0)
        eqs.append(DehnEquation(j, tuple(terms), vec))
    return eqs


def evaluate_dehn(
    p,
    decomp,
    flex,
    policy=Policy.PREFER_STABLE,
    dehn_tol=DEHN_TOL,
    trig_tol=TRIG_TOL,
    slots="rss",
    check=True,
):
    """Residual of every Dehn condition on ``flex``.

    Residuals are accumulated from velocity differences per edge, so adding
    a common translation to all velocities cannot change them.
    """
    _check_hypotheses(p)
    v = np.asarray(flex, dtype=float)
    if check:
        check_first_order_flex(p, v)
    A = decomp.matrix()
    sel = _edge_selections(p, policy, trig_tol, slots)
    speed = float(np.max(np.linalg.norm(v, axis=1))) if v.size else 0.0
    contractions = np.array([g.contract(relative_velocities(v, fr)) for fr, g in sel])
    sizes = np.array([np.linalg.norm(g.g, axis=1).sum() for _, g in sel])
    residuals = A.T @ contractions
    scales = np.abs(A).T @ sizes * speed
    passed = np.abs(residuals) <= dehn_tol * scales
    return DehnReport(
        residuals=residuals,
        scales=scales,
        passed=passed,
        variants=tuple(g.variant for _, g in sel),
        tol=dehn_tol,
    )


def unwrap_near(phi, reference):
    """Shift angles by multiples of 2pi to lie within pi of ``reference``."""
    phi = np.asarray(phi, dtype=float)
    return phi - 2 * np.pi * np.round((phi - reference) / (2 * np.pi))


def dehn_expression_values(p, decomp, reference_angles=None, trig_tol=TRIG_TOL):
    """sum_e alpha[e, j] phi_e for each basis element j.

    With ``reference_angles`` the dihedral angles are first unwrapped to the
    branch nearest the reference, which keeps values continuous along a path.
    """
    phi = dihedral_angles(p.vertices, edge_frames(p), trig_tol)
    if reference_angles is not None:
        phi = unwrap_near(phi, reference_angles)
    return decomp.matrix().T @ phi


@dataclass(frozen=True)
class BranchCheck:
    edge: tuple
    discrepancy: float
    scale: float
    ok: bool


def per_edge_branch_consistency(p, flex, tol=1e-7, trig_tol=TRIG_TOL, check=True):
    """Compare the r- and s-triple angle derivatives on every edge where both exist."""
    v = np.asarray(flex, dtype=float)
    if check:
        check_first_order_flex(p, v)
    speed = float(np.max(np.linalg.norm(v, axis=1))) if v.size else 0.0
    out = []
    for fr in edge_frames(p):
        coeffs, _ = rs_from_points(*frame_points(p.vertices, fr), trig_tol=trig_tol)
        if coeffs.r is None or coeffs.s is None:
            continue
        rel = relative_velocities(v, fr)
        d = float(np.sum((coeffs.r - coeffs.s) * rel))
        scale = (np.linalg.norm(coeffs.r, axis=1).sum() + np.linalg.norm(coeffs.s, axis=1).sum()) * speed
        out.append(BranchCheck(tuple(int(k) for k in p.edges[fr.edge_id]), d, float(scale), abs(d) <= tol * scale))
    return out


__all__ = [
    "LengthBasis",
    "LengthDecomposition",
    "DehnEquation",
    "DehnReport",
    "BranchCheck",
    "Policy",
    "Variant",
    "auto_basis",
    "decompose_lengths",
    "decomposition_from_alpha",
    "dehn_equations",
    "evaluate_dehn",
    "dehn_expression_values",
    "per_edge_branch_consistency",
    "unwrap_near",
]
