"""Minors of the rigidity matrix and their derivatives along a deformation.

The rigidity matrix is linear in the vertex positions, so along
``p + t v`` every entry moves at the rate given by the same matrix built
from the velocities. The derivative of a k x k minor M is then
``sum(cofactor(M) * Mdot)`` (Jacobi's formula). Cofactors are computed from
an SVD so that singular blocks, the interesting case here, are handled
without dividing by the determinant.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EnumerationTooLarge, IndexOutOfRange
from .flexspace import RANK_TOL, RigidityMatrix, rigidity_rows

ENUMERATION_CAP = 10**7
DEFAULT_SAMPLES = 10**5
VALUE_TOL = 1e-9
DERIV_TOL = 1e-9
MAX_OFFENDERS = 100
_BATCH = 20000


@dataclass(frozen=True)
class MinorIndex:
    rows: tuple
    cols: tuple

    def __post_init__(self):
        rows, cols = tuple(int(r) for r in self.rows), tuple(int(c) for c in self.cols)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        if len(rows) != len(cols) or not rows:
            raise IndexOutOfRange("row and column sets must be non-empty and equally sized")
        if any(b <= a for a, b in zip(rows, rows[1:])) or any(b <= a for a, b in zip(cols, cols[1:])):
            raise IndexOutOfRange("row and column sets must be strictly increasing")

    @property
    def k(self):
        return len(self.rows)

    def check(self, shape):
        if self.rows[0] < 0 or self.cols[0] < 0 or self.rows[-1] >= shape[0] or self.cols[-1] >= shape[1]:
            raise IndexOutOfRange(f"minor {self} outside a matrix of shape {shape}")


@dataclass(frozen=True)
class Offender:
    index: MinorIndex
    value: float
    derivative: float


@dataclass(frozen=True, eq=False)
class MinorReport:
    k: int
    strategy: str
    count: int
    seed: int = None
    max_abs_value: float = 0.0
    max_abs_derivative: float = 0.0
    n_value_offenders: int = 0
    n_derivative_offenders: int = 0
    value_offenders: list = field(default_factory=list)
    derivative_offenders: list = field(default_factory=list)

    @property
    def all_values_vanish(self):
        return self.n_value_offenders == 0

    @property
    def all_derivatives_vanish(self):
        return self.n_derivative_offenders == 0

    def to_json(self, limit=MAX_OFFENDERS):
        offenders = {}
        for o in self.derivative_offenders + self.value_offenders:
            offenders.setdefault((o.index.rows, o.index.cols), o)
        return {
            "k": self.k,
            "strategy": self.strategy,
            "seed": self.seed,
            "count": self.count,
            "max_abs_value": self.max_abs_value,
            "max_abs_derivative": self.max_abs_derivative,
            "value_offenders": self.n_value_offenders,
            "derivative_offenders": self.n_derivative_offenders,
            "all_values_vanish": self.all_values_vanish,
            "all_derivatives_vanish": self.all_derivatives_vanish,
            "offenders": [
                {"rows": list(o.index.rows), "cols": list(o.index.cols), "value": o.value, "derivative": o.derivative}
                for o in list(offenders.values())[:limit]
            ],
        }


def _matrix(R):
    return R.matrix if isinstance(R, RigidityMatrix) else np.asarray(R, dtype=float)


def minor_value(R, idx):
    M = _matrix(R)
    idx.check(M.shape)
    return float(np.linalg.det(M[np.ix_(idx.rows, idx.cols)]))


def cofactor_matrix(M):
    """Cofactor matrices of a batch (..., k, k), valid for singular input.

    With M = U diag(s) V^T, adj(M) = det(U) det(V) V diag(prod_{j!=i} s_j) U^T,
    and the cofactor matrix is adj(M)^T.
    """
    M = np.asarray(M, dtype=float)
    k = M.shape[-1]
    if k == 1:
        return np.ones_like(M)
    u, s, vt = np.linalg.svd(M)
    # products of all singular values but one, without division
    left = np.cumprod(np.concatenate([np.ones(s.shape[:-1] + (1,)), s[..., :-1]], axis=-1), axis=-1)
    right = np.cumprod(np.concatenate([np.ones(s.shape[:-1] + (1,)), s[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    others = left * right
    sign = np.linalg.det(u) * np.linalg.det(vt)
    adj = np.einsum("...ji,...j,...kj->...ik", vt, others, u)
    return np.swapaxes(adj, -1, -2) * sign[..., None, None]


def hadamard_scales(M, Mdot):
    """Upper bounds for |det M| and |d det M| from row norms."""
    rn = np.linalg.norm(M, axis=-1)
    dn = np.linalg.norm(Mdot, axis=-1)
    value = np.prod(rn, axis=-1)
    k = rn.shape[-1]
    deriv = np.zeros(rn.shape[:-1])
    for a in range(k):
        others = np.prod(np.delete(rn, a, axis=-1), axis=-1)
        deriv = deriv + dn[..., a] * others
    return value, deriv


def minor_directional_derivative(p, flex, idx):
    R = rigidity_rows(p.vertices, p.edges)
    Rdot = rigidity_rows(np.asarray(flex, dtype=float), p.edges)
    idx.check(R.shape)
    sel = np.ix_(idx.rows, idx.cols)
    return float(np.sum(cofactor_matrix(R[sel]) * Rdot[sel]))


def rank_profile(R, rank_tol=RANK_TOL):
    s = np.linalg.svd(_matrix(R), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0, s
    return int(np.sum(s > rank_tol * s[0])), s


def minimal_vanishing_size(R, rank_tol=RANK_TOL):
    rank, _ = rank_profile(R, rank_tol)
    return rank + 1


def minor_count(n_rows, n_cols, k):
    return math.comb(n_rows, k) * math.comb(n_cols, k)


def _full_batches(n_rows, n_cols, k):
    col_sets = np.array(list(itertools.combinations(range(n_cols), k)), dtype=np.int64)
    for rows in itertools.combinations(range(n_rows), k):
        for start in range(0, len(col_sets), _BATCH):
            cols = col_sets[start : start + _BATCH]
            yield np.broadcast_to(np.array(rows), cols.shape), cols


def _sampled_batches(n_rows, n_cols, k, count, seed):
    rng = np.random.default_rng(seed)
    done = 0
    while done < count:
        n = min(_BATCH, count - done)
        rows = np.sort(rng.random((n, n_rows)).argsort(axis=1)[:, :k], axis=1)
        cols = np.sort(rng.random((n, n_cols)).argsort(axis=1)[:, :k], axis=1)
        done += n
        yield rows, cols


def minor_stationarity_report(
    p,
    flex,
    k,
    strategy="full",
    value_tol=VALUE_TOL,
    deriv_tol=DERIV_TOL,
    samples=DEFAULT_SAMPLES,
    seed=0,
    cap=ENUMERATION_CAP,
    keep=MAX_OFFENDERS,
):
    """Values and t-derivatives of k x k minors along ``p + t*flex``.

    A minor counts as nonzero when it exceeds ``value_tol`` times the
    Hadamard bound of its block, and its derivative as nonzero when it
    exceeds ``deriv_tol`` times the corresponding bound for the derivative.
    """
    R = rigidity_rows(p.vertices, p.edges)
    Rdot = rigidity_rows(np.asarray(flex, dtype=float), p.edges)
    n_rows, n_cols = R.shape
    if not 1 <= k <= min(n_rows, n_cols):
        raise IndexOutOfRange(f"minor size {k} impossible for a {n_rows}x{n_cols} matrix")
    if strategy == "full":
        total = minor_count(n_rows, n_cols, k)
        if total > cap:
            raise EnumerationTooLarge(f"{total} minors exceed the cap of {cap}; use sampling")
        batches = _full_batches(n_rows, n_cols, k)
        seed = None
    elif strategy == "sampled":
        total = samples
        batches = _sampled_batches(n_rows, n_cols, k, samples, seed)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    max_val = max_der = 0.0
    n_val = n_der = 0
    val_off, der_off = [], []
    for rows, cols in batches:
        M = R[rows[:, :, None], cols[:, None, :]]
        Md = Rdot[rows[:, :, None], cols[:, None, :]]
        vals = np.linalg.det(M)
        ders = np.einsum("nij,nij->n", cofactor_matrix(M), Md)
        vscale, dscale = hadamard_scales(M, Md)
        # a zero bound means the quantity is exactly zero; what remains is rounding
        bad_v = (np.abs(vals) > value_tol * vscale) & (vscale > 0)
        bad_d = (np.abs(ders) > deriv_tol * dscale) & (dscale > 0)
        max_val = max(max_val, float(np.max(np.abs(vals))))
        max_der = max(max_der, float(np.max(np.abs(ders))))
        n_val += int(bad_v.sum())
        n_der += int(bad_d.sum())
        for store, mask in ((val_off, bad_v), (der_off, bad_d)):
            for n in np.flatnonzero(mask)[: max(0, keep - len(store))]:
                store.append(Offender(MinorIndex(rows[n], cols[n]), float(vals[n]), float(ders[n])))
    return MinorReport(
        k=k,
        strategy=strategy,
        count=total,
        seed=seed,
        max_abs_value=max_val,
        max_abs_derivative=max_der,
        n_value_offenders=n_val,
        n_derivative_offenders=n_der,
        value_offenders=val_off,
        derivative_offenders=der_off,
    )
