import json
import math

import numpy as np
import pytest

from flexgate.errors import EnumerationTooLarge, IndexOutOfRange
from flexgate.flexspace import rigidity_matrix, rigidity_rows
from flexgate.minors import (
    MinorIndex,
    cofactor_matrix,
    minimal_vanishing_size,
    minor_count,
    minor_directional_derivative,
    minor_stationarity_report,
    minor_value,
    rank_profile,
)
from flexgate.oracle import fd_minor_derivative


def laplace_det(M):
    """Cofactor expansion along the first row; exponential, for small checks only."""
    n = len(M)
    if n == 1:
        return M[0][0]
    return sum(
        (-1) ** c * M[0][c] * laplace_det([row[:c] + row[c + 1 :] for row in M[1:]]) for c in range(n)
    )


def laplace_cofactors(M):
    n = len(M)
    rows = M.tolist()
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            sub = [r[:j] + r[j + 1 :] for k, r in enumerate(rows) if k != i]
            out[i, j] = (-1) ** (i + j) * laplace_det(sub)
    return out


@pytest.mark.parametrize("rank_drop", [0, 1, 2])
def test_cofactors_against_expansion(rng, rank_drop):
    for n in (2, 3, 5):
        M = rng.normal(size=(n, n))
        if rank_drop:
            u, s, vt = np.linalg.svd(M)
            s[n - rank_drop :] = 0
            M = (u * s) @ vt
        np.testing.assert_allclose(cofactor_matrix(M), laplace_cofactors(M), atol=1e-12)


def test_cofactor_batch_and_1x1(rng):
    Ms = rng.normal(size=(7, 4, 4))
    C = cofactor_matrix(Ms)
    for M, c in zip(Ms, C):
        np.testing.assert_allclose(c, laplace_cofactors(M), atol=1e-12)
    np.testing.assert_array_equal(cofactor_matrix(np.array([[3.0]])), [[1.0]])


def test_minor_value_against_expansion(q):
    R = rigidity_matrix(q)
    idx = MinorIndex((0, 2, 5, 7), (0, 4, 8, 13))
    sub = R.matrix[np.ix_(idx.rows, idx.cols)].tolist()
    assert minor_value(R, idx) == pytest.approx(laplace_det(sub), abs=1e-10)


def test_minor_index_validation():
    with pytest.raises(IndexOutOfRange):
        MinorIndex((1, 0), (0, 1))
    with pytest.raises(IndexOutOfRange):
        MinorIndex((0,), (0, 1))
    with pytest.raises(IndexOutOfRange):
        MinorIndex((), ())
    with pytest.raises(IndexOutOfRange):
        minor_value(np.eye(3), MinorIndex((0, 3), (0, 1)))


def test_derivative_matches_fd_and_is_linear(bricard, rng):
    idx = MinorIndex((0, 3, 6, 9, 10), (1, 4, 7, 9, 16))
    u, w = rng.normal(size=(2, 6, 3))
    a = minor_directional_derivative(bricard, u, idx)
    assert a == pytest.approx(fd_minor_derivative(bricard, u, idx), rel=1e-6)
    b = minor_directional_derivative(bricard, w, idx)
    assert minor_directional_derivative(bricard, 2 * u - 0.5 * w, idx) == pytest.approx(2 * a - 0.5 * b, rel=1e-10)


def test_rank_profile(tetra, q, bricard, octa):
    for p, rank in ((tetra, 6), (q, 8), (bricard, 11), (octa, 12)):
        r, s = rank_profile(rigidity_matrix(p))
        assert r == rank
        assert minimal_vanishing_size(rigidity_matrix(p)) == rank + 1
    assert rank_profile(np.zeros((2, 2)))[0] == 0


def test_minor_count():
    assert minor_count(9, 15, 8) == 57915
    assert minor_count(12, 18, 12) == math.comb(18, 12)


def test_translation_flex_leaves_minors_stationary(q):
    t = np.tile([0.2, -1.0, 3.0], (5, 1))
    rep = minor_stationarity_report(q, t, k=4, strategy="sampled", samples=5000, seed=3)
    assert rep.all_derivatives_vanish
    assert rep.max_abs_derivative == 0.0


def test_bricard_tangent_keeps_large_minors_stationary(bricard, bricard_tangent):
    # rank 11: every 12 x 12 minor vanishes, and so does its derivative along the genuine flex
    rep = minor_stationarity_report(bricard, bricard_tangent, k=12)
    assert rep.count == math.comb(18, 12)
    assert rep.all_values_vanish and rep.all_derivatives_vanish


def test_bipyramid_apex_lift_size9(q, v5):
    rep = minor_stationarity_report(q, v5, k=9)
    assert rep.all_values_vanish
    assert not rep.all_derivatives_vanish
    off = rep.derivative_offenders[0]
    assert off.derivative == pytest.approx(minor_directional_derivative(q, v5, off.index), rel=1e-12)
    assert off.derivative == pytest.approx(fd_minor_derivative(q, v5, off.index), rel=1e-5)


def test_sampling_reproducible(bricard, bricard_tangent):
    a = minor_stationarity_report(bricard, bricard_tangent, k=6, strategy="sampled", samples=2000, seed=7)
    b = minor_stationarity_report(bricard, bricard_tangent, k=6, strategy="sampled", samples=2000, seed=7)
    assert a.to_json() == b.to_json()
    assert a.seed == 7 and a.count == 2000
    c = minor_stationarity_report(bricard, bricard_tangent, k=6, strategy="sampled", samples=2000, seed=8)
    assert c.max_abs_value != a.max_abs_value


def test_enumeration_cap(bricard, bricard_tangent):
    with pytest.raises(EnumerationTooLarge):
        minor_stationarity_report(bricard, bricard_tangent, k=6, cap=1000)
    with pytest.raises(IndexOutOfRange):
        minor_stationarity_report(bricard, bricard_tangent, k=13)
    with pytest.raises(ValueError):
        minor_stationarity_report(bricard, bricard_tangent, k=3, strategy="bogus")


def test_report_json_truncates(q, v5):
    rep = minor_stationarity_report(q, v5, k=8)
    doc = json.loads(json.dumps(rep.to_json()))
    assert doc["k"] == 8 and doc["count"] == 57915 and doc["seed"] is None
    assert doc["all_derivatives_vanish"] is False
    assert len(doc["offenders"]) <= 100 < doc["derivative_offenders"]
    assert len(rep.to_json(limit=3)["offenders"]) == 3


def test_rdot_is_rigidity_of_velocities(q, v5):
    # along p + t v the matrix changes at the rate given by the matrix of v
    h = 1e-3
    plus = rigidity_rows(q.vertices + h * v5, q.edges)
    minus = rigidity_rows(q.vertices - h * v5, q.edges)
    np.testing.assert_allclose((plus - minus) / (2 * h), rigidity_rows(v5, q.edges), atol=1e-10)
