import numpy as np
import pytest

from lap_oracle import brute_force_assignment, is_tied

from lotset import (
    PointSet,
    cost_matrix,
    lot_distance,
    lot_transform,
    permute_points,
    solve_lap,
    wasserstein2,
)
from lotset.errors import (
    CardinalityMismatch,
    DimensionMismatch,
    ReferenceMismatch,
    ShapeMismatch,
)
from lotset.transport import LotEmbedding


def test_cost_matrix_identical_pair():
    s = PointSet([[0.0, 0.0], [1.0, 0.0]])
    c = cost_matrix(s, s)
    assert c.tolist() == [[0.0, 1.0], [1.0, 0.0]]


def test_cost_matrix_345():
    c = cost_matrix(PointSet([[0.0, 0.0]]), PointSet([[3.0, 4.0]]))
    assert c.tolist() == [[25.0]]


def test_cost_matrix_matches_elementwise_formula():
    rng = np.random.default_rng(10)
    s = PointSet(rng.normal(size=(5, 3)))
    r = PointSet(rng.normal(size=(5, 3)))
    c = cost_matrix(s, r)
    for i in range(5):
        for j in range(5):
            direct = sum((s.points[i, d] - r.points[j, d]) ** 2 for d in range(3))
            assert abs(c[i, j] - direct) < 1e-14


def test_cost_matrix_shape_errors():
    with pytest.raises(CardinalityMismatch):
        cost_matrix(PointSet([[0.0]]), PointSet([[0.0], [1.0]]))
    with pytest.raises(DimensionMismatch):
        cost_matrix(PointSet([[0.0]]), PointSet([[0.0, 1.0]]))


def test_solve_lap_identity_on_zero_diagonal():
    s = PointSet([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    a = solve_lap(cost_matrix(s, s))
    assert a.perm.tolist() == [0, 1, 2]
    assert a.total_cost == 0.0


def test_solve_lap_two_point_example():
    s = PointSet([[0.0, 0.0], [3.0, 0.0]])
    r = PointSet([[1.0, 0.0], [0.0, 2.0]])
    a = solve_lap(cost_matrix(s, r))
    # pairing s1<->r1, s2<->r2 costs (1+13)/2 = 7; the crossing pairing costs (4+4)/2 = 4
    assert a.perm.tolist() == [1, 0]
    assert abs(a.total_cost - 4.0) < 1e-15


def test_solve_lap_matches_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(60):
        n = int(rng.integers(2, 8))
        c = rng.uniform(0.0, 10.0, (n, n))
        got = solve_lap(c)
        _, want = brute_force_assignment(c)
        assert abs(got.total_cost - want) <= 1e-12


def test_solve_lap_deterministic():
    rng = np.random.default_rng(12)
    c = rng.uniform(0.0, 5.0, (9, 9))
    a = solve_lap(c)
    b = solve_lap(c.copy())
    assert np.array_equal(a.perm, b.perm) and a.total_cost == b.total_cost


def test_wasserstein_identity_and_symmetry():
    rng = np.random.default_rng(13)
    s = PointSet(rng.normal(size=(6, 2)))
    r = PointSet(rng.normal(size=(6, 2)))
    assert wasserstein2(s, s) == 0.0
    assert abs(wasserstein2(s, r) - wasserstein2(r, s)) < 1e-12


def test_wasserstein_translation_is_squared_shift():
    rng = np.random.default_rng(14)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        s = PointSet(rng.normal(size=(n, 2)))
        b = rng.normal(size=2)
        r = PointSet(s.points + b)
        w = wasserstein2(s, r)
        assert abs(w - float(b @ b)) < 1e-10
        _, oracle = brute_force_assignment(cost_matrix(s, r))
        assert abs(w - oracle) < 1e-12


def test_lot_transform_self_is_identity():
    rng = np.random.default_rng(15)
    r = PointSet(rng.normal(size=(7, 3)))
    e = lot_transform(r, r)
    assert np.array_equal(e.matrix, r.points)


def test_lot_transform_two_point_example():
    s = PointSet([[0.0, 0.0], [3.0, 0.0]])
    r = PointSet([[1.0, 0.0], [0.0, 2.0]])
    e = lot_transform(s, r)
    assert e.matrix.tolist() == [[3.0, 0.0], [0.0, 0.0]]


def test_lot_transform_storage_order_invariant():
    rng = np.random.default_rng(16)
    s = PointSet(rng.normal(size=(6, 2)))
    r = PointSet(rng.normal(size=(6, 2)))
    base = lot_transform(s, r)
    for _ in range(5):
        shuffled = permute_points(s, rng.permutation(6))
        assert np.array_equal(lot_transform(shuffled, r).matrix, base.matrix)


def test_lot_transform_composition_scale_shift():
    rng = np.random.default_rng(17)
    checked = 0
    while checked < 25:
        s = PointSet(rng.normal(size=(5, 2)))
        r = PointSet(rng.normal(size=(5, 2)))
        a = float(rng.uniform(0.2, 5.0))
        b = rng.normal(size=2)
        deformed = PointSet(a * s.points + b)
        if is_tied(cost_matrix(s, r)) or is_tied(cost_matrix(deformed, r)):
            continue
        left = lot_transform(deformed, r).matrix
        right = a * lot_transform(s, r).matrix + b
        assert np.abs(left - right).max() < 1e-10
        checked += 1


def test_lot_distance_zero_and_shift():
    rng = np.random.default_rng(18)
    m = rng.normal(size=(6, 2))
    a = LotEmbedding(m, "ref")
    assert lot_distance(a, a) == 0.0
    c = np.array([0.3, -0.4])
    b = LotEmbedding(m + c, "ref")
    assert abs(lot_distance(a, b) - 0.5) < 1e-12


def test_lot_distance_reference_mismatch():
    m = np.zeros((2, 2))
    with pytest.raises(ReferenceMismatch):
        lot_distance(LotEmbedding(m, "x"), LotEmbedding(m, "y"))
    with pytest.raises(ShapeMismatch):
        lot_distance(LotEmbedding(m, "x"), LotEmbedding(np.zeros((3, 2)), "x"))


def test_lot_distance_upper_bounds_wasserstein():
    rng = np.random.default_rng(19)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        s = PointSet(rng.normal(size=(n, 2)))
        q = PointSet(rng.normal(size=(n, 2)))
        r = PointSet(rng.normal(size=(n, 2)))
        d = lot_distance(lot_transform(s, r), lot_transform(q, r))
        _, w2 = brute_force_assignment(cost_matrix(s, q))
        assert d * d >= w2 - 1e-10
