import numpy as np
import pytest

from lotset.errors import NonOrthonormalBasis, ShapeMismatch
from lotset.numerics import numerical_rank, project_residual, svd


def test_svd_identity():
    result = svd(np.eye(3))
    assert np.allclose(result.singular_values, [1.0, 1.0, 1.0])


def test_svd_rank_one_outer_product():
    u = np.array([2.0, 0.0, 0.0])
    v = np.array([0.0, 3.0])
    result = svd(np.outer(u, v))
    assert abs(result.singular_values[0] - 6.0) < 1e-12
    assert abs(result.singular_values[1]) < 1e-12


def test_svd_contracts_random():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(10, 6))
    res = svd(a)
    recon = res.left_vectors @ np.diag(res.singular_values) @ res.right_vectors.T
    fro = np.linalg.norm(a, "fro")
    assert np.linalg.norm(a - recon, "fro") <= 1e-10 * max(1.0, fro)
    assert np.abs(res.left_vectors.T @ res.left_vectors - np.eye(6)).max() <= 1e-10
    assert np.abs(res.right_vectors.T @ res.right_vectors - np.eye(6)).max() <= 1e-10
    assert np.all(np.diff(res.singular_values) <= 0)
    assert np.all(res.singular_values >= 0)


def test_numerical_rank_zeroes_tail():
    s = np.array([1.0, 1e-20, 0.0])
    assert numerical_rank(s, 3, 3) == 1


def _orthonormal(rng, n, m):
    q, _ = np.linalg.qr(rng.normal(size=(n, m)))
    return q


def test_residual_basis_column_is_zero():
    rng = np.random.default_rng(4)
    b = _orthonormal(rng, 8, 3)
    assert project_residual(b[:, 0], b) < 1e-12


def test_residual_orthogonal_vector_is_norm():
    rng = np.random.default_rng(5)
    q = _orthonormal(rng, 8, 4)
    b, x = q[:, :3], q[:, 3] * 2.5
    assert abs(project_residual(x, b) - float(x @ x)) < 1e-10


def test_residual_constructed_decomposition():
    # x = B c + r with r orthogonal to span(B), built by Gram-Schmidt
    rng = np.random.default_rng(6)
    for _ in range(10):
        b = _orthonormal(rng, 12, 4)
        c = rng.normal(size=4)
        r = rng.normal(size=12)
        r = r - b @ (b.T @ r)  # orthogonalize
        r = r - b @ (b.T @ r)  # twice, for safety
        x = b @ c + r
        assert abs(project_residual(x, b) - float(r @ r)) < 1e-9 * max(1.0, float(x @ x))


def test_residual_idempotent():
    rng = np.random.default_rng(7)
    b = _orthonormal(rng, 10, 3)
    x = rng.normal(size=10)
    r1 = project_residual(x, b)
    reduced = x - b @ (b.T @ x)
    r2 = project_residual(reduced, b)
    assert abs(r1 - r2) <= 1e-9 * max(1.0, r1)


def test_residual_bounded_by_norm():
    rng = np.random.default_rng(8)
    for _ in range(20):
        b = _orthonormal(rng, 9, 4)
        x = rng.normal(size=9)
        res = project_residual(x, b)
        assert res <= float(x @ x) + 1e-12


def test_residual_rejects_non_orthonormal():
    with pytest.raises(NonOrthonormalBasis):
        project_residual(np.ones(3), np.ones((3, 2)))


def test_residual_rejects_shape_mismatch():
    rng = np.random.default_rng(9)
    b = _orthonormal(rng, 6, 2)
    with pytest.raises(ShapeMismatch):
        project_residual(np.ones(5), b)
