import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defkrylov import (EigNonConvergence, SingularCoarseMatrix, SparseMatrix,
                       dense_eig, dense_lu, lu_solve, spmv)


def random_sparse(rng, n, density=0.3):
    dense = rng.standard_normal((n, n))
    dense[rng.random((n, n)) > density] = 0.0
    np.fill_diagonal(dense, dense.diagonal() + n)  # keep it comfortably regular
    return SparseMatrix.from_dense(dense), dense


class TestConstruction:
    def test_from_dense_roundtrip(self):
        rng = np.random.default_rng(0)
        A, dense = random_sparse(rng, 12)
        np.testing.assert_array_equal(A.to_dense(), dense)

    def test_from_coo_sums_duplicates(self):
        A = SparseMatrix.from_coo(2, [0, 0, 1], [1, 1, 0], [2.0, 3.0, 1.0])
        np.testing.assert_array_equal(A.to_dense(), [[0.0, 5.0], [1.0, 0.0]])

    def test_from_coo_drops_explicit_zero_rows_nowhere(self):
        A = SparseMatrix.from_coo(3, [0, 2], [0, 2], [1.0, 4.0])
        assert A.n == 3
        assert A.to_dense()[1, 1] == 0.0

    def test_identity(self):
        I = SparseMatrix.identity(5)
        np.testing.assert_array_equal(I.to_dense(), np.eye(5))

    def test_rejects_unsorted_columns(self):
        with pytest.raises(ValueError):
            SparseMatrix(2, np.array([0, 2, 2]), np.array([1, 0]),
                         np.array([1.0, 2.0]))

    def test_rejects_out_of_range_column(self):
        with pytest.raises(ValueError):
            SparseMatrix.from_coo(2, [0], [5], [1.0])

    def test_diagonal(self):
        A = SparseMatrix.from_dense(np.array([[2.0, 1.0], [0.0, -3.0]]))
        np.testing.assert_array_equal(A.diagonal(), [2.0, -3.0])

    def test_scale_rows(self):
        A = SparseMatrix.from_dense(np.array([[2.0, 4.0], [1.0, 3.0]]))
        B = A.scale_rows(np.array([0.5, 2.0]))
        np.testing.assert_allclose(B.to_dense(), [[1.0, 2.0], [2.0, 6.0]])


class TestSpmv:
    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(1)
        A, dense = random_sparse(rng, 30)
        x = rng.standard_normal(30)
        np.testing.assert_allclose(spmv(A, x), dense @ x, rtol=1e-13)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=1, max_value=20), st.integers(0, 2**31))
    def test_linearity(self, n, seed):
        rng = np.random.default_rng(seed)
        A, _ = random_sparse(rng, n)
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        np.testing.assert_allclose(spmv(A, 2.0 * x + y),
                                   2.0 * spmv(A, x) + spmv(A, y),
                                   rtol=1e-12, atol=1e-12)

    def test_wrong_length(self):
        A = SparseMatrix.identity(3)
        with pytest.raises(ValueError):
            spmv(A, np.ones(4))


class TestDenseLU:
    def test_solve_matches_numpy(self):
        rng = np.random.default_rng(2)
        E = rng.standard_normal((6, 6)) + 6 * np.eye(6)
        rhs = rng.standard_normal(6)
        lu = dense_lu(E)
        np.testing.assert_allclose(lu_solve(lu, rhs), np.linalg.solve(E, rhs),
                                   rtol=1e-12)

    def test_singular_raises(self):
        E = np.zeros((3, 3))
        with pytest.raises(SingularCoarseMatrix):
            dense_lu(E)

    def test_rank_deficient_raises(self):
        E = np.outer(np.arange(1.0, 5.0), np.arange(1.0, 5.0))
        with pytest.raises(SingularCoarseMatrix):
            dense_lu(E)


class TestDenseEig:
    def test_eigenvalues_of_diagonal(self):
        w = dense_eig(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(sorted(w.real), [1.0, 2.0, 3.0])

    def test_vectors_satisfy_definition(self):
        rng = np.random.default_rng(3)
        A = rng.standard_normal((8, 8))
        w, V = dense_eig(A, vectors=True)
        np.testing.assert_allclose(A @ V, V @ np.diag(w), atol=1e-10)

    def test_nonfinite_raises(self):
        with pytest.raises(EigNonConvergence):
            dense_eig(np.array([[np.nan, 0.0], [0.0, 1.0]]))
