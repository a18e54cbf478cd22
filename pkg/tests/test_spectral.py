import numpy as np
import pytest

from defkrylov import (SparseMatrix, spectrum, subspace_angle,
                       write_spectrum_csv)


class TestSpectrum:
    def test_matches_numpy_oracle(self):
        rng = np.random.default_rng(0)
        Ad = rng.standard_normal((15, 15))
        rep = spectrum(SparseMatrix.from_dense(Ad))
        got = np.sort_complex(rep.eigenvalues)
        want = np.sort_complex(np.linalg.eigvals(Ad))
        np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-12)

    def test_sorted_by_magnitude(self):
        rep = spectrum(SparseMatrix.from_dense(np.diag([5.0, 1.0, -3.0])))
        mags = np.abs(rep.eigenvalues)
        assert np.all(np.diff(mags) >= 0)

    def test_small_count_and_gap(self):
        rep = spectrum(SparseMatrix.from_dense(np.diag([1e-6, 2e-6, 1.0, 2.0])),
                       cutoff=1e-5)
        assert rep.n_small == 2
        assert rep.gap_ratio == pytest.approx(1.0 / 2e-6)

    def test_no_gap_when_no_split(self):
        rep = spectrum(SparseMatrix.identity(3), cutoff=0.0)
        assert rep.n_small == 0
        assert rep.gap_ratio is None

    def test_dimension_cap(self):
        big = SparseMatrix.identity(4001)
        with pytest.raises(ValueError):
            spectrum(big)


class TestSubspaceAngle:
    def test_parallel_is_one(self):
        v = np.array([1.0, 2.0, 3.0])
        assert subspace_angle(v, -2.0 * v) == pytest.approx(1.0)

    def test_orthogonal_is_zero(self):
        assert subspace_angle([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            subspace_angle([0.0, 0.0], [1.0, 0.0])

    def test_clipped_to_unit_interval(self):
        v = np.ones(4)
        assert subspace_angle(v, v) <= 1.0


class TestCsv:
    def test_schema_and_determinism(self, tmp_path):
        rng = np.random.default_rng(1)
        A = SparseMatrix.from_dense(rng.standard_normal((8, 8)))
        rep = spectrum(A)
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        write_spectrum_csv(p1, rep)
        write_spectrum_csv(p2, rep)
        text = p1.read_text()
        assert text == p2.read_text()
        lines = text.strip().splitlines()
        assert lines[0] == "index,re,im,abs"
        assert len(lines) == 9
        i, re, im, mag = lines[1].split(",")
        assert complex(float(re), float(im)) == rep.eigenvalues[0]
        assert float(mag) == pytest.approx(abs(rep.eigenvalues[0]))
