import numpy as np
import pytest

from defkrylov import (DeflationBasis, Grid, Partition, PermeabilityField,
                       levelset_partition, load_partition, make_layered_field,
                       manual_layers, partition_to_basis, pdgmres,
                       save_partition, subdomain_levelset_partition,
                       subdomain_partition)


def labels_equivalent(a, b):
    """True when two labelings agree up to a bijective renaming."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    fwd, bwd = {}, {}
    for x, y in zip(a.tolist(), b.tolist()):
        if fwd.setdefault(x, y) != y or bwd.setdefault(y, x) != x:
            return False
    return True


def l_shape_field():
    """4x4x1 plane with a high-permeability L along the west and south edges."""
    g = Grid(4, 4, 1)
    k = np.ones(16)
    mask = np.zeros((4, 4), dtype=bool)
    mask[:, 0] = True    # west column
    mask[0, :] = True    # south row
    k[mask.ravel()] = 1e3
    return PermeabilityField(g, k, k.copy(), k.copy())


class TestPartitionType:
    def test_rejects_gap_in_label_ids(self):
        with pytest.raises(ValueError):
            Partition(np.array([0, 2, 2]), 3, "manual")

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Partition(np.array([0, 1, 5]), 3, "manual")


class TestSubdomain:
    def test_quadrants(self):
        g = Grid(4, 4, 1)
        p = subdomain_partition(g, 2, 2, 1)
        assert p.d == 4
        lab = p.labels.reshape(4, 4)
        assert len(np.unique(lab[:2, :2])) == 1
        assert len(np.unique(lab[2:, 2:])) == 1

    def test_remainder_goes_to_leading_blocks(self):
        g = Grid(5, 1, 1)
        p = subdomain_partition(g, 2, 1, 1)
        counts = np.bincount(p.labels)
        assert sorted(counts.tolist()) == [2, 3]
        assert counts[0] == 3  # leading block absorbs the remainder

    def test_full_split_is_identity_partition(self):
        g = Grid(3, 1, 1)
        p = subdomain_partition(g, 3, 1, 1)
        np.testing.assert_array_equal(p.labels, [0, 1, 2])

    def test_rejects_oversplit(self):
        with pytest.raises(ValueError):
            subdomain_partition(Grid(2, 2, 1), 3, 1, 1)


class TestLevelset:
    def test_sandwich_gives_exact_layers(self, sandwich_1e6):
        _, field = sandwich_1e6
        p = levelset_partition(field)
        assert p.d == 3
        g = field.grid
        lab = p.labels.reshape(g.nz, g.ny, g.nx)
        for z in range(3):
            assert len(np.unique(lab[z])) == 1
        assert len(np.unique(lab[:, 0, 0])) == 3

    def test_l_shape_gives_two_regions(self):
        p = levelset_partition(l_shape_field())
        assert p.d == 2

    def test_threshold_separates_only_large_jumps(self):
        g = Grid(2, 1, 2)
        k = np.array([1.0, 1.0, 10.0, 10.0])  # single decade jump
        f = PermeabilityField(g, k, k.copy(), k.copy())
        assert levelset_partition(f, jump_threshold=2.0).d == 1
        assert levelset_partition(f, jump_threshold=0.5).d == 2

    def test_zero_band_excluded_by_default(self):
        g = Grid(2, 1, 2)
        k = np.array([0.0, 0.0, 1.0, 1.0])
        f = PermeabilityField(g, k, k.copy(), k.copy())
        p = levelset_partition(f)
        assert p.d == 2
        assert len(p.default_exclude) == 1
        basis = partition_to_basis(p)
        assert basis.d == 1

    def test_invalid_threshold(self, sandwich_1e6):
        _, field = sandwich_1e6
        with pytest.raises(ValueError):
            levelset_partition(field, jump_threshold=0.0)


class TestComposition:
    def test_one_box_reduces_to_levelset(self, sandwich_1e6):
        _, field = sandwich_1e6
        pl = levelset_partition(field)
        pc = subdomain_levelset_partition(field, 1, 1, 1)
        assert pc.d == pl.d
        assert labels_equivalent(pc.labels, pl.labels)

    def test_homogeneous_reduces_to_subdomain(self):
        g = Grid(4, 4, 2)
        f = make_layered_field(g, [((0, 2), 1.0)])
        ps = subdomain_partition(g, 2, 2, 1)
        pc = subdomain_levelset_partition(f, 2, 2, 1)
        assert pc.d == ps.d
        assert labels_equivalent(pc.labels, ps.labels)

    def test_vectors_confined_to_boxes(self, sandwich_1e6):
        _, field = sandwich_1e6
        g = field.grid
        pc = subdomain_levelset_partition(field, 2, 1, 1)
        boxes = subdomain_partition(g, 2, 1, 1)
        for l in range(pc.d):
            in_region = pc.labels == l
            assert len(np.unique(boxes.labels[in_region])) == 1


class TestManualLayers:
    def test_ranges_label_in_given_order(self):
        g = Grid(2, 2, 4)
        p = manual_layers(g, [(2, 3), (0, 1)])
        lab = p.labels.reshape(4, 4)
        assert np.all(lab[2] == 0)
        assert np.all(lab[0] == 1)

    def test_remainder_excluded_by_default(self):
        g = Grid(2, 2, 4)
        p = manual_layers(g, [(0, 1), (2, 3)])
        assert p.d == 3
        basis = partition_to_basis(p)
        assert basis.d == 2

    def test_full_cover_has_no_remainder(self):
        g = Grid(2, 2, 2)
        p = manual_layers(g, [(0, 1), (1, 2)])
        assert p.d == 2
        assert not p.default_exclude

    def test_overlap_rejected(self):
        g = Grid(2, 2, 4)
        with pytest.raises(ValueError):
            manual_layers(g, [(0, 2), (1, 3)])

    def test_out_of_range_rejected(self):
        g = Grid(2, 2, 4)
        with pytest.raises(ValueError):
            manual_layers(g, [(0, 5)])


class TestBasisConstruction:
    def test_indicator_columns_orthogonal_with_region_counts(self, sandwich_1e6):
        _, field = sandwich_1e6
        p = levelset_partition(field)
        Z = partition_to_basis(p).Z
        gram = Z.T @ Z
        counts = np.bincount(p.labels)
        np.testing.assert_array_equal(gram, np.diag(counts))

    def test_explicit_exclusions_override_defaults(self):
        g = Grid(2, 2, 4)
        p = manual_layers(g, [(0, 1), (2, 3)])
        basis = partition_to_basis(p, exclude_labels=frozenset())
        assert basis.d == 3

    def test_excluding_everything_rejected(self):
        g = Grid(2, 2, 2)
        p = manual_layers(g, [(0, 2)])
        with pytest.raises(ValueError):
            partition_to_basis(p, exclude_labels={0})


class TestPdgmres:
    def test_all_ones_single_vector_sanity(self, sandwich_1e6):
        problem, _ = sandwich_1e6
        basis = DeflationBasis(np.ones((problem.A.n, 1)))
        rep = pdgmres(problem.A, problem.b, m=40, basis=basis, tol=1e-6,
                      max_iters=300)
        assert rep.converged

    def test_deflated_from_start(self, sandwich_1e6):
        problem, field = sandwich_1e6
        basis = partition_to_basis(levelset_partition(field))
        rep = pdgmres(problem.A, problem.b, m=20, basis=basis, tol=1e-6,
                      max_iters=300)
        assert rep.converged
        assert rep.deflated_from_cycle == 0
        assert rep.deflated_flags.all()

    def test_requires_basis(self, sandwich_1e6):
        problem, _ = sandwich_1e6
        with pytest.raises(ValueError):
            pdgmres(problem.A, problem.b)


class TestPartitionFiles:
    def test_roundtrip(self, tmp_path, sandwich_1e6):
        _, field = sandwich_1e6
        p = levelset_partition(field)
        path = tmp_path / "part.txt"
        save_partition(path, p)
        q = load_partition(path)
        np.testing.assert_array_equal(q.labels, p.labels)
        assert q.d == p.d
