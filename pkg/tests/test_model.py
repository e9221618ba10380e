import numpy as np
import pytest

from prepblock.construct import egd_design, linked_block
from prepblock.model import (
    BlockDesign,
    DesignError,
    FullDesignSpec,
    dual,
    format_blocks,
    full_design,
    incidence,
    info_C,
    info_Ctilde,
    is_connected,
    normalize_labels,
    parse_blocks,
    read_blocks,
    require_valid,
    validate,
    write_blocks,
)
from prepblock.oracle import random_spec
from prepblock.reports import load_fixture


class TestBlockDesign:
    def test_blocks_are_sorted_multisets(self):
        d = BlockDesign([[3, 1, 1], [2]])
        assert d.blocks == ((1, 1, 3), (2,))
        assert d.replications == {1: 2, 2: 1, 3: 1}
        assert not d.is_binary

    def test_rejects_empty_block(self):
        with pytest.raises(DesignError):
            BlockDesign([[1, 2], []])

    def test_rejects_bad_labels(self):
        with pytest.raises(DesignError):
            BlockDesign([[0, 1]])

    def test_sizes(self):
        d = load_fixture("example2a")
        assert d.block_sizes == (4, 4, 5, 5, 4, 4)
        assert d.k_max == 5
        assert not d.constant_block_size


class TestIncidence:
    def test_pair(self):
        np.testing.assert_array_equal(incidence(BlockDesign([[1, 2], [1, 2]])), [[1, 1], [1, 1]])

    def test_multiplicity(self):
        np.testing.assert_array_equal(incidence(BlockDesign([[1, 1]])), [[2]])

    def test_linked_block_margins(self):
        n = incidence(linked_block(1, 3))
        np.testing.assert_array_equal(n.sum(axis=1), 2)
        np.testing.assert_array_equal(n.sum(axis=0), 2)


class TestDual:
    def test_self_dual_pair(self):
        assert dual(BlockDesign([[1, 2], [1, 2]])).blocks == ((1, 2), (1, 2))

    def test_dual_of_linked_is_bibd(self):
        assert sorted(dual(linked_block(1, 3)).blocks) == [(1, 2), (1, 3), (2, 3)]

    def test_transposes_incidence(self, fixture_design):
        d = normalize_labels(fixture_design)
        np.testing.assert_array_equal(incidence(dual(d)), incidence(d).T)

    def test_involution(self, fixture_design):
        d = normalize_labels(fixture_design)
        np.testing.assert_array_equal(incidence(dual(dual(d))), incidence(d))

    def test_example4a_dual_shape(self):
        g = dual(load_fixture("example4a_r19dual"))
        assert g.num_blocks == 18 and g.num_treatments == 6
        assert set(g.block_sizes) == {2}


class TestConnectivity:
    def test_examples(self):
        assert is_connected(BlockDesign([[1, 2], [2, 3]]))
        assert not is_connected(BlockDesign([[1, 2], [3, 4]]))
        assert is_connected(dual(egd_design((2, 2, 3))))


class TestValidate:
    def test_linked_1_3(self):
        rep = validate(FullDesignSpec(linked_block(1, 3), 3))
        assert rep.valid
        assert (rep.u, rep.b, rep.w) == (3, 3, 3)
        assert rep.s == (1, 1, 1)

    def test_no_single_treatments(self):
        rep = validate(FullDesignSpec(linked_block(1, 3), 2))
        assert not rep.valid
        assert any("w = bk - 2u" in e for e in rep.errors)

    def test_example4b(self):
        rep = validate(FullDesignSpec(load_fixture("example4b"), 6))
        assert rep.valid and (rep.u, rep.b, rep.w) == (20, 8, 8)
        assert rep.s == (1,) * 8

    def test_reports_every_violation(self):
        d = BlockDesign([[1, 2, 3], [4, 5]])
        rep = validate(FullDesignSpec(d, 2))
        text = " ".join(rep.errors)
        assert "double replication" in text
        assert "s_j >= 0" in text
        assert "not connected" in text
        with pytest.raises(DesignError):
            require_valid(FullDesignSpec(d, 2))


class TestInfoMatrices:
    @pytest.mark.parametrize("lam,b,k", [(1, 3, 3), (2, 4, 9), (1, 6, 7), (3, 5, 14)])
    def test_linked_ctilde(self, lam, b, k):
        ct = info_Ctilde(FullDesignSpec(linked_block(lam, b), k))
        np.testing.assert_allclose(ct, lam * b / 2 * (np.eye(b) - np.ones((b, b)) / b), atol=1e-10)

    def test_linked_c_spectrum(self):
        w = np.linalg.eigvalsh(info_C(FullDesignSpec(linked_block(1, 3), 3)))
        np.testing.assert_allclose(w, [0.0, 1.5, 1.5], atol=1e-12)

    def test_null_vectors(self, rng):
        for _ in range(50):
            spec = random_spec(rng)
            np.testing.assert_allclose(info_C(spec).sum(axis=1), 0.0, atol=1e-10)
            np.testing.assert_allclose(info_Ctilde(spec).sum(axis=1), 0.0, atol=1e-10)

    def test_trace_bounds_and_rank(self, rng):
        for _ in range(100):
            spec = random_spec(rng)
            assert np.trace(info_C(spec)) <= 2 * spec.u - spec.b + 1e-10
            ct = info_Ctilde(spec)
            tr = np.trace(ct)
            if spec.sub.is_binary:
                assert tr == pytest.approx(spec.u)
            else:
                assert tr < spec.u
            assert np.linalg.matrix_rank(ct, tol=1e-9) == spec.b - 1

    def test_invalid_spec_raises(self):
        with pytest.raises(DesignError):
            info_C(FullDesignSpec(linked_block(1, 3), 2))


class TestFullDesign:
    def test_linked_1_3(self):
        d0 = full_design(FullDesignSpec(linked_block(1, 3), 3))
        assert d0.blocks == ((1, 2, 4), (1, 3, 5), (2, 3, 6))

    def test_example2c(self):
        spec = FullDesignSpec(load_fixture("example2c"), 5)
        d0 = full_design(spec)
        assert d0.block_sizes == (5, 5, 5, 5)
        assert spec.w == 4

    def test_replication_pattern(self, rng):
        for _ in range(30):
            spec = random_spec(rng)
            d0 = full_design(spec)
            reps = [d0.replications[t] for t in range(1, spec.v + 1)]
            assert reps == [2] * spec.u + [1] * spec.w
            assert set(d0.block_sizes) == {spec.k}
            assert is_connected(d0)


class TestBlocksFormat:
    def test_round_trip(self, tmp_path, fixture_design):
        path = tmp_path / "d.blocks"
        write_blocks(fixture_design, path, header=["round trip"])
        assert read_blocks(path, normalize=False) == fixture_design

    def test_comments_and_multiplicity(self):
        d = parse_blocks("# header\n1 1 2  # loop\n\n2 3\n")
        assert d.blocks == ((1, 1, 2), (2, 3))

    def test_normalization_first_occurrence(self):
        d = parse_blocks("10 30\n30 20\n")
        assert d.blocks == ((1, 2), (2, 3))

    def test_already_normal_labels_kept(self):
        d = parse_blocks("3 1\n2 3\n1 2\n")
        assert d.blocks == ((1, 3), (2, 3), (1, 2))

    def test_bad_token(self):
        with pytest.raises(DesignError):
            parse_blocks("1 x\n")

    def test_format(self):
        assert format_blocks(BlockDesign([[1, 2]]), ["h"]) == "# h\n1 2\n"
