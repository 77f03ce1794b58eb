import itertools

import numpy as np
import pytest

from psicomplete.constructions import (
    TETRAHEDRON,
    THETA_TETRA,
    TRINE,
    RankOneConstructionParams,
    TwoDConstructionParams,
    amalgamate_last_pair,
    build_complementary_bases,
    build_psic_2d,
    build_rank_one_3dm2,
    build_rank_one_states,
    build_tetrahedral,
    build_trine,
    normalize_elements,
    rank_one_frame_operator,
    rank_one_raw_elements,
    subspace_pauli,
)
from psicomplete.errors import (
    IndexOutOfRange,
    IndicesEqual,
    InvalidParameter,
    SingularFrame,
    ThrowawayNotPositive,
)
from psicomplete.linalg import HermitianOperator, eig_hermitian, rank
from psicomplete.objects import bloch_of_state

THETAS = [0.3, 1.0, np.pi / 2, THETA_TETRA, 2.8]


class TestSubspacePauli:
    def test_sigma_x(self):
        np.testing.assert_array_equal(subspace_pauli(2, 0, 1, "X").matrix, [[0, 1], [1, 0]])

    def test_z_embedding(self):
        np.testing.assert_array_equal(subspace_pauli(3, 0, 2, "Z").matrix, np.diag([1, 0, -1]))

    @pytest.mark.parametrize("dim,j,k", [(2, 0, 1), (4, 1, 3), (5, 0, 4)])
    def test_algebra(self, dim, j, k):
        p = subspace_pauli(dim, j, k, "P").matrix
        for which in "XYZ":
            m = subspace_pauli(dim, j, k, which).matrix
            assert abs(np.trace(m)) < 1e-15
            np.testing.assert_allclose(m @ m, p, atol=1e-15)
            lam = eig_hermitian(m).eigenvalues
            np.testing.assert_allclose(lam, [-1] + [0] * (dim - 2) + [1], atol=1e-14)

    def test_y_sign(self):
        y = subspace_pauli(2, 0, 1, "Y").matrix
        np.testing.assert_array_equal(y, [[0, -1j], [1j, 0]])

    def test_errors(self):
        with pytest.raises(IndexOutOfRange):
            subspace_pauli(3, 0, 3, "X")
        with pytest.raises(IndicesEqual):
            subspace_pauli(3, 1, 1, "X")


class TestPsic2d:
    def test_d2_quarter_weights(self):
        povm = build_psic_2d(TwoDConstructionParams(2, 0.25, 0.25))
        assert len(povm) == 4
        sx = np.array([[0, 1], [1, 0]])
        sy = np.array([[0, -1j], [1j, 0]])
        np.testing.assert_allclose(povm["x,1"].matrix, 0.25 * (np.eye(2) + sx))
        t = np.eye(2) - 0.25 * np.diag([1, 0]) - 0.25 * (2 * np.eye(2) + sx + sy)
        np.testing.assert_allclose(povm["T"].matrix, t, atol=1e-15)
        # oracle: 2x2 eigenvalues from trace and determinant
        tr, det = np.trace(t).real, np.linalg.det(t).real
        disc = np.sqrt(tr**2 - 4 * det)
        oracle = sorted([(tr - disc) / 2, (tr + disc) / 2])
        np.testing.assert_allclose(oracle, [0.0, 0.75], atol=1e-12)
        assert oracle[0] >= -1e-10

    def test_d3_too_large(self):
        # oracle: assemble T directly and look at its spectrum
        d, a, b = 3, 0.4, 0.4
        t = np.eye(d) - a * np.diag([1, 0, 0])
        for j in (1, 2):
            for which in "XY":
                t = t - b * (np.eye(d) + subspace_pauli(d, 0, j, which).matrix)
        assert np.linalg.eigvalsh(t).min() < -1e-10
        with pytest.raises(ThrowawayNotPositive):
            build_psic_2d(TwoDConstructionParams(d, a, b))

    @pytest.mark.parametrize("dim", range(2, 17))
    def test_default_params(self, dim):
        povm = build_psic_2d(TwoDConstructionParams(dim))
        assert len(povm) == 2 * dim
        assert povm.labels[0] == "E0" and povm.labels[-1] == "T"
        assert povm.min_eigenvalues.min() >= -1e-10

    @pytest.mark.parametrize("dim", [2, 5, 9])
    @pytest.mark.parametrize("scale", [0.1, 0.5, 0.9, 1.0, 1.2])
    def test_weight_grid(self, dim, scale):
        a = b = scale / (4 * dim)
        povm = build_psic_2d(TwoDConstructionParams(dim, a, b))
        assert len(povm) == 2 * dim

    def test_invalid(self):
        with pytest.raises(InvalidParameter):
            TwoDConstructionParams(1)
        with pytest.raises(InvalidParameter):
            TwoDConstructionParams(3, a=-0.1)


class TestRankOneStates:
    def test_tetrahedral_bloch_vectors(self):
        states = build_rank_one_states(RankOneConstructionParams(2, THETA_TETRA), 0, 1)
        for psi, n in zip(states, TETRAHEDRON):
            np.testing.assert_allclose(bloch_of_state(psi).components, n, atol=1e-12)

    def test_right_angle(self):
        psi1 = build_rank_one_states(RankOneConstructionParams(3, np.pi / 2), 0, 2)[1]
        np.testing.assert_allclose(psi1.amplitudes, [1 / np.sqrt(2), 0, 1 / np.sqrt(2)], atol=1e-15)

    @pytest.mark.parametrize("theta", THETAS)
    def test_unit_norm_and_three_sum(self, theta):
        dim, j, k = 4, 1, 3
        states = build_rank_one_states(RankOneConstructionParams(dim, theta), j, k)
        for psi in states:
            assert psi.norm_squared == pytest.approx(1.0, abs=1e-15)
        total = sum(np.outer(s.amplitudes, s.amplitudes.conj()) for s in states[1:])
        expected = np.zeros((dim, dim))
        expected[j, j] = 3 * np.cos(theta / 2) ** 2
        expected[k, k] = 3 * np.sin(theta / 2) ** 2
        np.testing.assert_allclose(total, expected, atol=1e-12)

    def test_theta_range(self):
        for bad in (0.0, np.pi, -1.0):
            with pytest.raises(InvalidParameter):
                RankOneConstructionParams(3, bad)


def dressed_closed_form(dim, theta):
    """Final rank-one POVM written out element by element."""
    half = theta / 2
    w = np.exp(2j * np.pi * np.arange(3) / 3)
    ops = [np.sin(half) ** 2 * np.diag(np.eye(dim)[0])]
    for j in range(1, dim):
        for alpha in range(3):
            v = np.zeros(dim, dtype=complex)
            v[j - 1] = np.cos(half)
            v[j] = w[alpha] * (np.sin(half) if j < dim - 1 else 1.0)
            ops.append(np.outer(v, v.conj()) / 3)
    return ops


class TestRankOne3Dm2:
    def test_tetrahedral_degeneration(self):
        ours = build_rank_one_3dm2(RankOneConstructionParams(2, THETA_TETRA))
        tetra = build_tetrahedral()
        for e, f in zip(ours, tetra):
            np.testing.assert_allclose(e.matrix, f.matrix, atol=1e-12)

    @pytest.mark.parametrize("dim", range(2, 17))
    def test_count_and_rank_one(self, dim):
        povm = build_rank_one_3dm2(RankOneConstructionParams(dim))
        assert len(povm) == 3 * dim - 2
        assert all(rank(op, 1e-10) == 1 for op in povm)

    def test_d3_right_angle(self):
        povm = build_rank_one_3dm2(RankOneConstructionParams(3, np.pi / 2))
        assert len(povm) == 7
        assert np.linalg.norm(sum(op.matrix for op in povm) - np.eye(3)) < 1e-10

    @pytest.mark.parametrize("dim", range(2, 9))
    @pytest.mark.parametrize("theta", THETAS)
    def test_diagonal_frame_operator(self, dim, theta):
        params = RankOneConstructionParams.diagonal_frame_weights(dim, theta)
        g = rank_one_frame_operator(params).matrix
        expected = np.eye(dim)
        expected[-1, -1] -= np.cos(theta / 2) ** 2
        np.testing.assert_allclose(g, expected, atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 3, 4, 7])
    @pytest.mark.parametrize("theta", THETAS)
    def test_matches_closed_form(self, dim, theta):
        povm = build_rank_one_3dm2(RankOneConstructionParams.diagonal_frame_weights(dim, theta))
        for e, f in zip(povm, dressed_closed_form(dim, theta)):
            np.testing.assert_allclose(e.matrix, f, atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 5, 16])
    @pytest.mark.parametrize("theta", THETAS)
    def test_valid_for_many_settings(self, dim, theta):
        povm = build_rank_one_3dm2(RankOneConstructionParams(dim, theta))
        assert len(povm) == 3 * dim - 2


class TestQubitFamilies:
    def test_tetrahedral_sic(self):
        povm = build_tetrahedral()
        # oracle: tr(E_a E_b) = (1/8)(1 + n_a . n_b) with n_a . n_b = -1/3
        for a, b in itertools.combinations(range(4), 2):
            assert TETRAHEDRON[a] @ TETRAHEDRON[b] == pytest.approx(-1 / 3, abs=1e-15)
            overlap = np.trace(povm[a].matrix @ povm[b].matrix).real
            assert overlap == pytest.approx(1 / 12, abs=1e-15)
        assert np.linalg.norm(sum(op.matrix for op in povm) - np.eye(2)) < 1e-12

    def test_trine(self):
        np.testing.assert_allclose(TRINE.sum(axis=0), 0, atol=1e-15)
        assert len(build_trine()) == 3


class TestComplementaryBases:
    def test_d2(self):
        povm = build_complementary_bases(2)
        # f_1 = (-|e1> + |e2>)/sqrt2, f_2 = (|e1> + |e2>)/sqrt2 with phases e^{i pi jk}
        minus = np.array([-1, 1]) / np.sqrt(2)
        plus = np.array([1, 1]) / np.sqrt(2)
        np.testing.assert_allclose(povm["f1"].matrix, 0.5 * np.outer(minus, minus), atol=1e-15)
        np.testing.assert_allclose(povm["f2"].matrix, 0.5 * np.outer(plus, plus), atol=1e-15)

    @pytest.mark.parametrize("dim", range(2, 9))
    def test_unbiased(self, dim):
        povm = build_complementary_bases(dim)
        assert len(povm) == 2 * dim
        for j in range(1, dim + 1):
            for k in range(1, dim + 1):
                overlap = 4 * np.trace(povm[f"e{j}"].matrix @ povm[f"f{k}"].matrix).real
                assert overlap == pytest.approx(1 / dim, abs=1e-14)

    @pytest.mark.parametrize("dim", range(2, 9))
    def test_amalgamated(self, dim):
        povm = amalgamate_last_pair(build_complementary_bases(dim))
        assert len(povm) == 2 * dim - 1
        assert povm.labels[-1] == f"e{dim}+f{dim}"

    def test_amalgamate_wrong_input(self):
        with pytest.raises(InvalidParameter):
            amalgamate_last_pair(build_tetrahedral())


class TestNormalizeElements:
    def test_fixed_point(self):
        povm = build_tetrahedral()
        out, g = normalize_elements(list(povm), povm.labels)
        assert g.allclose(np.eye(2), atol=1e-15)
        for e, f in zip(out, povm):
            np.testing.assert_allclose(e.matrix, f.matrix, atol=1e-15)

    def test_scalar(self):
        out, _ = normalize_elements([HermitianOperator([[0.5]])])
        np.testing.assert_allclose(out[0].matrix, [[1.0]])

    @pytest.mark.parametrize("dim", [2, 3, 5])
    def test_raw_rank_one_elements(self, dim):
        params = RankOneConstructionParams.diagonal_frame_weights(dim, 1.1)
        out, _ = normalize_elements(rank_one_raw_elements(params))
        for e, f in zip(out, dressed_closed_form(dim, 1.1)):
            np.testing.assert_allclose(e.matrix, f, atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_rank_preserved(self, seed):
        rng = np.random.default_rng(seed)
        ops = []
        for r in (1, 1, 2, 3, 1, 1, 2):
            v = rng.standard_normal((4, r)) + 1j * rng.standard_normal((4, r))
            ops.append(HermitianOperator(v @ v.conj().T))
        out, _ = normalize_elements(ops)
        assert [rank(e, 1e-8) for e in out] == [rank(f, 1e-8) for f in ops]

    def test_singular_frame(self):
        with pytest.raises(SingularFrame):
            normalize_elements([HermitianOperator(np.diag([1.0, 0.0]))])
