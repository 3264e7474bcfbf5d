"""Tests for steering vectors, angular indices and the angular-domain forms."""

import math

import numpy as np
import pytest

from ssotfs_cli.phy.angular import (
    angular_comm_vector,
    angular_indices,
    angular_radar_matrix,
    angular_rx_vector,
    aoa_from_rx_index,
    aoa_from_tx_index,
    is_on_grid,
    lemma1_orthogonal,
    rx_to_tx_index,
    sin_grid,
    steering_vector,
)
from ssotfs_cli.utils.errors import InvalidInputError


class TestSteeringVector:
    def test_broadside(self):
        assert np.allclose(steering_vector(0.0, 4), 0.5 * np.ones(4))

    def test_endfire(self):
        assert np.allclose(steering_vector(math.pi / 2, 2), np.array([1, -1]) / math.sqrt(2))

    def test_unit_norm(self):
        assert np.linalg.norm(steering_vector(0.37, 128)) == pytest.approx(1.0)

    def test_pi_over_four_concentrates_near_84(self, dense):
        """De-spread transmit energy of phi = pi/4 peaks at antenna 84 of 128."""
        a = steering_vector(math.pi / 4, 128)
        energy = np.abs(a @ dense.unitary_dft(128).conj().T) ** 2
        assert int(np.argmax(energy)) + 1 == 84
        assert energy.sum() == pytest.approx(1.0)

    @pytest.mark.parametrize("phi", [2.0, -1.6, math.pi])
    def test_out_of_range(self, phi):
        with pytest.raises(InvalidInputError):
            steering_vector(phi, 8)


class TestAngularIndices:
    def test_broadside(self):
        indices = angular_indices(0.0, 8)
        assert (indices.a_tx, indices.a_rx) == (1, 1)
        assert indices.on_grid

    def test_pi_over_four(self):
        indices = angular_indices(math.pi / 4, 128)
        assert indices.a_tx == 84
        assert indices.a_rx == 46
        assert not indices.on_grid

    def test_sin_one_half_on_eight_antennas(self):
        """Direct evaluation: raw transmit index 7, raw receive index 3."""
        indices = angular_indices(math.asin(0.5), 8)
        assert indices.raw_tx == pytest.approx(7.0)
        assert indices.raw_rx == pytest.approx(3.0)
        assert (indices.a_tx, indices.a_rx) == (7, 3)
        assert indices.on_grid

    @pytest.mark.parametrize("a", range(1, 9))
    def test_tx_rx_relation_on_grid(self, a):
        """``a_rx - 1 = -(a_tx - 1) mod n_bs`` at every on-grid angle."""
        phi = aoa_from_tx_index(a, 8)
        indices = angular_indices(phi, 8)
        assert indices.a_tx == a
        assert indices.a_rx == rx_to_tx_index(a, 8)
        assert rx_to_tx_index(indices.a_rx, 8) == a

    def test_rx_index_inverts(self):
        phi = aoa_from_rx_index(46, 128)
        assert math.sin(phi) == pytest.approx(2 * 45 / 128)
        assert angular_indices(phi, 128).a_rx == 46

    def test_inverse_rejects_out_of_range(self):
        with pytest.raises(InvalidInputError):
            aoa_from_rx_index(0, 8)
        with pytest.raises(InvalidInputError):
            aoa_from_tx_index(9, 8)

    def test_sin_grid(self):
        assert np.allclose(sin_grid([1, 2, 5], 8), [0.0, -0.25, -1.0])
        assert np.allclose(sin_grid(8, 8), [0.25])

    def test_is_on_grid(self):
        assert is_on_grid(math.asin(0.25), 8)
        assert not is_on_grid(0.1, 8)


class TestAngularCommVector:
    @pytest.mark.parametrize("a", [1, 3, 6])
    def test_on_grid_single_entry(self, a):
        alpha = np.linspace(0.1, 0.8, 8)
        h = angular_comm_vector(aoa_from_tx_index(a, 8), 8, alpha)
        expected = np.zeros(8)
        expected[a - 1] = math.sqrt(alpha[a - 1])
        assert np.allclose(h, expected, atol=1e-10)

    def test_broadside(self):
        h = angular_comm_vector(0.0, 16, 0.25)
        assert h[0] == pytest.approx(0.5)
        assert np.allclose(h[1:], 0.0, atol=1e-10)

    def test_matches_dense_off_grid(self, dense):
        phi, n_bs = math.pi / 4, 128
        expected = steering_vector(phi, n_bs) @ dense.unitary_dft(n_bs).conj().T
        assert np.allclose(angular_comm_vector(phi, n_bs, 1.0), expected, atol=1e-10)

    def test_rx_vector_matches_dense(self, dense):
        phi, n_bs = 0.3, 16
        expected = dense.unitary_dft(n_bs) @ steering_vector(phi, n_bs)
        assert np.allclose(angular_rx_vector(phi, n_bs), expected, atol=1e-10)

    def test_negative_power_rejected(self):
        with pytest.raises(InvalidInputError):
            angular_comm_vector(0.0, 4, [-1.0, 0, 0, 0])


class TestAngularRadarMatrix:
    def test_on_grid_single_entry(self):
        n_bs, a = 8, 3
        alpha = np.full(n_bs, 0.125)
        H = angular_radar_matrix(aoa_from_tx_index(a, n_bs), n_bs, alpha)
        a_rx = rx_to_tx_index(a, n_bs)
        assert H[a_rx - 1, a - 1] == pytest.approx(math.sqrt(0.125))
        assert np.count_nonzero(np.abs(H) > 1e-10) == 1

    def test_pi_over_four_peak(self, dense):
        n_bs = 128
        phi = math.pi / 4
        alpha = np.ones(n_bs)
        H = angular_radar_matrix(phi, n_bs, alpha)
        F = dense.unitary_dft(n_bs)
        a = steering_vector(phi, n_bs)
        expected = F @ np.outer(a, a) @ F.conj().T @ np.diag(np.sqrt(alpha))
        assert np.allclose(H, expected, atol=1e-10)
        row, col = np.unravel_index(np.argmax(np.abs(H)), H.shape)
        assert (row + 1, col + 1) == (46, 84)

    def test_zero_power(self):
        assert np.allclose(angular_radar_matrix(0.4, 8, np.zeros(8)), 0.0)


class TestPathSeparability:
    def test_distinct_on_grid_angles_are_orthogonal(self):
        phis = [aoa_from_tx_index(a, 16) for a in (1, 4, 9, 13)]
        assert lemma1_orthogonal(phis, 16)

    def test_close_off_grid_angles_are_not(self):
        assert not lemma1_orthogonal([0.1, 0.12], 16)

    def test_single_angle(self):
        assert lemma1_orthogonal([0.2], 8)


N_BS_VALUES = [8, 16, 32, 64, 128]


class TestRandomAngles:
    """Closed forms against their definitions over many antenna counts."""

    @pytest.mark.parametrize("n_bs", N_BS_VALUES)
    def test_on_grid_angles_occupy_one_entry(self, n_bs):
        rng = np.random.default_rng(n_bs)
        for _ in range(40):
            a_tx = int(rng.integers(1, n_bs + 1))
            alpha = rng.uniform(0.1, 1.0, n_bs)
            phi = aoa_from_tx_index(a_tx, n_bs)
            a_rx = angular_indices(phi, n_bs).a_rx

            h = angular_comm_vector(phi, n_bs, alpha)
            assert h[a_tx - 1] == pytest.approx(math.sqrt(alpha[a_tx - 1]), abs=1e-10)
            assert np.count_nonzero(np.abs(h) > 1e-10) == 1

            H = angular_radar_matrix(phi, n_bs, alpha)
            assert H[a_rx - 1, a_tx - 1] == pytest.approx(math.sqrt(alpha[a_tx - 1]), abs=1e-10)
            assert np.count_nonzero(np.abs(H) > 1e-10) == 1

    @pytest.mark.parametrize("n_bs", N_BS_VALUES)
    def test_off_grid_angles_match_dense(self, n_bs, dense):
        rng = np.random.default_rng(1000 + n_bs)
        F = dense.unitary_dft(n_bs)
        for phi in rng.uniform(-1.5, 1.5, 20):
            alpha = rng.uniform(0.1, 1.0, n_bs)
            a = steering_vector(phi, n_bs)
            expected_h = (a @ F.conj().T) * np.sqrt(alpha)
            expected_H = F @ np.outer(a, a) @ F.conj().T @ np.diag(np.sqrt(alpha))
            assert np.allclose(angular_comm_vector(phi, n_bs, alpha), expected_h, atol=1e-9)
            assert np.allclose(angular_radar_matrix(phi, n_bs, alpha), expected_H, atol=1e-9)

    @pytest.mark.parametrize("n_bs", N_BS_VALUES)
    def test_distinct_on_grid_paths_are_separable(self, n_bs):
        rng = np.random.default_rng(2000 + n_bs)
        indices = rng.choice(np.arange(1, n_bs + 1), 4, replace=False)
        assert lemma1_orthogonal([aoa_from_tx_index(int(a), n_bs) for a in indices], n_bs)
