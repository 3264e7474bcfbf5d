"""Tests for the DD/TD transforms and the shift/phase operators."""

import numpy as np
import pytest

from ssotfs_cli.phy.otfs import (
    FrameParams,
    apply_delay_shift,
    apply_doppler_phase,
    dd_tap_response,
    dd_to_td,
    delay_doppler_operator,
    despread_antennas,
    spread_antennas,
    td_to_dd,
)
from ssotfs_cli.utils.errors import InvalidInputError


def _random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


class TestFrameParams:
    def test_defaults(self):
        params = FrameParams()
        assert (params.M, params.N, params.n_bs) == (32, 16, 128)
        assert params.T == pytest.approx(1 / 15e3)
        assert params.mn == 512

    def test_resolutions(self):
        params = FrameParams(M=4, N=2, n_bs=2, delta_f=1e3)
        assert params.delay_resolution == pytest.approx(1 / 4e3)
        assert params.doppler_resolution == pytest.approx(1e3 / 2)

    @pytest.mark.parametrize("kwargs", [{"M": 0}, {"N": -1}, {"n_bs": 2.5}, {"delta_f": 0}, {"alpha_total": 0}])
    def test_invalid_values_rejected(self, kwargs):
        with pytest.raises(InvalidInputError):
            FrameParams(**kwargs)


class TestTransforms:
    def test_zero_frame_maps_to_zero(self):
        params = FrameParams(M=2, N=2, n_bs=1)
        assert np.allclose(dd_to_td(np.zeros(4), params), 0)

    def test_impulse_is_flat_in_time(self):
        """Unitary IDFT of an impulse."""
        params = FrameParams(M=1, N=4, n_bs=1)
        x = np.array([1, 0, 0, 0], dtype=complex)
        assert np.allclose(dd_to_td(x, params), 0.5 * np.ones(4))
        assert np.allclose(td_to_dd(x, params), 0.5 * np.ones(4))

    def test_matches_kronecker_oracle(self, small_params, dense, rng):
        x = _random_complex(rng, small_params.mn)
        expected = dense.dd_to_td_matrix(small_params.M, small_params.N) @ x
        assert np.allclose(dd_to_td(x, small_params), expected, atol=1e-12)

        v = _random_complex(rng, small_params.mn)
        expected = dense.td_to_dd_matrix(small_params.M, small_params.N) @ v
        assert np.allclose(td_to_dd(v, small_params), expected, atol=1e-12)

    def test_round_trip(self, small_params, rng):
        x = _random_complex(rng, small_params.mn)
        assert np.allclose(td_to_dd(dd_to_td(x, small_params), small_params), x, atol=1e-12)

    def test_length_mismatch(self, small_params):
        with pytest.raises(InvalidInputError):
            dd_to_td(np.zeros(small_params.mn + 1), small_params)
        with pytest.raises(InvalidInputError):
            td_to_dd(np.zeros((4, 4)), small_params)


class TestShiftAndPhase:
    def test_forward_cyclic_shift(self):
        assert np.array_equal(apply_delay_shift(np.array([1, 2, 3, 4]), 1), [4, 1, 2, 3])

    def test_zero_and_negative_shift(self):
        v = np.arange(5)
        assert np.array_equal(apply_delay_shift(v, 0), v)
        assert np.array_equal(apply_delay_shift(v, -1), [1, 2, 3, 4, 0])

    def test_empty_vector_rejected(self):
        with pytest.raises(InvalidInputError):
            apply_delay_shift(np.array([]), 1)
        with pytest.raises(InvalidInputError):
            apply_doppler_phase(np.array([]), 1.0)

    def test_phase_identity_and_period(self, rng):
        v = _random_complex(rng, 8)
        assert np.allclose(apply_doppler_phase(v, 0.0), v)
        assert np.allclose(apply_doppler_phase(v, 8.0), v)

    def test_quarter_turns(self):
        out = apply_doppler_phase(np.ones(4, dtype=complex), 1.0)
        assert np.allclose(out, [1, 1j, -1, -1j])

    def test_shift_phase_commutation(self, rng):
        """``Delta^k Pi^d = gamma^{kd} Pi^d Delta^k`` for integer ``k``."""
        L, k, d = 12, 3, 5
        v = _random_complex(rng, L)
        left = apply_doppler_phase(apply_delay_shift(v, d), k)
        right = np.exp(2j * np.pi * k * d / L) * apply_delay_shift(apply_doppler_phase(v, k), d)
        assert np.allclose(left, right, atol=1e-12)


class TestDelayDopplerOperator:
    def test_matches_dense(self, dense, rng):
        L = 12
        op = delay_doppler_operator(3, 1.4, L, gain=0.5 - 0.2j)
        expected = dense.path_matrix(L, 3, 1.4, 0.5 - 0.2j)
        V = _random_complex(rng, L, 3)
        assert np.allclose(op @ V[:, 0], expected @ V[:, 0], atol=1e-12)
        assert np.allclose(op.matmat(V), expected @ V, atol=1e-12)

    def test_adjoint_matches_dense(self, dense, rng):
        L = 10
        op = delay_doppler_operator(2, -0.3, L, gain=1j)
        expected = dense.path_matrix(L, 2, -0.3, 1j).conj().T
        v = _random_complex(rng, L)
        assert np.allclose(op.H @ v, expected @ v, atol=1e-12)
        assert np.allclose(op.rmatvec(v), expected @ v, atol=1e-12)

    def test_non_positive_length(self):
        with pytest.raises(InvalidInputError):
            delay_doppler_operator(0, 0.0, 0)


class TestTapResponse:
    @pytest.mark.parametrize("l,k", [(0, 0), (1, 0), (0, 1), (3, 2), (5, 3), (9, 1)])
    def test_matches_dense_product(self, small_params, dense, rng, l, k):
        M, N, mn = small_params.M, small_params.N, small_params.mn
        x = _random_complex(rng, mn)
        H = dense.td_to_dd_matrix(M, N) @ dense.path_matrix(mn, l, k) @ dense.dd_to_td_matrix(M, N)
        assert np.allclose(dd_tap_response(x, l, k, small_params), H @ x, atol=1e-10)

    def test_one_nonzero_per_row(self, small_params, rng):
        x = np.zeros(small_params.mn, dtype=complex)
        x[5] = 1.0
        assert np.count_nonzero(np.abs(dd_tap_response(x, 2, 1, small_params)) > 1e-12) == 1

    def test_fractional_rejected(self, small_params):
        with pytest.raises(InvalidInputError):
            dd_tap_response(np.zeros(small_params.mn), 1, 0.5, small_params)


class TestAntennaSpreading:
    def test_round_trip(self, rng):
        Z = _random_complex(rng, 6, 8)
        assert np.allclose(despread_antennas(spread_antennas(Z)), Z, atol=1e-12)

    def test_matches_dense(self, dense, rng):
        Z = _random_complex(rng, 6, 8)
        assert np.allclose(spread_antennas(Z), Z @ dense.unitary_dft(8).conj().T, atol=1e-12)
        assert np.allclose(despread_antennas(Z), Z @ dense.unitary_dft(8), atol=1e-12)
