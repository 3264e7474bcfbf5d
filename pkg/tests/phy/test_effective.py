"""Tests for the effective DD channel and the shift collapse of precoded paths."""

import numpy as np
import pytest

from ssotfs_cli.phy.channel import Path
from ssotfs_cli.phy.comm.effective import (
    effective_channel_from_paths,
    effective_shift,
    xi_apply,
)
from ssotfs_cli.phy.otfs import FrameParams
from ssotfs_cli.phy.tx import PrecoderSpec
from ssotfs_cli.utils.errors import UnsupportedInputError


@pytest.fixture
def integer_paths():
    return [
        Path(h=0.8 + 0.1j, phi=0.0, l=1, k=0),
        Path(h=-0.3 + 0.5j, phi=0.0, l=2, k=3),
    ]


def _brute_force(paths, precoders, weights, params, dense):
    """``sum_p w_p (F_N kron I_M) Pi^l Delta^nu W_p (F_N^H kron I_M)`` from full matrices."""
    mn = params.mn
    H = np.zeros((mn, mn), dtype=np.complex128)
    for path, spec, w in zip(paths, precoders, weights):
        W = np.eye(mn)
        if spec is not None:
            W = dense.precoder_matrix(mn, spec.l_hat, spec.k_hat_total, spec.l_dot, spec.k_dot)
        H += w * dense.path_matrix(mn, path.l, path.nu) @ W
    return dense.td_to_dd_matrix(params.M, params.N) @ H @ dense.dd_to_td_matrix(params.M, params.N)


class TestEffectiveShift:
    def test_no_precoder(self, small_params):
        path = Path(h=1, phi=0.0, l=3, k=1, kappa=0.2)
        shift = effective_shift(path, None, small_params)
        assert (shift.delay, shift.doppler, shift.phase) == (3, pytest.approx(1.2), 1.0)

    def test_exact_estimate_collapses_to_virtual_tap(self, small_params):
        path = Path(h=1, phi=0.0, l=3, k=1, kappa=0.2)
        spec = PrecoderSpec(l_hat=3, k_hat_total=1.2, l_dot=2, k_dot=1)
        shift = effective_shift(path, spec, small_params)
        assert shift.delay == 2
        assert shift.doppler == pytest.approx(1.0)
        assert shift.integer

    def test_matches_operator_product(self, small_params, dense, rng):
        path = Path(h=1, phi=0.0, l=2, k=3, kappa=0.4)
        spec = PrecoderSpec(l_hat=1, k_hat_total=1.4, l_dot=3, k_dot=1)
        shift = effective_shift(path, spec, small_params)
        mn = small_params.mn
        expected = dense.path_matrix(mn, path.l, path.nu) @ dense.precoder_matrix(mn, 1, 1.4, 3, 1)
        collapsed = shift.phase * dense.path_matrix(mn, shift.delay, shift.doppler)
        assert np.allclose(collapsed, expected, atol=1e-12)

    def test_fractional_residual_does_not_collapse(self, small_params):
        path = Path(h=1, phi=0.0, l=2, k=1, kappa=0.3)
        assert effective_shift(path, PrecoderSpec(2, 1.0, 0, 0), small_params) is None


class TestEffectiveChannel:
    def test_flat_single_tap(self):
        params = FrameParams(M=8, N=16, n_bs=4)
        path = Path(h=0.6 - 0.8j, phi=0.0, l=5, k=7, kappa=-0.45)
        spec = PrecoderSpec(l_hat=5, k_hat_total=path.nu)
        channel = effective_channel_from_paths([path], [spec], [np.sqrt(0.3) * path.h], params)
        expected = np.sqrt(0.3) * path.h * np.eye(params.mn)
        assert np.linalg.norm(channel.dense() - expected) < 1e-10

    def test_integer_channel_matches_brute_force(self, small_params, dense, integer_paths, rng):
        weights = [p.h for p in integer_paths]
        channel = effective_channel_from_paths(integer_paths, [None, None], weights, small_params)
        expected = _brute_force(integer_paths, [None, None], weights, small_params, dense)
        assert channel.integer_only
        assert np.allclose(channel.dense(), expected, atol=1e-10)
        assert np.allclose(channel.sparse().toarray(), expected, atol=1e-10)
        x = rng.standard_normal(small_params.mn) + 0j
        assert np.allclose(channel.apply(x), expected @ x, atol=1e-10)

    def test_precoded_sparse_matches_dense(self, small_params, dense):
        paths = [Path(h=1, phi=0.0, l=1, k=1, kappa=0.3), Path(h=0.5j, phi=0.0, l=3, k=2, kappa=-0.2)]
        specs = [PrecoderSpec(1, 1.3, 0, 0), PrecoderSpec(3, 1.8, 1, 1)]
        channel = effective_channel_from_paths(paths, specs, [0.7, 0.4j], small_params)
        expected = _brute_force(paths, specs, [0.7, 0.4j], small_params, dense)
        assert channel.integer_only
        assert np.allclose(channel.sparse().toarray(), expected, atol=1e-10)
        assert np.allclose(channel.dense(), expected, atol=1e-10)

    def test_sparse_structure(self, small_params, integer_paths):
        channel = effective_channel_from_paths(integer_paths, [None, None], [1.0, 1.0], small_params)
        counts = np.diff(channel.sparse().indptr)
        assert np.all(counts == 2)

    def test_fractional_channel_is_dense(self, small_params):
        paths = [Path(h=1, phi=0.0, l=1, k=1, kappa=0.3), Path(h=1, phi=0.0, l=2, k=0, kappa=0.0)]
        channel = effective_channel_from_paths(paths, [None, None], [1.0, 1.0], small_params)
        assert not channel.integer_only
        significant = np.sum(np.abs(channel.dense()) > 1e-3, axis=1)
        assert np.all(significant > 2)
        with pytest.raises(UnsupportedInputError):
            channel.sparse()

    def test_xi_apply_preserves_norm(self, small_params, rng):
        x = rng.standard_normal(small_params.mn) + 1j * rng.standard_normal(small_params.mn)
        path = Path(h=1, phi=0.0, l=2, k=1, kappa=0.1)
        spec = PrecoderSpec(1, 0.5, 3, 2)
        assert np.linalg.norm(xi_apply(x, path, spec, small_params)) == pytest.approx(np.linalg.norm(x))
