"""Random scenarios, per-path TD operators and the communication/radar channels.

Transmit signals are handled either as the stacked TDS vector (antenna
segments of length MN one after another) or as the MN x n_bs matrix whose
columns are those segments.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np

from ssotfs_cli.phy import angular
from ssotfs_cli.phy.otfs import (
    FrameParams,
    ShiftPhaseOperator,
    delay_doppler_operator,
    despread_antennas,
)
from ssotfs_cli.utils.errors import ConfigurationError, InvalidInputError
from ssotfs_cli.utils.rng import as_generator

logger = logging.getLogger(__name__)

ANGLE_POLICIES = ("on-grid", "free")
DOPPLER_POLICIES = ("fractional", "integer")


@dataclass(frozen=True)
class RadarPath:
    """Round-trip echo of a path: doubled delay and Doppler, own reflection coefficient."""

    h_tilde: complex
    phi: float
    l_tilde: int
    nu_tilde: float

    @classmethod
    def from_path(cls, path: "Path", h_tilde: complex) -> "RadarPath":
        return cls(h_tilde=complex(h_tilde), phi=path.phi, l_tilde=2 * path.l, nu_tilde=2 * path.nu)


@dataclass(frozen=True)
class Path:
    h: complex
    phi: float
    l: int
    k: int
    kappa: float = 0.0

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 0:
            raise InvalidInputError(f"delay index must be a nonnegative integer, got {self.l}")
        if int(self.k) != self.k or self.k < 0:
            raise InvalidInputError(f"Doppler index must be a nonnegative integer, got {self.k}")
        if not -0.5 <= self.kappa <= 0.5:
            raise InvalidInputError(f"fractional Doppler {self.kappa} outside [-1/2, 1/2]")
        object.__setattr__(self, "l", int(self.l))
        object.__setattr__(self, "k", int(self.k))

    @property
    def nu(self) -> float:
        """Total Doppler exponent ``k + kappa``."""
        return self.k + self.kappa

    def radar(self, h_tilde: complex) -> RadarPath:
        return RadarPath.from_path(self, h_tilde)


@dataclass(frozen=True)
class Scenario:
    """K users with P resolvable paths each, plus the matching radar echoes.

    ``paths[i][p]`` and ``radar_paths[i][p]`` describe path ``p`` of user ``i``.
    """

    params: FrameParams
    paths: Tuple[Tuple[Path, ...], ...]
    radar_paths: Tuple[Tuple[RadarPath, ...], ...]
    on_grid: bool = True

    @property
    def K(self) -> int:
        return len(self.paths)

    @property
    def P(self) -> int:
        return len(self.paths[0]) if self.paths else 0

    def user_paths(self, i: int) -> Tuple[Path, ...]:
        if not 0 <= i < self.K:
            raise InvalidInputError(f"unknown user index {i} (K={self.K})")
        return self.paths[i]

    def iter_paths(self) -> Iterator[Tuple[int, int, Path, RadarPath]]:
        for i, (user, echoes) in enumerate(zip(self.paths, self.radar_paths)):
            for p, (path, echo) in enumerate(zip(user, echoes)):
                yield i, p, path, echo

    def tx_index(self, i: int, p: int) -> int:
        return angular.angular_indices(self.paths[i][p].phi, self.params.n_bs).a_tx

    def rx_index(self, i: int, p: int) -> int:
        return angular.angular_indices(self.paths[i][p].phi, self.params.n_bs).a_rx

    def tx_indices(self) -> List[int]:
        return [self.tx_index(i, p) for i, p, _, _ in self.iter_paths()]

    def rx_indices(self) -> List[int]:
        return [self.rx_index(i, p) for i, p, _, _ in self.iter_paths()]


def _circular_distance(a: int, b: int, n: int) -> int:
    d = abs(a - b) % n
    return min(d, n - d)


def _draw_tx_indices(rng: np.random.Generator, count: int, n_bs: int, separation: int) -> List[int]:
    chosen: List[int] = []
    available = np.arange(1, n_bs + 1)
    for _ in range(count):
        allowed = [a for a in available if all(_circular_distance(a, c, n_bs) >= separation for c in chosen)]
        if not allowed:
            raise ConfigurationError(
                f"cannot place {count} paths on {n_bs} antennas with separation {separation}",
                field="K",
            )
        chosen.append(int(rng.choice(allowed)))
    return chosen


def _draw_delay_doppler(
    rng: np.random.Generator, P: int, l_max: int, k_max: int, distinct: bool
) -> Tuple[np.ndarray, np.ndarray]:
    if distinct:
        if P > min(l_max, k_max) + 1:
            raise ConfigurationError(
                f"P={P} distinct delay and Doppler indices need l_max, k_max >= {P - 1}", field="P"
            )
        return rng.choice(l_max + 1, P, replace=False), rng.choice(k_max + 1, P, replace=False)
    grid = (l_max + 1) * (k_max + 1)
    if P > grid:
        raise ConfigurationError(f"P={P} paths do not fit a {l_max + 1}x{k_max + 1} DD grid", field="P")
    cells = rng.choice(grid, P, replace=False)
    return cells // (k_max + 1), cells % (k_max + 1)


def sample_scenario(
    params: FrameParams,
    K: int,
    P: int,
    rng=None,
    angle_policy: str = "on-grid",
    l_max: int = 10,
    k_max: int = 6,
    doppler: str = "fractional",
    distinct_indices: bool = False,
    n_range: int = 0,
) -> Scenario:
    """Draws a random multi-user scenario.

    Gains are zero-mean complex Gaussian with variance ``1/(2P)`` per real
    dimension, reflection coefficients are standard complex Gaussian. Delay
    and integer Doppler indices are uniform on ``0..l_max`` and ``0..k_max``
    with no two paths of a user sharing both, fractional Doppler is uniform on
    [-1/2, 1/2] (zero under the integer policy). Transmit angular indices are
    distinct across all paths and, when ``n_range > 0``, far enough apart for
    the beam-tracking sets to be disjoint.

    Args:
        params: Frame parameters.
        K: Number of users.
        P: Paths per user.
        rng: Seed or ``np.random.Generator``.
        angle_policy: ``on-grid`` snaps angles to the angular grid, ``free``
            draws continuous angles.
        l_max: Largest delay index.
        k_max: Largest integer Doppler index.
        doppler: ``fractional`` or ``integer``.
        distinct_indices: Require pairwise distinct delays and Dopplers per user.
        n_range: Beam width used to separate the transmit indices.

    Returns:
        Scenario
    """
    rng = as_generator(rng)
    if angle_policy not in ANGLE_POLICIES:
        raise ConfigurationError(f"unknown angle policy {angle_policy!r}", field="angle_policy")
    if doppler not in DOPPLER_POLICIES:
        raise ConfigurationError(f"unknown Doppler policy {doppler!r}", field="doppler")
    if K < 1 or P < 1:
        raise ConfigurationError("K and P must be positive", field="K")
    n_bs = params.n_bs
    if K * P > n_bs:
        raise ConfigurationError(f"K*P={K * P} paths exceed n_bs={n_bs} antennas", field="K")
    if distinct_indices and P > min(params.M, params.N):
        raise ConfigurationError(f"P={P} exceeds min(M, N) for distinct indices", field="P")
    l_max = min(int(l_max), params.M - 1)
    k_max = min(int(k_max), params.N - 1)

    separation = max(1, n_range + 1)
    if angle_policy == "on-grid":
        tx = _draw_tx_indices(rng, K * P, n_bs, separation)
        phis = [angular.aoa_from_tx_index(a, n_bs) for a in tx]
    else:
        phis = _draw_free_angles(rng, K * P, n_bs, separation)

    paths, echoes = [], []
    for i in range(K):
        delays, dopplers = _draw_delay_doppler(rng, P, l_max, k_max, distinct_indices)
        h = (rng.standard_normal(P) + 1j * rng.standard_normal(P)) * math.sqrt(1.0 / (2 * P))
        h_tilde = (rng.standard_normal(P) + 1j * rng.standard_normal(P)) / math.sqrt(2.0)
        if doppler == "fractional":
            kappa = rng.uniform(-0.5, 0.5, P)
        else:
            kappa = np.zeros(P)
        user = tuple(
            Path(
                h=complex(h[p]),
                phi=phis[i * P + p],
                l=int(delays[p]),
                k=int(dopplers[p]),
                kappa=float(kappa[p]),
            )
            for p in range(P)
        )
        paths.append(user)
        echoes.append(tuple(path.radar(h_tilde[p]) for p, path in enumerate(user)))

    logger.debug(f"Sampled scenario K={K} P={P} angles={angle_policy} doppler={doppler}")
    return Scenario(
        params=params,
        paths=tuple(paths),
        radar_paths=tuple(echoes),
        on_grid=angle_policy == "on-grid",
    )


def _draw_free_angles(rng: np.random.Generator, count: int, n_bs: int, separation: int, attempts: int = 1000):
    phis: List[float] = []
    used: List[int] = []
    for _ in range(count):
        for _ in range(attempts):
            phi = float(rng.uniform(-math.pi / 2, math.pi / 2))
            a = angular.angular_indices(phi, n_bs).a_tx
            if all(_circular_distance(a, u, n_bs) >= separation for u in used):
                phis.append(phi)
                used.append(a)
                break
        else:
            raise ConfigurationError(f"could not draw {count} separable free angles", field="K")
    return phis


def td_path_operator(path: Path, params: FrameParams) -> ShiftPhaseOperator:
    """``h * Pi^l * Delta^{k+kappa}`` on length-MN vectors."""
    return delay_doppler_operator(path.l, path.nu, params.mn, gain=path.h)


def radar_td_path_operator(rpath: RadarPath, params: FrameParams) -> ShiftPhaseOperator:
    """``h_tilde * Pi^{l_tilde} * Delta^{nu_tilde}``; the round-trip delay wraps modulo MN."""
    return delay_doppler_operator(rpath.l_tilde % params.mn, rpath.nu_tilde, params.mn, gain=rpath.h_tilde)


def complex_awgn(shape, n0: float, rng) -> np.ndarray:
    """Circularly-symmetric complex Gaussian noise with per-sample variance ``n0``."""
    if n0 < 0:
        raise InvalidInputError(f"noise power must be nonnegative, got {n0}")
    rng = as_generator(rng)
    scale = math.sqrt(n0 / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def as_antenna_matrix(s: np.ndarray, params: FrameParams) -> np.ndarray:
    """Views a stacked TDS vector as the MN x n_bs matrix of antenna columns."""
    s = np.asarray(s)
    if s.ndim == 2:
        if s.shape != (params.mn, params.n_bs):
            raise InvalidInputError(f"expected a {params.mn}x{params.n_bs} matrix, got {s.shape}")
        return s
    if s.shape != (params.mn * params.n_bs,):
        raise InvalidInputError(f"expected a stacked vector of length {params.mn * params.n_bs}, got {s.shape}")
    return s.reshape(params.n_bs, params.mn).T


def stack_columns(S: np.ndarray) -> np.ndarray:
    """Inverse of :func:`as_antenna_matrix`."""
    return np.asarray(S).T.reshape(-1)


def apply_comm_channel(
    scenario: Scenario, i: int, s: np.ndarray, n0: float = 0.0, rng=None, on_grid: Optional[bool] = None
) -> np.ndarray:
    """Received TD vector of user ``i``.

    In the on-grid regime each path only sees the spread-free signal of its own
    transmit antenna. In the free-angle regime every antenna contributes
    through the steering vector of the path.

    Args:
        scenario: Channel realization.
        i: User index.
        s: Stacked TDS transmit vector or MN x n_bs antenna matrix.
        n0: Noise power per complex sample.
        rng: Seed or generator; only needed when ``n0 > 0``.
        on_grid: Force a regime; defaults to ``scenario.on_grid``.

    Returns:
        Length-MN received vector.
    """
    params = scenario.params
    user = scenario.user_paths(i)
    S = as_antenna_matrix(s, params)
    on_grid = scenario.on_grid if on_grid is None else on_grid

    r = np.zeros(params.mn, dtype=np.complex128)
    if on_grid:
        Z = despread_antennas(S)
        for p, path in enumerate(user):
            r += td_path_operator(path, params) @ Z[:, scenario.tx_index(i, p) - 1]
    else:
        for path in user:
            combined = S @ angular.steering_vector(path.phi, params.n_bs)
            r += td_path_operator(path, params) @ combined
    if n0 > 0:
        r = r + complex_awgn(params.mn, n0, rng)
    return r


def apply_radar_channel(
    scenario: Scenario, s: np.ndarray, n0_radar: float = 0.0, rng=None, on_grid: Optional[bool] = None
) -> np.ndarray:
    """De-spread TDA echo vector ``z_tilde`` seen by the radar receiver.

    On-grid, the echo of path (i, p) lands only in the receive partition
    ``a_rx`` and is the radar path operator applied to the de-spread signal of
    antenna ``a_tx``. In the free-angle regime the rank-one angular factor is
    applied in full. Noise of per-sample power ``n0_radar`` is added after
    de-spreading.

    Returns:
        Stacked vector of length ``n_bs * MN``.
    """
    params = scenario.params
    S = as_antenna_matrix(s, params)
    Z = despread_antennas(S)
    on_grid = scenario.on_grid if on_grid is None else on_grid

    Z_echo = np.zeros_like(Z, dtype=np.complex128)
    for i, p, path, echo in scenario.iter_paths():
        op = radar_td_path_operator(echo, params)
        if on_grid:
            Z_echo[:, scenario.rx_index(i, p) - 1] += op @ Z[:, scenario.tx_index(i, p) - 1]
        else:
            tx_weights = angular.angular_comm_vector(path.phi, params.n_bs, 1.0)
            rx_weights = angular.angular_rx_vector(path.phi, params.n_bs)
            Z_echo += np.outer(op @ (Z @ tx_weights), rx_weights)
    if n0_radar > 0:
        Z_echo = Z_echo + complex_awgn(Z_echo.shape, n0_radar, rng)
    return stack_columns(Z_echo)
