"""Pairwise-error-probability machinery for the precoded DD channel.

Covers equivalent codeword matrices, codeword difference matrices, the PEP
upper bounds and their diversity/coding-gain forms, the recursive Gram
determinant and the diagnostics of its off-diagonal entries.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from ssotfs_cli.phy.channel import Path
from ssotfs_cli.phy.comm.effective import TapShift, effective_shift, xi_apply
from ssotfs_cli.phy.otfs import FrameParams, dd_to_td
from ssotfs_cli.phy.tx import PrecoderSpec, apply_precoder
from ssotfs_cli.utils.errors import InvalidInputError

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10
PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-12
DIAGONAL_TOL = 1e-9
THEOREM_TOL = 1e-6


def _precoder_list(precoders, P: int) -> List[Optional[PrecoderSpec]]:
    if precoders is None:
        return [None] * P
    precoders = list(precoders)
    if len(precoders) != P:
        raise InvalidInputError(f"expected {P} precoders, got {len(precoders)}")
    return precoders


def codeword_matrix(
    e: np.ndarray, paths: Sequence[Path], precoders, params: FrameParams
) -> np.ndarray:
    """Equivalent codeword matrix: column ``p`` is ``Xi_p e``."""
    if not paths:
        raise InvalidInputError("at least one path is required")
    specs = _precoder_list(precoders, len(paths))
    return np.column_stack([xi_apply(e, path, spec, params) for path, spec in zip(paths, specs)])


@dataclass(frozen=True, eq=False)
class CodewordDiffMatrix:
    """``omega = Phi^H Phi`` and its power-weighted form ``diag(sqrt a)^H omega diag(sqrt a)``."""

    omega: np.ndarray
    weighted: np.ndarray
    d_e_sq: float

    @property
    def P(self) -> int:
        return self.omega.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the weighted matrix, largest first."""
        return _sorted_eigenvalues(self.weighted)

    def rank(self, weighted: bool = True) -> int:
        return _rank(_sorted_eigenvalues(self.weighted if weighted else self.omega))

    @property
    def determinant(self) -> float:
        return float(np.real(np.linalg.det(self.omega)))


def _sorted_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    return np.sort(np.linalg.eigvalsh(matrix))[::-1]


def _rank(eigenvalues: np.ndarray) -> int:
    if eigenvalues.size == 0 or eigenvalues[0] <= 0:
        return 0
    return int(np.sum(eigenvalues / eigenvalues[0] > RANK_TOL))


def codeword_diff_matrix(
    e: np.ndarray,
    paths: Sequence[Path],
    precoders,
    alpha: Union[float, Sequence[float]],
    params: FrameParams,
) -> CodewordDiffMatrix:
    """Codeword difference matrix of error vector ``e`` and its weighted variant.

    Args:
        e: DD-domain error vector ``x - x'``.
        paths: Paths of one user.
        precoders: One precoder (or None) per path, or None for no precoding.
        alpha: Per-path transmit power on the path's antenna.
        params: Frame parameters.
    """
    phi = codeword_matrix(e, paths, precoders, params)
    omega = phi.conj().T @ phi
    omega = 0.5 * (omega + omega.conj().T)
    root = np.sqrt(np.broadcast_to(np.asarray(alpha, dtype=float), (len(paths),)))
    weighted = root[:, None] * omega * root[None, :]
    d_e_sq = float(np.sum(np.abs(np.asarray(e)) ** 2))
    return CodewordDiffMatrix(omega=omega, weighted=weighted, d_e_sq=d_e_sq)


def conditional_distance(h_eff: np.ndarray, omega_tilde: np.ndarray) -> float:
    """``h^H omega_tilde h``, the conditional squared Euclidean distance."""
    h_eff = np.asarray(h_eff).reshape(-1)
    omega_tilde = np.asarray(omega_tilde)
    if omega_tilde.shape != (h_eff.size, h_eff.size):
        raise InvalidInputError(f"matrix {omega_tilde.shape} does not match gains of length {h_eff.size}")
    return max(float(np.real(np.vdot(h_eff, omega_tilde @ h_eff))), 0.0)


@dataclass(frozen=True)
class PEPBounds:
    """PEP upper bounds of one error event.

    ``conditional`` and ``eigen_expanded`` need the channel gains; ``full_rank``
    and ``final`` are only defined when the weighted matrix has full rank.
    """

    averaged: float
    diversity: float
    rank: int
    eigenvalues: tuple
    full_rank: Optional[float] = None
    final: Optional[float] = None
    conditional: Optional[float] = None
    eigen_expanded: Optional[float] = None

    @property
    def diversity_order(self) -> int:
        return self.rank


def _check_psd(matrix: np.ndarray, name: str) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidInputError(f"{name} must be square, got {matrix.shape}")
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise InvalidInputError(f"{name} is not Hermitian")
    eigenvalues = np.linalg.eigvalsh(matrix)
    trace = abs(float(np.real(np.trace(matrix))))
    if eigenvalues.size and eigenvalues.min() < -PSD_TOL * max(trace, np.finfo(float).tiny):
        raise InvalidInputError(
            f"{name} is not positive semidefinite (min eigenvalue {eigenvalues.min():.3e})"
        )
    return matrix


def pep_bounds(
    omega: Union[np.ndarray, CodewordDiffMatrix],
    alpha: Union[float, Sequence[float]],
    n0: float,
    P: Optional[int] = None,
    h: Optional[np.ndarray] = None,
    d_e_sq: Optional[float] = None,
) -> PEPBounds:
    """Evaluates the PEP bound family for one codeword difference matrix.

    Args:
        omega: Unweighted codeword difference matrix (or the full record).
        alpha: Per-path powers used to weight it.
        n0: Noise power, must be positive.
        P: Number of paths (gain variance is ``1/P``); defaults to the matrix size.
        h: Optional channel gains for the conditional bounds.
        d_e_sq: Squared Euclidean distance of the error vector; defaults to the
            diagonal of ``omega``.

    Returns:
        PEPBounds
    """
    if n0 <= 0:
        raise InvalidInputError(f"noise power must be positive, got {n0}")
    if isinstance(omega, CodewordDiffMatrix):
        d_e_sq = omega.d_e_sq if d_e_sq is None else d_e_sq
        omega = omega.omega
    omega = _check_psd(omega, "codeword difference matrix")
    size = omega.shape[0]
    P = size if P is None else int(P)
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (size,))
    root = np.sqrt(alpha)
    weighted = root[:, None] * omega * root[None, :]
    eigenvalues = _sorted_eigenvalues(weighted)
    rank = _rank(eigenvalues)
    active = eigenvalues[:rank]

    averaged = float(np.prod(1.0 / (1.0 + active / (4 * n0 * P))))
    diversity = float(np.prod(4 * n0 * P / active)) if rank else 1.0

    full_rank = final = None
    if rank == size and size > 0:
        det_omega = float(np.real(np.linalg.det(omega)))
        prod_alpha = float(np.prod(alpha))
        full_rank = (4 * n0 * P) ** P / (det_omega * prod_alpha)
        if d_e_sq is None:
            d_e_sq = float(np.real(omega[0, 0]))
        final = (d_e_sq / P) ** (-P) * (prod_alpha ** (1.0 / P) / (4 * n0)) ** (-P)

    conditional = eigen_expanded = None
    if h is not None:
        h = np.asarray(h).reshape(-1)
        conditional = math.exp(-conditional_distance(h, weighted) / (4 * n0))
        values, vectors = np.linalg.eigh(weighted)
        projections = np.abs(vectors.conj().T @ h) ** 2
        eigen_expanded = math.exp(-float(np.sum(np.maximum(values, 0.0) * projections)) / (4 * n0))

    return PEPBounds(
        averaged=averaged,
        diversity=diversity,
        rank=rank,
        eigenvalues=tuple(float(v) for v in eigenvalues),
        full_rank=full_rank,
        final=final,
        conditional=conditional,
        eigen_expanded=eigen_expanded,
    )


@dataclass(frozen=True)
class GramRecursion:
    determinant: float
    projection_norms_sq: tuple
    norms_sq: tuple


def gram_det_recursive(vectors: np.ndarray, tol: float = 1e-12) -> GramRecursion:
    """Gram determinant as the product of squared orthogonal-complement norms.

    Each vector is projected onto the orthogonal complement of the span of the
    previous ones (Gram-Schmidt with one re-orthogonalization pass).

    Args:
        vectors: 2-D array whose columns are the vectors.
        tol: Relative norm below which a projection counts as zero.
    """
    vectors = np.asarray(vectors, dtype=np.complex128)
    if vectors.ndim != 2:
        raise InvalidInputError(f"expected a 2-D array of column vectors, got {vectors.shape}")
    basis: List[np.ndarray] = []
    projections, norms = [], []
    determinant = 1.0
    for j in range(vectors.shape[1]):
        u = vectors[:, j]
        residual = u.copy()
        for _ in range(2):
            for q in basis:
                residual = residual - np.vdot(q, residual) * q
        norm_sq = float(np.real(np.vdot(u, u)))
        proj_sq = float(np.real(np.vdot(residual, residual)))
        if proj_sq <= (tol**2) * max(norm_sq, np.finfo(float).tiny):
            proj_sq = 0.0
        else:
            basis.append(residual / math.sqrt(proj_sq))
        projections.append(proj_sq)
        norms.append(norm_sq)
        determinant *= proj_sq
    return GramRecursion(determinant, tuple(projections), tuple(norms))


@dataclass(frozen=True)
class Theorem1Report:
    """Determinant of the codeword difference matrix against ``(d_E^2)^P``."""

    bound: float
    determinant: float
    holds: bool
    equality_gap: float
    diagonal: bool

    @property
    def relative_gap(self) -> float:
        return self.equality_gap / self.bound if self.bound else 0.0

    @property
    def equality(self) -> bool:
        return abs(self.relative_gap) <= THEOREM_TOL


def theorem1_check(omega: np.ndarray, d_e_sq: float, P: Optional[int] = None) -> Theorem1Report:
    """Checks ``det(omega) <= (d_E^2)^P``; equality is expected for diagonal ``omega``."""
    omega = np.asarray(omega)
    P = omega.shape[0] if P is None else int(P)
    bound = float(d_e_sq) ** P
    determinant = float(np.real(np.linalg.det(omega)))
    off = omega - np.diag(np.diag(omega))
    diagonal = bool(np.max(np.abs(off), initial=0.0) < DIAGONAL_TOL * max(d_e_sq, np.finfo(float).tiny))
    holds = determinant <= bound + THEOREM_TOL * bound
    return Theorem1Report(bound, determinant, holds, bound - determinant, diagonal)


@dataclass(frozen=True)
class OffDiagDiagnostics:
    """Off-diagonal entry ``e^H Xi_p^H Xi_q e`` by several routes.

    ``sum_form`` is the index-sum evaluation, ``same_delay`` the closed form
    for equal delays (exact), ``same_doppler`` the approximation for equal
    Dopplers together with its error.
    """

    direct: complex
    d_e_sq: float
    sum_form: Optional[complex] = None
    same_delay: Optional[complex] = None
    same_doppler: Optional[complex] = None
    same_doppler_error: Optional[float] = None

    @property
    def magnitude(self) -> float:
        return abs(self.direct)


def _sum_form(e_td: np.ndarray, sp: TapShift, sq: TapShift) -> complex:
    L = e_td.size
    n = np.arange(L)
    shifted = (n - (sq.delay - sp.delay)) % L
    exponent = (shifted * sq.doppler - n * sp.doppler) / L
    total = np.sum(np.exp(2j * np.pi * exponent) * np.conj(e_td) * e_td[shifted])
    return complex(np.conj(sp.phase) * sq.phase * total)


def offdiag_diagnostics(
    e: np.ndarray,
    path_p: Path,
    path_q: Path,
    params: FrameParams,
    precoder_p: Optional[PrecoderSpec] = None,
    precoder_q: Optional[PrecoderSpec] = None,
) -> OffDiagDiagnostics:
    """Evaluates one off-diagonal entry of the codeword difference matrix.

    The sum form and closed forms need both path/precoder pairs to collapse to
    a single shift (always true without precoding or with exact estimates).
    """
    e = np.asarray(e)
    direct = complex(
        np.vdot(xi_apply(e, path_p, precoder_p, params), xi_apply(e, path_q, precoder_q, params))
    )
    d_e_sq = float(np.sum(np.abs(e) ** 2))
    sp = effective_shift(path_p, precoder_p, params)
    sq = effective_shift(path_q, precoder_q, params)
    if sp is None or sq is None:
        return OffDiagDiagnostics(direct, d_e_sq)

    e_td = dd_to_td(e, params)
    L = params.mn
    sum_form = _sum_form(e_td, sp, sq)
    phase = np.conj(sp.phase) * sq.phase
    same_delay = same_doppler = error = None
    if sp.delay == sq.delay:
        n = np.arange(L)
        ramp = np.exp(2j * np.pi * n * (sq.doppler - sp.doppler) / L)
        same_delay = complex(phase * np.sum(ramp * np.abs(e_td) ** 2))
    if sp.doppler == sq.doppler:
        n = np.arange(L)
        shifted = (n - (sq.delay - sp.delay)) % L
        ramp = np.exp(2j * np.pi * sp.doppler * (sp.delay - sq.delay) / L)
        same_doppler = complex(phase * ramp * np.sum(np.conj(e_td) * e_td[shifted]))
        error = abs(direct - same_doppler)
    return OffDiagDiagnostics(direct, d_e_sq, sum_form, same_delay, same_doppler, error)


def precoder_cross_norm(w_p: PrecoderSpec, w_q: PrecoderSpec, length: int) -> float:
    """Frobenius norm of ``W_p^H W_q`` (``sqrt(length)`` for symbol-wise unitary pairs)."""
    basis = np.eye(length, dtype=np.complex128)
    cross = w_p.operator(length).H @ apply_precoder(w_q, basis, axis=0)
    return float(np.linalg.norm(cross))


def lemma3_check(w_p: PrecoderSpec, w_q: PrecoderSpec, length: int) -> bool:
    """True when ``W_p^H W_q`` is not the zero matrix."""
    return precoder_cross_norm(w_p, w_q, length) > 0.0


def rayleigh_pdf(x: np.ndarray, P: int) -> np.ndarray:
    """Density ``2 P x exp(-P x^2)`` of a path gain magnitude."""
    x = np.asarray(x, dtype=float)
    return np.where(x >= 0, 2 * P * x * np.exp(-P * x**2), 0.0)


def error_sequence(repeats: int, length: int, pattern: Sequence[float] = (2.0, 0.0, -2.0)) -> np.ndarray:
    """``pattern`` repeated ``repeats`` times and zero-padded to ``length``."""
    body = np.tile(np.asarray(pattern, dtype=float), repeats)
    if body.size > length:
        raise InvalidInputError(f"{repeats} repeats do not fit a frame of length {length}")
    e = np.zeros(length, dtype=np.complex128)
    e[: body.size] = body
    return e
