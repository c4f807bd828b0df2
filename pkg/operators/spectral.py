"""
Eigendecompositions of the composite operators and the common/difference
embeddings built from them.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np
import scipy.linalg

from config.settings import settings
from operators.kernels import DiffusionPair
from utils.errors import InvalidParameter, NumericalFailure, ShapeError, SymmetryViolation

logger = logging.getLogger(__name__)

SOURCES = ("common", "difference", "single_lead")


def _square(matrix, name: str) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {matrix.shape}")
    return matrix


@dataclass(frozen=True)
class SymmetricSpectrum:
    """Descending eigenvalues and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]


@dataclass(frozen=True)
class AntisymmetricSpectrum:
    """
    Real orthogonal form of an antisymmetric matrix.

    For each conjugate pair +-j*lambda_k the plane (u_k, u'_k) satisfies
    A u_k = -lambda_k u'_k and A u'_k = lambda_k u_k.  Directions with
    lambda below the kernel ratio are collected in `kernel`.
    """

    lambdas: np.ndarray
    u: np.ndarray
    u_prime: np.ndarray
    kernel: np.ndarray

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def num_pairs(self) -> int:
        return int(self.lambdas.size)

    @property
    def u_pairs(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        return [(self.u[:, k], self.u_prime[:, k]) for k in range(self.num_pairs)]

    def reconstruct(self) -> np.ndarray:
        """Sum of lambda_k (u_k u'_k^T - u'_k u_k^T)."""
        scaled = self.u * self.lambdas
        return scaled @ self.u_prime.T - self.u_prime @ scaled.T


@dataclass(frozen=True)
class Embedding:
    """Embedding coordinates with per-column eigen labels."""

    coords: np.ndarray
    source: str
    eigen_labels: List[Tuple[int, str]]
    eigenvalues: np.ndarray

    def __post_init__(self):
        if self.source not in SOURCES:
            raise InvalidParameter(f"Unknown embedding source: {self.source}. Available sources: {list(SOURCES)}")

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    def column_names(self) -> List[str]:
        return [f"{part}_{index}" for index, part in self.eigen_labels]

    def sidecar(self) -> Dict[str, Any]:
        """JSON-ready description of the columns."""
        return {
            "source": self.source,
            "dimension": self.dimension,
            "eigen_labels": [[index, part] for index, part in self.eigen_labels],
            "eigenvalues": [float(v) for v in self.eigenvalues],
        }


def _orient_columns(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive."""
    if vectors.size == 0:
        return vectors
    rows = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[rows, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def symmetric_eig(s) -> SymmetricSpectrum:
    """
    Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Raises:
        SymmetryViolation: if max|s - s^T| exceeds the symmetry tolerance
        NumericalFailure: if the solver does not converge
    """
    s = _square(s, "s")
    defect = float(np.max(np.abs(s - s.T))) if s.size else 0.0
    if defect > settings.SYMMETRY_TOL:
        raise SymmetryViolation(f"Matrix is not symmetric (defect {defect:.3e})")

    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(0.5 * (s + s.T))
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise NumericalFailure(f"Symmetric eigensolver failed: {e}") from e

    order = np.arange(eigenvalues.size)[::-1]
    return SymmetricSpectrum(
        eigenvalues=eigenvalues[order],
        eigenvectors=_orient_columns(eigenvectors[:, order]),
    )


def _canonical_plane(u: np.ndarray, u_prime: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    # Rotate within the plane so that u'_i = 0 and u_i > 0 at the index of
    # largest in-plane magnitude; rotations commute with the 2x2 block.
    i = int(np.argmax(u ** 2 + u_prime ** 2))
    radius = np.hypot(u[i], u_prime[i])
    c, s = u[i] / radius, u_prime[i] / radius
    return c * u + s * u_prime, -s * u + c * u_prime


def antisymmetric_spectrum(a) -> AntisymmetricSpectrum:
    """
    Conjugate-pair spectrum of an antisymmetric matrix via the real Schur form.

    Args:
        a: Square matrix with max|a + a^T| within the symmetry tolerance

    Returns:
        AntisymmetricSpectrum with lambdas sorted descending
    """
    a = _square(a, "a")
    n = a.shape[0]
    defect = float(np.max(np.abs(a + a.T))) if a.size else 0.0
    if defect > settings.SYMMETRY_TOL:
        raise SymmetryViolation(f"Matrix is not antisymmetric (defect {defect:.3e})")

    try:
        t, z = scipy.linalg.schur(0.5 * (a - a.T), output="real")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e:
        raise NumericalFailure(f"Real Schur decomposition failed: {e}") from e

    lambdas, firsts, seconds, kernel_columns = [], [], [], []
    p = 0
    while p < n:
        if p + 1 < n and t[p + 1, p] != 0.0:
            b, c = t[p, p + 1], t[p + 1, p]
            lambdas.append(0.5 * (abs(b) + abs(c)))
            if b > 0:
                firsts.append(z[:, p])
                seconds.append(z[:, p + 1])
            else:
                firsts.append(z[:, p + 1])
                seconds.append(z[:, p])
            p += 2
        else:
            kernel_columns.append(z[:, p])
            p += 1

    lambdas = np.asarray(lambdas, dtype=float)
    lambda_max = float(lambdas.max()) if lambdas.size else 0.0
    keep = lambdas > settings.SPECTRUM_KERNEL_RATIO * lambda_max if lambda_max > 0 else np.zeros(lambdas.size, bool)

    for k in np.flatnonzero(~keep):
        kernel_columns.extend([firsts[k], seconds[k]])

    kept = np.flatnonzero(keep)
    order = kept[np.argsort(-lambdas[kept], kind="stable")]

    u = np.empty((n, order.size))
    u_prime = np.empty((n, order.size))
    for column, k in enumerate(order):
        u[:, column], u_prime[:, column] = _canonical_plane(firsts[k], seconds[k])

    kernel = np.column_stack(kernel_columns) if kernel_columns else np.empty((n, 0))
    logger.debug("antisymmetric spectrum: %d pairs, kernel dimension %d", order.size, kernel.shape[1])

    return AntisymmetricSpectrum(lambdas=lambdas[order], u=u, u_prime=u_prime, kernel=kernel)


def _symmetric_embedding(spec: SymmetricSpectrum, m: int, source: str) -> Embedding:
    if not 1 <= m <= spec.n:
        raise InvalidParameter(f"m must be in [1, {spec.n}], got {m}")

    return Embedding(
        coords=spec.eigenvectors[:, :m].copy(),
        source=source,
        eigen_labels=[(k + 1, "sym") for k in range(m)],
        eigenvalues=spec.eigenvalues[:m].copy(),
    )


def common_embedding(spec: SymmetricSpectrum, m: int) -> Embedding:
    """First m eigenvectors of S (largest eigenvalues)."""
    return _symmetric_embedding(spec, m, "common")


def symmetric_difference_embedding(spec: SymmetricSpectrum, m: int) -> Embedding:
    """Difference embedding from the leading eigenvectors of the PSD alternative operator."""
    return _symmetric_embedding(spec, m, "difference")


def difference_embedding(spec: AntisymmetricSpectrum, m: int) -> Embedding:
    """
    Real and imaginary parts of the first m/2 conjugate-pair eigenvectors.

    Columns 2k-1 and 2k hold u_k and u'_k of pair k.
    """
    if m < 2 or m % 2:
        raise InvalidParameter(f"m must be a positive even integer, got {m}")
    if m // 2 > spec.num_pairs:
        raise InvalidParameter(f"m/2 = {m // 2} exceeds the {spec.num_pairs} available pairs")

    pairs = m // 2
    coords = np.empty((spec.n, m))
    coords[:, 0::2] = spec.u[:, :pairs]
    coords[:, 1::2] = spec.u_prime[:, :pairs]

    labels = []
    for k in range(1, pairs + 1):
        labels.extend([(k, "real"), (k, "imag")])

    return Embedding(
        coords=coords,
        source="difference",
        eigen_labels=labels,
        eigenvalues=np.repeat(spec.lambdas[:pairs], 2),
    )


def nontrivial_common_embedding(spec: SymmetricSpectrum, m: int) -> Embedding:
    """The m eigenvectors of S that follow its single-signed Perron vector."""
    start = leading_nontrivial_column(spec.eigenvectors[:, :2])
    if not 1 <= m <= spec.n - start:
        raise InvalidParameter(f"m must be in [1, {spec.n - start}], got {m}")

    columns = np.arange(start, start + m)
    return Embedding(
        coords=spec.eigenvectors[:, columns].copy(),
        source="common",
        eigen_labels=[(int(k) + 1, "sym") for k in columns],
        eigenvalues=spec.eigenvalues[columns].copy(),
    )


def diffusion_map_embedding(pair: DiffusionPair, m: int) -> Embedding:
    """
    Diffusion maps of a single view: right eigenvectors 2..m+1 of P.

    Solved through the symmetric conjugate D^1/2 P D^-1/2 = D^-1/2 W D^-1/2;
    each eigenvector v maps back to D^-1/2 v and is rescaled to unit norm.
    """
    if not 1 <= m < pair.n:
        raise InvalidParameter(f"m must be in [1, {pair.n - 1}], got {m}")

    root = np.sqrt(pair.degrees)
    spec = symmetric_eig(root[:, None] * pair.p / root[None, :])
    psi = spec.eigenvectors[:, 1:m + 1] / root[:, None]
    psi = _orient_columns(psi / np.linalg.norm(psi, axis=0))

    return Embedding(
        coords=psi,
        source="single_lead",
        eigen_labels=[(k + 1, "sym") for k in range(1, m + 1)],
        eigenvalues=spec.eigenvalues[1:m + 1].copy(),
    )


def point_biserial(values, mask) -> float:
    """Correlation between a real vector and a boolean mask."""
    values = np.asarray(values, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if values.shape != mask.shape:
        raise ShapeError(f"values {values.shape} and mask {mask.shape} differ")
    if mask.all() or not mask.any():
        raise InvalidParameter("mask must contain both classes")
    return float(np.corrcoef(values, mask.astype(float))[0, 1])


def leading_nontrivial_column(coords) -> int:
    """
    Index of the first column that changes sign.

    The top eigenvector of an operator with positive entries is a Perron
    vector, single-signed and carrying only the sampling density.
    """
    coords = np.asarray(coords, dtype=float)
    if coords.ndim == 1:
        coords = coords[:, None]
    for k in range(coords.shape[1]):
        if coords[:, k].min() < 0 < coords[:, k].max():
            return k
    raise InvalidParameter("every column is single-signed")


def mask_energy_fraction(coords, mask) -> np.ndarray:
    """Per-column share of squared norm that falls on `mask`."""
    coords = np.asarray(coords, dtype=float)
    mask = np.asarray(mask, dtype=bool)
    if coords.ndim == 1:
        coords = coords[:, None]
    if coords.shape[0] != mask.size:
        raise ShapeError(f"coords have {coords.shape[0]} rows, mask has {mask.size}")

    energy = np.square(coords)
    total = energy.sum(axis=0)
    inside = energy[mask].sum(axis=0)
    return np.divide(inside, total, out=np.zeros_like(total), where=total > 0)
