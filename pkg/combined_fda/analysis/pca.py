"""Principal components of grid-sampled functions under a quadrature inner product."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class WeightedPca:
    """Sample eigen-decomposition of rows of ``data`` in the L2 metric given by ``weights``.

    ``components`` are quadrature-orthonormal; ``scores`` has zero column means and
    column variances equal to ``eigenvalues``.
    """

    mean: np.ndarray
    eigenvalues: np.ndarray
    components: np.ndarray
    scores: np.ndarray
    weights: np.ndarray

    @property
    def rank(self) -> int:
        return self.eigenvalues.size

    def reconstruct(self, m: int) -> np.ndarray:
        """Rows rebuilt from the first m components."""
        return self.mean + self.scores[:, :m] @ self.components[:m]


def weighted_pca(data: np.ndarray, weights: np.ndarray) -> WeightedPca:
    """Eigenpairs of the weighted sample covariance via an SVD of the centered data.

    Args:
        data: n x p matrix, one sampled function per row
        weights: quadrature weights (length p, positive)

    Returns:
        WeightedPca with min(n - 1, p) components
    """
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    root = np.sqrt(weights)
    mean = data.mean(axis=0)
    centered = data - mean
    u, s, vt = np.linalg.svd(centered * root, full_matrices=False)
    rank = min(n - 1, vt.shape[0])
    s, vt, u = s[:rank], vt[:rank], u[:, :rank]

    # sign: largest-magnitude entry of each component is positive
    flip = np.sign(vt[np.arange(rank), np.argmax(np.abs(vt), axis=1)])
    flip[flip == 0] = 1.0
    vt = vt * flip[:, None]
    u = u * flip[None, :]

    return WeightedPca(
        mean=mean,
        eigenvalues=s**2 / (n - 1),
        components=vt / root,
        scores=u * s,
        weights=np.asarray(weights, dtype=float),
    )
