"""Coherent point drift: nonrigid point-set registration.

Gaussian-mixture EM with motion-coherence regularization. The moving set
supplies the mixture centroids; the learned kernel weights define a smooth
displacement field that can be evaluated at any point of the source frame.
Both sets are normalized to zero mean / unit RMS scale internally and the
normalization is recorded so the field maps mm to mm.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator

from ..errors import InvalidInputError, NumericFailureError
from ._validation import check_points


@dataclass(frozen=True)
class CpdParams:
    beta: float = 2.0           # Gaussian kernel width, normalized units
    lam: float = 3.0            # motion-coherence regularization weight
    outlier_weight: float = 0.1  # uniform-outlier mixture weight, [0, 1)
    max_iterations: int = 150
    sigma2_tol: float = 1e-8

    def __post_init__(self):
        if self.beta <= 0 or self.lam <= 0:
            raise InvalidInputError("beta and lam must be positive")
        if not 0.0 <= self.outlier_weight < 1.0:
            raise InvalidInputError("outlier_weight must be in [0, 1)")
        if self.max_iterations < 1 or self.sigma2_tol <= 0:
            raise InvalidInputError("max_iterations >= 1 and sigma2_tol > 0 required")


def _gauss_kernel(a, b, beta):
    return np.exp(-cdist(a, b, "sqeuclidean") / (2.0 * beta * beta))


def _normalize(points):
    mean = points.mean(axis=0)
    centered = points - mean
    scale = float(np.sqrt(np.mean(np.einsum("ij,ij->i", centered, centered))))
    if scale <= 0:
        raise InvalidInputError("point set has zero spread")
    return centered / scale, mean, scale


class DeformationField:
    """Kernel displacement field learned by CPD.

    apply(points_mm) maps arbitrary source-frame points to the target
    frame; at the original source points it reproduces the registered set.
    """

    __slots__ = (
        "source_points", "kernel_weights", "beta",
        "source_mean", "source_scale", "target_mean", "target_scale",
    )

    def __init__(self, source_points, kernel_weights, beta,
                 source_mean, source_scale, target_mean, target_scale):
        self.source_points = np.asarray(source_points, dtype=float)
        self.kernel_weights = np.asarray(kernel_weights, dtype=float)
        self.beta = float(beta)
        self.source_mean = np.asarray(source_mean, dtype=float)
        self.source_scale = float(source_scale)
        self.target_mean = np.asarray(target_mean, dtype=float)
        self.target_scale = float(target_scale)

    def apply(self, points) -> np.ndarray:
        pts = np.atleast_2d(check_points(points, "points"))
        normalized = (pts - self.source_mean) / self.source_scale
        g = _gauss_kernel(normalized, self.source_points, self.beta)
        moved = normalized + g @ self.kernel_weights
        out = moved * self.target_scale + self.target_mean
        return out[0] if np.asarray(points).ndim == 1 else out

    def displacements(self, points) -> np.ndarray:
        return self.apply(points) - np.atleast_2d(np.asarray(points, dtype=float))


class CoherentPointDrift(BaseEstimator):
    """Estimator wrapper: fit(X, y) registers moving set X onto target y.

    Attributes after fit: field_ (DeformationField), sigma2_ (final
    variance, normalized units), sigma2_history_, n_iterations_.
    """

    def __init__(self, beta=2.0, lam=3.0, outlier_weight=0.1,
                 max_iterations=150, sigma2_tol=1e-8):
        self.beta = beta
        self.lam = lam
        self.outlier_weight = outlier_weight
        self.max_iterations = max_iterations
        self.sigma2_tol = sigma2_tol

    def fit(self, X, y):
        params = CpdParams(
            beta=self.beta, lam=self.lam, outlier_weight=self.outlier_weight,
            max_iterations=self.max_iterations, sigma2_tol=self.sigma2_tol,
        )
        source = check_points(X, "source", min_points=10)
        target = check_points(y, "target", min_points=10)
        src, src_mean, src_scale = _normalize(source)
        dst, dst_mean, dst_scale = _normalize(target)
        m, n, dim = len(src), len(dst), 3

        g = _gauss_kernel(src, src, params.beta)
        weights = np.zeros((m, dim))
        moved = src.copy()
        sigma2 = float(cdist(dst, src, "sqeuclidean").sum() / (dim * m * n))
        w = params.outlier_weight

        history = [sigma2]
        iterations = 0
        for it in range(params.max_iterations):
            iterations = it + 1
            # E-step: soft correspondences with a uniform outlier term
            sq = cdist(moved, dst, "sqeuclidean")
            p = np.exp(-sq / (2.0 * sigma2))
            outlier = (2.0 * np.pi * sigma2) ** (dim / 2.0) * w / (1.0 - w) * m / n
            denom = p.sum(axis=0) + outlier
            denom[denom == 0.0] = np.finfo(float).tiny
            p /= denom
            p1 = p.sum(axis=1)
            pt1 = p.sum(axis=0)
            np_total = p1.sum()
            # M-step: (d(P1) G + lam sigma2 I) W = P X - d(P1) Y
            a = g * p1[:, None] + params.lam * sigma2 * np.eye(m)
            b = p @ dst - p1[:, None] * src
            try:
                weights = np.linalg.solve(a, b)
            except np.linalg.LinAlgError as exc:
                raise NumericFailureError(f"M-step solve failed: {exc}", iteration=it)
            moved = src + g @ weights
            xx = float(pt1 @ np.einsum("ij,ij->i", dst, dst))
            xt = float(((p @ dst) * moved).sum())
            tt = float(p1 @ np.einsum("ij,ij->i", moved, moved))
            new_sigma2 = (xx - 2.0 * xt + tt) / (np_total * dim)
            if not np.isfinite(new_sigma2) or not np.all(np.isfinite(weights)):
                raise NumericFailureError("non-finite values in EM update", iteration=it)
            if new_sigma2 <= 0.0:
                new_sigma2 = params.sigma2_tol / 10.0
            converged = abs(sigma2 - new_sigma2) < params.sigma2_tol
            sigma2 = new_sigma2
            history.append(sigma2)
            if converged:
                break

        self.field_ = DeformationField(
            source_points=src, kernel_weights=weights, beta=params.beta,
            source_mean=src_mean, source_scale=src_scale,
            target_mean=dst_mean, target_scale=dst_scale,
        )
        self.sigma2_ = sigma2
        self.sigma2_history_ = history
        self.n_iterations_ = iterations
        return self

    def transform(self, X):
        return self.field_.apply(X)


def cpd_nonrigid(source, target, params: CpdParams | None = None) -> DeformationField:
    """Functional form; returns the learned DeformationField."""
    params = params or CpdParams()
    est = CoherentPointDrift(**asdict(params)).fit(source, target)
    return est.field_
