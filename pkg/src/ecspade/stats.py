"""Multivariate-t background model: Mahalanobis distance, density, sampling.

The background is parameterized by its mean, its *covariance* R and the tail
parameter nu > 2, so that the density kernel is ``[(nu-2) + D(x)]^{-(d+nu)/2}``
with ``D`` the squared Mahalanobis distance under R. ``nu = inf`` is accepted
and means Gaussian.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log, pi

import numpy as np
from scipy.linalg import solve_triangular

from .errors import BadNu, DimMismatch, NotSPD

SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class BackgroundModel:
    mean: np.ndarray
    covariance: np.ndarray
    nu: float
    chol: np.ndarray  # lower triangular, chol @ chol.T == covariance
    cov_inv: np.ndarray
    log_c: float  # log of the normalizing constant in front of the kernel
    logdet: float

    @property
    def d(self) -> int:
        return self.mean.shape[0]

    @property
    def gaussian(self) -> bool:
        return bool(np.isinf(self.nu))

    def whiten(self, x) -> np.ndarray:
        """Return ``L^{-1} x`` for a vector or for each row of an (n, d) array."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise DimMismatch(f"expected last axis of length {self.d}, got {x.shape}")
        if x.ndim == 1:
            return solve_triangular(self.chol, x, lower=True)
        return solve_triangular(self.chol, x.T, lower=True).T


def _log_normalizer(d: int, nu: float, logdet: float) -> float:
    # Standard multivariate-t with scale matrix R (nu-2)/nu, rewritten for the
    # [(nu-2) + D]^{-(d+nu)/2} kernel.
    if np.isinf(nu):
        return -0.5 * d * log(2 * pi) - 0.5 * logdet
    return (lgamma(0.5 * (nu + d)) - lgamma(0.5 * nu) - 0.5 * d * log(pi)
            + 0.5 * nu * log(nu - 2) - 0.5 * logdet)


def make_background(mean, covariance, nu: float) -> BackgroundModel:
    mean = np.array(mean, dtype=float).reshape(-1)
    cov = np.array(covariance, dtype=float)
    d = mean.shape[0]
    if d < 1 or cov.shape != (d, d):
        raise DimMismatch(f"mean has length {d} but covariance has shape {cov.shape}")
    nu = float(nu)
    if not nu > 2:
        raise BadNu(f"nu must be > 2, got {nu}")
    scale = np.max(np.abs(cov))
    if not np.all(np.isfinite(cov)) or np.max(np.abs(cov - cov.T)) > SYMMETRY_RTOL * scale:
        raise NotSPD("covariance is not symmetric")
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NotSPD("covariance has a non-positive pivot") from exc
    if not np.all(np.diag(chol) > 0):
        raise NotSPD("covariance has a non-positive pivot")
    eye = np.eye(d)
    linv = solve_triangular(chol, eye, lower=True)
    cov_inv = linv.T @ linv
    cov_inv = 0.5 * (cov_inv + cov_inv.T)
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    for arr in (mean, cov, chol, cov_inv):
        arr.setflags(write=False)
    return BackgroundModel(mean=mean, covariance=cov, nu=nu, chol=chol,
                           cov_inv=cov_inv, log_c=_log_normalizer(d, nu, logdet),
                           logdet=logdet)


def mahalanobis_sq(model: BackgroundModel, x):
    """Squared Mahalanobis distance ``(x-mu)' R^{-1} (x-mu)``.

    Accepts a single pixel (returns a float) or an (n, d) array of pixels.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (model.d,):
        raise DimMismatch(f"expected last axis of length {model.d}, got {x.shape}")
    w = model.whiten(x - model.mean)
    out = np.sum(w * w, axis=-1)
    return float(out) if out.ndim == 0 else out


def log_density(model: BackgroundModel, x):
    delta = mahalanobis_sq(model, x)
    d, nu = model.d, model.nu
    if model.gaussian:
        return model.log_c - 0.5 * delta
    # log_c - (d+nu)/2 log((nu-2) + D), with the large log(nu-2) pieces cancelled
    base = model.log_c - 0.5 * (d + nu) * log(nu - 2)
    out = base - 0.5 * (d + nu) * np.log1p(np.asarray(delta) / (nu - 2))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class SampleBatch:
    data: np.ndarray
    seed: int
    stream: tuple

    def __len__(self) -> int:
        return self.data.shape[0]


def _stream_key(stream) -> tuple:
    if isinstance(stream, (int, np.integer)):
        return (int(stream),)
    return tuple(int(s) for s in stream)


def make_rng(seed: int, stream=0) -> np.random.Generator:
    """Independent, deterministic generator for the pair (seed, stream).

    ``stream`` may be an int or a tuple of ints; distinct streams give
    statistically independent sequences.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=_stream_key(stream))
    return np.random.Generator(np.random.PCG64(ss))


def sample(model: BackgroundModel, n: int, seed: int = 0, stream=0) -> SampleBatch:
    """Draw n background pixels as ``mu + L g sqrt((nu-2)/s)``, s ~ chi2(nu)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed, stream)
    g = rng.standard_normal((n, model.d))
    if model.gaussian:
        radial = np.ones((n, 1))
    else:
        s = rng.chisquare(model.nu, size=n)
        radial = np.sqrt((model.nu - 2) / s)[:, None]
    data = model.mean + (g * radial) @ model.chol.T
    return SampleBatch(data=data, seed=int(seed), stream=_stream_key(stream))
