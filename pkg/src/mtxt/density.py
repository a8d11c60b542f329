"""Log densities of the matrix-T and matrix-normal laws, the exact
normal-approximation log-ratio, and the bulk membership test.

The exact log-ratio is always evaluated through its log-gamma form, which
stays stable for degrees of freedom up to 1e6; the defining ratio of the two
densities is retained (``log_ratio_direct``) purely as a cross-check.
"""

from __future__ import annotations

import numpy as np

from .matcore import SpdMatrix, TParams, _check_shape, whitened_lambdas
from .specfun import log_gamma, log_multigamma

__all__ = [
    "log_matrix_t",
    "log_matrix_normal",
    "log_ratio_exact",
    "log_ratio_direct",
    "log_ratio_from_lambdas",
    "in_bulk",
]

_LOG_PI = float(np.log(np.pi))
_LOG_2PI = float(np.log(2.0 * np.pi))


def _maybe_scalar(a: np.ndarray):
    return float(a) if np.ndim(a) == 0 else a


def log_matrix_t(params: TParams, x):
    """Log density of the centered matrix-variate T law at X.

    Supports stacked inputs of shape (..., d, m); returns matching shape.
    """
    d, m, nu = params.d, params.m, params.nu
    lam = whitened_lambdas(params, x)
    const = (
        log_multigamma(d, (nu + m + d - 1) / 2.0)
        - log_multigamma(d, (nu + d - 1) / 2.0)
        - m * d / 2.0 * np.log(nu * np.pi)
        - m / 2.0 * params.sigma.log_det
        - d / 2.0 * params.omega.log_det
    )
    out = const - (nu + m + d - 1) / 2.0 * np.log1p(lam / nu).sum(axis=-1)
    return _maybe_scalar(out)


def log_matrix_normal(sigma: SpdMatrix, omega: SpdMatrix, x):
    """Log density of the centered matrix-normal law with row scale Sigma and
    column scale Omega (vec(X^T) has covariance Sigma kron Omega)."""
    d, m = sigma.dim, omega.dim
    x = np.asarray(x, dtype=float)
    if x.shape[-2:] != (d, m):
        raise ValueError(
            f"X has shape {x.shape}, expected trailing dimensions ({d}, {m})"
        )
    w = sigma.inv().values @ x @ omega.inv().values
    quad = (w * x).sum(axis=(-2, -1))
    const = -m * d / 2.0 * _LOG_2PI - m / 2.0 * sigma.log_det - d / 2.0 * omega.log_det
    return _maybe_scalar(const - 0.5 * quad)


def log_ratio_from_lambdas(nu: float, d: int, m: int, lambdas):
    """Exact log-ratio as a function of the whitened spectrum only.

    ``lambdas`` are the eigenvalues of Delta_X Delta_X^T, shape (..., d).
    Evaluated in the log-gamma form:

        -(md/2) ln((nu-2)/2)
        + sum_j [ln Gamma((nu+m+d-j)/2) - ln Gamma((nu+d-j)/2)]
        + (1/2) sum_j delta_j^2
        - ((nu+m+d-1)/2) sum_j ln(1 + delta_j^2 / (nu-2))

    with delta_j^2 = ((nu-2)/nu) lambda_j.
    """
    if not nu > 2.0:
        raise ValueError(f"exact log-ratio requires nu > 2, got nu = {nu:g}")
    lam = np.asarray(lambdas, dtype=float)
    j = np.arange(1, d + 1, dtype=float)
    const = -m * d / 2.0 * np.log((nu - 2.0) / 2.0) + float(
        np.sum(log_gamma((nu + m + d - j) / 2.0) - log_gamma((nu + d - j) / 2.0))
    )
    dsq = (nu - 2.0) / nu * lam
    out = (
        const
        + 0.5 * dsq.sum(axis=-1)
        - (nu + m + d - 1) / 2.0 * np.log1p(dsq / (nu - 2.0)).sum(axis=-1)
    )
    return _maybe_scalar(out)


def log_ratio_exact(params: TParams, x):
    """Exact log of [nu/(nu-2)]^{md/2} K(X) / g(X sqrt((nu-2)/nu))."""
    params.require_nu(2.0, "the exact log-ratio")
    lam = whitened_lambdas(params, x)
    return log_ratio_from_lambdas(params.nu, params.d, params.m, lam)


def log_ratio_direct(params: TParams, x):
    """The same log-ratio assembled from the two densities (cross-check path)."""
    params.require_nu(2.0, "the exact log-ratio")
    d, m, nu = params.d, params.m, params.nu
    x = _check_shape(params, x)
    shrink = np.sqrt((nu - 2.0) / nu)
    return (
        m * d / 2.0 * np.log(nu / (nu - 2.0))
        + log_matrix_t(params, x)
        - log_matrix_normal(params.sigma, params.omega, x * shrink)
    )


def in_bulk(params: TParams, x, eta: float):
    """True iff max_j delta_j / sqrt(nu-2) <= eta * nu^{-1/4}.

    Equivalently, max_j lambda_j <= eta^2 sqrt(nu).  Supports stacked X.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta:g}")
    params.require_nu(2.0, "the bulk membership test")
    lam = whitened_lambdas(params, x)
    out = lam.max(axis=-1) <= eta * eta * np.sqrt(params.nu)
    return bool(out) if np.ndim(out) == 0 else out
