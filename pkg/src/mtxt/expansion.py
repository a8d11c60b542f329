"""Correction terms of the normal-approximation log-ratio, truncated
approximations, and the supremum-error functionals E0/E1/E2 with their
exponent diagnostics.

The error functionals are computed on a deterministic spectral grid: the
log-ratio depends on X only through the eigenvalues (lambda_1, ..., lambda_d)
of Delta_X Delta_X^T, so the supremum over the dm-dimensional bulk reduces to
a supremum over a d-dimensional box.  With the bulk radius eta = nu^{-1/4},
each rescaled coordinate delta_j / sqrt(nu - 2) ranges over [0, nu^{-1/2}],
i.e. lambda_j over [0, 1]; the grid is uniform in delta_j and includes both
endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import TParams, fmt_float, whitened_lambdas
from .density import log_ratio_from_lambdas

__all__ = [
    "ExpansionTerms",
    "ErrorCurve",
    "expansion_terms",
    "truncated_log_ratio",
    "sup_error",
    "error_exponent_curve",
]

ERROR_CURVE_HEADER = "nu,e0,e1,e2,exp0,exp1,exp2"


@dataclass(frozen=True)
class ExpansionTerms:
    """Coefficients of nu^-1, nu^-2, nu^-3 in the log-ratio expansion."""

    t1: float
    t2: float
    t3: float

    def partial_sum(self, nu: float, order: int) -> float:
        coeffs = (self.t1, self.t2, self.t3)
        return float(sum(c / nu ** (k + 1) for k, c in enumerate(coeffs[:order])))


def _constant_terms(d: int, m: int) -> tuple[float, float, float]:
    c1 = m * d * (m + d + 1) / 4.0
    c2 = m * d / 24.0 * (13 - 2 * d**2 - 3 * d * (m - 3) + 9 * m - 2 * m**2)
    c3 = (
        m
        * d
        / 24.0
        * (
            26
            + d**3
            + 2 * d**2 * (m - 3)
            + 11 * m
            - 6 * m**2
            + m**3
            + d * (11 - 9 * m + 2 * m**2)
        )
    )
    return c1, c2, c3


def _terms_from_lambdas(lam: np.ndarray, d: int, m: int):
    """Vectorized correction terms from a stacked spectrum (..., d)."""
    c1, c2, c3 = _constant_terms(d, m)
    tr1 = lam.sum(axis=-1)
    tr2 = (lam**2).sum(axis=-1)
    tr3 = (lam**3).sum(axis=-1)
    tr4 = (lam**4).sum(axis=-1)
    t1 = 0.25 * tr2 - (m + d + 1) / 2.0 * tr1 + c1
    t2 = -tr3 / 6.0 + (m + d - 1) / 4.0 * tr2 + c2
    t3 = tr4 / 8.0 - (m + d - 1) / 6.0 * tr3 + c3
    return t1, t2, t3


def expansion_terms(params: TParams, x) -> ExpansionTerms:
    """Correction terms at a single point X."""
    params.require_nu(2.0, "the expansion")
    lam = whitened_lambdas(params, np.asarray(x, dtype=float))
    if lam.ndim != 1:
        raise ValueError("expansion_terms expects a single d-by-m matrix")
    t1, t2, t3 = _terms_from_lambdas(lam, params.d, params.m)
    return ExpansionTerms(float(t1), float(t2), float(t3))


def truncated_log_ratio(params: TParams, x, order: int) -> float:
    """Partial sum sum_{k<=order} nu^-k t_k; order 0 is the plain normal fit."""
    if order not in (0, 1, 2, 3):
        raise ValueError(f"order must be in {{0, 1, 2, 3}}, got {order}")
    params.require_nu(2.0, "the expansion")
    if order == 0:
        return 0.0
    return expansion_terms(params, x).partial_sum(params.nu, order)


def _bulk_grid_lambdas(nu: float, d: int, grid_points_per_axis: int) -> np.ndarray:
    """Tensor grid of spectra covering the bulk with eta = nu^{-1/4}."""
    delta_max = np.sqrt((nu - 2.0) / nu)  # boundary: lambda_j = 1
    deltas = np.linspace(0.0, delta_max, grid_points_per_axis)
    axes = np.meshgrid(*([deltas] * d), indexing="ij")
    dsq = np.stack([a**2 for a in axes], axis=-1).reshape(-1, d)
    return nu / (nu - 2.0) * dsq


def _sup_errors(nu: float, d: int, m: int, grid_points_per_axis: int):
    lam = _bulk_grid_lambdas(nu, d, grid_points_per_axis)
    exact = log_ratio_from_lambdas(nu, d, m, lam)
    t1, t2, t3 = _terms_from_lambdas(lam, d, m)
    e0 = float(np.abs(exact).max())
    e1 = float(np.abs(exact - t1 / nu).max())
    e2 = float(np.abs(exact - t1 / nu - t2 / nu**2).max())
    return e0, e1, e2


def sup_error(params: TParams, nu: float, order: int, grid_points_per_axis: int) -> float:
    """Supremum over the bulk of |exact log-ratio - order-i partial sum|."""
    if order not in (0, 1, 2):
        raise ValueError(f"error order must be in {{0, 1, 2}}, got {order}")
    if not nu > 2.0:
        raise ValueError(f"sup_error requires nu > 2, got nu = {nu:g}")
    if grid_points_per_axis < 16:
        raise ValueError("grid_points_per_axis must be at least 16")
    return _sup_errors(nu, params.d, params.m, grid_points_per_axis)[order]


@dataclass(frozen=True)
class ErrorCurve:
    """Per-nu supremum errors and exponent diagnostics, ready for plotting."""

    nu: np.ndarray
    e0: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    exp0: np.ndarray
    exp1: np.ndarray
    exp2: np.ndarray

    def __len__(self) -> int:
        return self.nu.size

    def columns(self):
        return (self.nu, self.e0, self.e1, self.e2, self.exp0, self.exp1, self.exp2)

    def to_csv(self, path) -> None:
        lines = [ERROR_CURVE_HEADER]
        for row in zip(*self.columns()):
            lines.append(",".join(fmt_float(v) for v in row))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "ErrorCurve":
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
        if not lines or lines[0] != ERROR_CURVE_HEADER:
            raise ValueError(f"{path}: missing error-curve header")
        data = np.array(
            [[float(tok) for tok in ln.split(",")] for ln in lines[1:]], dtype=float
        ).reshape(-1, 7)
        return cls(*(data[:, i].copy() for i in range(7)))


def nu_progression(nu_min: float, nu_max: float, step: float) -> np.ndarray:
    """Arithmetic progression nu_min, nu_min + step, ..., up to nu_max."""
    if not nu_min <= nu_max:
        raise ValueError(f"empty nu range: [{nu_min:g}, {nu_max:g}]")
    if nu_min == nu_max:
        return np.array([nu_min], dtype=float)
    if not step > 0.0:
        raise ValueError(f"nu step must be positive, got {step:g}")
    count = int(np.floor((nu_max - nu_min) / step + 1e-9)) + 1
    return nu_min + step * np.arange(count, dtype=float)


def error_exponent_curve(
    params: TParams,
    nu_min: float,
    nu_max: float,
    step: float,
    grid_points_per_axis: int,
) -> ErrorCurve:
    """Evaluate E0/E1/E2 and ln(E_i)/ln(1/nu) over a nu progression."""
    if not 2.0 < nu_min:
        raise ValueError(f"nu_min must exceed 2, got {nu_min:g}")
    if grid_points_per_axis < 16:
        raise ValueError("grid_points_per_axis must be at least 16")
    nus = nu_progression(nu_min, nu_max, step)
    errs = np.array(
        [_sup_errors(nu, params.d, params.m, grid_points_per_axis) for nu in nus]
    )
    exps = np.log(errs) / np.log(1.0 / nus)[:, None]
    return ErrorCurve(
        nu=nus,
        e0=errs[:, 0],
        e1=errs[:, 1],
        e2=errs[:, 2],
        exp0=exps[:, 0],
        exp1=exps[:, 1],
        exp2=exps[:, 2],
    )
