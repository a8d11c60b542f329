"""SPD matrix kernels: validation, inverse square roots, and the whitened
spectrum that every density, expansion, and sampler depends on.

The whitening map is ``Delta = Sigma^{-1/2} X Omega^{-1/2}``; all downstream
quantities are functions of the eigenvalues of ``Delta Delta^T`` only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NumericalError",
    "SpdMatrix",
    "TParams",
    "DeltaSpectrum",
    "inv_sqrt",
    "delta_spectrum",
    "trace_power",
    "load_matrix",
    "save_matrix",
    "load_spd",
    "fmt_float",
]

#: Hard cap on matrix dimension; workloads are desk scale by design.
MAX_DIM = 64

#: Relative symmetry tolerance applied entrywise at construction.
SYMMETRY_RTOL = 1e-12

#: Eigenvalues of Delta Delta^T in [-1e-12, 0) are roundoff and clamp to 0.
EIG_CLAMP = -1e-12


class NumericalError(RuntimeError):
    """A decomposition or quadrature failed; never silently patched."""


def fmt_float(x: float) -> str:
    """Format a float so that parsing the text reproduces the value exactly."""
    return format(float(x), ".17g")


class SpdMatrix:
    """Dense symmetric positive-definite matrix with a validated spectrum.

    The eigendecomposition is computed once at construction and reused for
    inverses, square roots, and log-determinants.  Instances are immutable.
    """

    __slots__ = ("_values", "_eigvals", "_eigvecs")

    def __init__(self, values):
        a = np.array(values, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] == 0:
            raise ValueError("matrix must be nonempty")
        if a.shape[0] > MAX_DIM:
            raise ValueError(f"dimension {a.shape[0]} exceeds the cap of {MAX_DIM}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        scale = np.maximum(1.0, np.abs(a))
        if np.any(np.abs(a - a.T) > SYMMETRY_RTOL * scale):
            raise ValueError("matrix is not symmetric within tolerance")
        a = 0.5 * (a + a.T)
        try:
            w, v = np.linalg.eigh(a)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
            raise NumericalError(f"eigendecomposition failed: {exc}") from exc
        if w[0] <= 0.0:
            raise ValueError(
                f"matrix is not positive definite (min eigenvalue {w[0]:g})"
            )
        a.setflags(write=False)
        self._values = a
        self._eigvals = w
        self._eigvecs = v

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dim(self) -> int:
        return self._values.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigvals

    @property
    def log_det(self) -> float:
        """ln |M| via the sum of log-eigenvalues."""
        return float(np.log(self._eigvals).sum())

    def _apply_spectral(self, fn) -> "SpdMatrix":
        w = fn(self._eigvals)
        m = (self._eigvecs * w) @ self._eigvecs.T
        return SpdMatrix(0.5 * (m + m.T))

    def inv(self) -> "SpdMatrix":
        return self._apply_spectral(lambda w: 1.0 / w)

    def sqrt(self) -> "SpdMatrix":
        return self._apply_spectral(np.sqrt)

    def inv_sqrt(self) -> "SpdMatrix":
        return self._apply_spectral(lambda w: 1.0 / np.sqrt(w))

    def __repr__(self) -> str:
        return f"SpdMatrix(dim={self.dim})"


def inv_sqrt(s: SpdMatrix) -> SpdMatrix:
    """Symmetric inverse square root: M with M @ M = S^{-1}."""
    return s.inv_sqrt()


@dataclass(frozen=True)
class TParams:
    """Degrees of freedom and row/column scale matrices of the matrix-T law."""

    nu: float
    sigma: SpdMatrix
    omega: SpdMatrix

    def __post_init__(self):
        if not (self.nu > 0.0 and np.isfinite(self.nu)):
            raise ValueError(f"degrees of freedom must be positive, got {self.nu}")

    @property
    def d(self) -> int:
        return self.sigma.dim

    @property
    def m(self) -> int:
        return self.omega.dim

    def require_nu(self, minimum: float, what: str) -> None:
        if not self.nu > minimum:
            raise ValueError(f"{what} requires nu > {minimum:g}, got nu = {self.nu:g}")


@dataclass(frozen=True)
class DeltaSpectrum:
    """Eigenvalues of Delta_X Delta_X^T and their (nu-2)/nu rescaling."""

    lambdas: np.ndarray
    deltas_sq: np.ndarray

    @classmethod
    def from_lambdas(cls, lambdas, nu: float) -> "DeltaSpectrum":
        lam = np.sort(np.asarray(lambdas, dtype=float))
        if lam.size and lam[0] < EIG_CLAMP:
            raise NumericalError(
                f"spectrum has a significantly negative eigenvalue ({lam[0]:g})"
            )
        lam = np.maximum(lam, 0.0)
        lam.setflags(write=False)
        dsq = (nu - 2.0) / nu * lam
        dsq.setflags(write=False)
        return cls(lambdas=lam, deltas_sq=dsq)


def _check_shape(params: TParams, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-2:] != (params.d, params.m):
        raise ValueError(
            f"X has shape {x.shape}, expected trailing dimensions "
            f"({params.d}, {params.m})"
        )
    return x


def whiten(params: TParams, x) -> np.ndarray:
    """Return Delta_X = Sigma^{-1/2} X Omega^{-1/2} (supports stacked X)."""
    x = _check_shape(params, x)
    si = params.sigma.inv_sqrt().values
    oi = params.omega.inv_sqrt().values
    return si @ x @ oi


def whitened_lambdas(params: TParams, x) -> np.ndarray:
    """Ascending eigenvalues of Delta_X Delta_X^T, clamped at zero.

    Accepts stacked inputs of shape (..., d, m) and returns (..., d).
    """
    delta = whiten(params, x)
    gram = delta @ np.swapaxes(delta, -1, -2)
    gram = 0.5 * (gram + np.swapaxes(gram, -1, -2))
    try:
        lam = np.linalg.eigvalsh(gram)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    if np.any(lam < EIG_CLAMP):
        raise NumericalError("Gram matrix produced a significantly negative eigenvalue")
    return np.maximum(lam, 0.0)


def delta_spectrum(params: TParams, x) -> DeltaSpectrum:
    """Spectrum of the whitened Gram matrix for a single d-by-m matrix X."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError("delta_spectrum expects a single d-by-m matrix")
    return DeltaSpectrum.from_lambdas(whitened_lambdas(params, x), params.nu)


def trace_power(spec: DeltaSpectrum, k: int) -> float:
    """tr((Delta_X Delta_X^T)^k) = sum_j lambda_j^k for integer k >= 1."""
    if int(k) != k or k < 1:
        raise ValueError(f"power k must be a positive integer, got {k}")
    return float(np.sum(spec.lambdas ** int(k)))


# ---------------------------------------------------------------------------
# Matrix text format (shared with the CLI): first line "d m", then d rows of
# m whitespace-separated decimals.


def save_matrix(path, a) -> None:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    d, m = a.shape
    lines = [f"{d} {m}"]
    lines.extend(" ".join(fmt_float(v) for v in row) for row in a)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: missing 'd m' header")
    try:
        d, m = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise ValueError(f"{path}: malformed 'd m' header") from exc
    if d < 1 or m < 1:
        raise ValueError(f"{path}: dimensions must be positive, got {d} {m}")
    body = tokens[2:]
    if len(body) != d * m:
        raise ValueError(f"{path}: expected {d * m} entries, found {len(body)}")
    try:
        values = np.array([float(t) for t in body], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric matrix entry") from exc
    return values.reshape(d, m)


def load_spd(path) -> SpdMatrix:
    """Load and validate an SPD matrix (requires d == m in the file)."""
    a = load_matrix(path)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{path}: SPD input must be square, got {a.shape}")
    return SpdMatrix(a)
