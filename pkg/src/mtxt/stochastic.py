"""Wishart and matrix-T samplers, closed-form trace moments, and the Monte
Carlo harnesses that verify them.

Randomness contract: all sampling uses numpy's PCG64 generator seeded through
``SeedSequence``, so a given 64-bit seed and call sequence reproduce the same
stream on every platform.  Parallel workers draw from substreams spawned from
the master seed and results merge in fixed worker order, making every report
deterministic for a given (seed, worker-count) pair.

Draw order inside the matrix-T sampler, per batch: Bartlett chi draws for the
Wishart diagonal (one vector per diagonal index), then the subdiagonal
normals (one block per row), then the d-by-m Gaussian matrix entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import NumericalError, SpdMatrix, TParams, fmt_float, whiten

__all__ = [
    "make_rng",
    "worker_rngs",
    "MomentReport",
    "RestrictedMomentCheck",
    "sample_wishart",
    "sample_matrix_t",
    "trace_moment",
    "verify_trace_moments",
    "restricted_moment_check",
    "bulk_tail_probability",
    "write_moment_csv",
]

MOMENT_CSV_HEADER = "quantity,closed_form,mc_estimate,mc_std_error,n_samples"


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator from a 64-bit unsigned seed."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def worker_rngs(seed, workers: int) -> list[np.random.Generator]:
    """Independent substreams for ``workers`` parallel draws, in fixed order."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    if workers < 1:
        raise ValueError("worker count must be at least 1")
    children = np.random.SeedSequence(seed).spawn(workers)
    return [np.random.Generator(np.random.PCG64(ss)) for ss in children]


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(rng)


def _chunks(n_samples: int, rng, workers: int):
    """Yield (rng, count) pairs covering n_samples in fixed worker order."""
    if workers <= 1:
        yield _as_rng(rng), n_samples
        return
    if isinstance(rng, np.random.Generator):
        raise ValueError("multi-worker draws need an integer seed, not a Generator")
    base, rem = divmod(n_samples, workers)
    for i, sub in enumerate(worker_rngs(rng, workers)):
        count = base + (1 if i < rem else 0)
        if count:
            yield sub, count


def _bartlett_factor(n: float, d: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """Lower-triangular Bartlett factor A with A A^T ~ Wishart(n, I_d)."""
    a = np.zeros((size, d, d))
    for i in range(d):
        # chi draw via numpy's gamma sampler (Marsaglia-Tsang rejection)
        a[:, i, i] = np.sqrt(rng.chisquare(n - i, size))
    for i in range(1, d):
        a[:, i, :i] = rng.standard_normal((size, i))
    return a


def sample_wishart(n: float, v: SpdMatrix, rng, size: int | None = None):
    """Draw from Wishart(n, V) by the Bartlett decomposition.

    Returns an ``SpdMatrix`` for a single draw, or a stacked ``(size, d, d)``
    array when ``size`` is given.
    """
    d = v.dim
    if not n > d - 1:
        raise ValueError(f"Wishart degrees of freedom must exceed {d - 1}, got {n:g}")
    rng = _as_rng(rng)
    count = 1 if size is None else int(size)
    factor = np.linalg.cholesky(v.values)
    la = factor @ _bartlett_factor(float(n), d, rng, count)
    w = la @ np.swapaxes(la, -1, -2)
    w = 0.5 * (w + np.swapaxes(w, -1, -2))
    if size is None:
        return SpdMatrix(w[0])
    return w


def _inv_sqrt_batch(s: np.ndarray) -> np.ndarray:
    """Symmetric inverse square roots of a stack of SPD matrices."""
    try:
        w, u = np.linalg.eigh(s)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"batched eigendecomposition failed: {exc}") from exc
    if np.any(w <= 0.0):
        raise NumericalError("Wishart draw is numerically singular")
    return (u / np.sqrt(w)[..., None, :]) @ np.swapaxes(u, -1, -2)


def sample_matrix_t(params: TParams, rng, size: int | None = None) -> np.ndarray:
    """Draw from the centered matrix-variate T law.

    Uses the stochastic representation Delta = (nu^-1 S)^{-1/2} Z with
    S ~ Wishart_d(nu + d - 1, I_d) and Z a d-by-m standard Gaussian matrix,
    then X = Sigma^{1/2} Delta Omega^{1/2}.  Returns shape (d, m), or
    (size, d, m) when ``size`` is given.
    """
    d, m, nu = params.d, params.m, params.nu
    rng = _as_rng(rng)
    count = 1 if size is None else int(size)
    a = _bartlett_factor(nu + d - 1, d, rng, count)
    s = a @ np.swapaxes(a, -1, -2)
    z = rng.standard_normal((count, d, m))
    delta = np.sqrt(nu) * (_inv_sqrt_batch(0.5 * (s + np.swapaxes(s, -1, -2))) @ z)
    x = params.sigma.sqrt().values @ delta @ params.omega.sqrt().values
    return x[0] if size is None else x


def trace_moment(params: TParams, k: int) -> float:
    """Closed-form E[tr((Delta_X Delta_X^T)^k)] for k = 1 or 2."""
    d, m, nu = params.d, params.m, params.nu
    if k == 1:
        params.require_nu(2.0, "the first trace moment")
        return m * d * nu / (nu - 2.0)
    if k == 2:
        params.require_nu(4.0, "the second trace moment")
        num = m * d * nu**2 * ((m + d) * (nu - 2.0) + nu + m * d)
        return num / ((nu - 1.0) * (nu - 2.0) * (nu - 4.0))
    raise ValueError(f"trace moments are available for k in {{1, 2}}, got {k}")


def _trace_power_samples(params: TParams, x: np.ndarray, k: int) -> np.ndarray:
    delta = whiten(params, x)
    if k == 1:
        return (delta**2).sum(axis=(-2, -1))
    gram = delta @ np.swapaxes(delta, -1, -2)
    return (gram**2).sum(axis=(-2, -1))


@dataclass(frozen=True)
class MomentReport:
    """Closed form vs Monte Carlo estimate of one trace moment."""

    quantity: str
    closed_form: float
    mc_estimate: float
    mc_std_error: float
    n_samples: int

    def within(self, n_std_errors: float) -> bool:
        return abs(self.mc_estimate - self.closed_form) <= n_std_errors * self.mc_std_error


def verify_trace_moments(
    params: TParams, k: int, n_samples: int, rng, workers: int = 1
) -> MomentReport:
    """Monte Carlo check of ``trace_moment`` on matrix-T draws."""
    closed = trace_moment(params, k)  # validates k and the nu precondition
    if n_samples < 1000:
        raise ValueError("verify_trace_moments needs at least 1000 samples")
    values = np.concatenate(
        [
            _trace_power_samples(params, sample_matrix_t(params, sub, size=count), k)
            for sub, count in _chunks(n_samples, rng, workers)
        ]
    )
    return MomentReport(
        quantity=f"tr((DxDx^T)^{k})",
        closed_form=closed,
        mc_estimate=float(values.mean()),
        mc_std_error=float(values.std(ddof=1) / np.sqrt(values.size)),
        n_samples=int(values.size),
    )


@dataclass(frozen=True)
class RestrictedMomentCheck:
    """Bulk-restricted trace moments against their tail-probability bounds.

    The gap fields subtract the unrestricted closed form, i.e. they estimate
    |E[tr^k 1_A] - E[tr^k]| = |E[tr^k 1_{A^c}]|, matching the decomposition
    the bounds are proved through (the literal restricted statement is vacuous
    for A equal to the whole space).
    """

    eta: float | None
    n_samples: int
    tail_probability: float
    gap1: float
    gap1_std_error: float
    bound1: float
    holds1: bool
    gap2: float
    gap2_std_error: float
    bound2: float
    holds2: bool


def restricted_moment_check(
    params: TParams, eta: float | None, n_samples: int, rng
) -> RestrictedMomentCheck:
    """Estimate the restricted trace moments over the bulk A = B(eta).

    ``eta = None`` takes A to be all of R^{d x m} (indicator identically one),
    in which case both gaps vanish up to Monte Carlo error.
    """
    d, m, nu = params.d, params.m, params.nu
    params.require_nu(4.0, "the restricted moment check")
    if eta is not None and not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta:g}")
    if n_samples < 2:
        raise ValueError("restricted_moment_check needs at least 2 samples")
    x = sample_matrix_t(params, _as_rng(rng), size=n_samples)
    delta = whiten(params, x)
    gram = delta @ np.swapaxes(delta, -1, -2)
    lam = np.linalg.eigvalsh(0.5 * (gram + np.swapaxes(gram, -1, -2)))
    tr1 = lam.sum(axis=-1)
    tr2 = (lam**2).sum(axis=-1)
    if eta is None:
        inside = np.ones(n_samples, dtype=bool)
    else:
        inside = lam.max(axis=-1) <= eta * eta * np.sqrt(nu)
    tail = float(1.0 - inside.mean())

    def gap(values: np.ndarray, closed: float):
        restricted = np.where(inside, values, 0.0)
        se = float(restricted.std(ddof=1) / np.sqrt(n_samples))
        return abs(float(restricted.mean()) - closed), se

    gap1, se1 = gap(tr1, trace_moment(params, 1))
    gap2, se2 = gap(tr2, trace_moment(params, 2))
    bound1 = 2.0 * m**0.5 * d**1.5 * tail**0.5
    bound2 = 100.0 * m**2 * d**2.5 * tail**0.25
    return RestrictedMomentCheck(
        eta=eta,
        n_samples=n_samples,
        tail_probability=tail,
        gap1=gap1,
        gap1_std_error=se1,
        bound1=bound1,
        holds1=gap1 <= bound1,
        gap2=gap2,
        gap2_std_error=se2,
        bound2=bound2,
        holds2=gap2 <= bound2,
    )


def bulk_tail_probability(params: TParams, eta: float, n_samples: int, rng) -> float:
    """Empirical P(X outside the bulk B(eta)) from matrix-T draws."""
    params.require_nu(2.0, "the bulk tail probe")
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta:g}")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    x = sample_matrix_t(params, _as_rng(rng), size=n_samples)
    delta = whiten(params, x)
    gram = delta @ np.swapaxes(delta, -1, -2)
    lam_max = np.linalg.eigvalsh(0.5 * (gram + np.swapaxes(gram, -1, -2)))[..., -1]
    return float((lam_max > eta * eta * np.sqrt(params.nu)).mean())


def write_moment_csv(path, reports, comment: str | None = None, pass_gate: float | None = None) -> None:
    """Serialize moment reports; ``pass_gate`` appends a pass column at that
    many standard errors."""
    header = MOMENT_CSV_HEADER + (",pass" if pass_gate is not None else "")
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(header)
    for r in reports:
        fields = [
            r.quantity,
            fmt_float(r.closed_form),
            fmt_float(r.mc_estimate),
            fmt_float(r.mc_std_error),
            str(r.n_samples),
        ]
        if pass_gate is not None:
            fields.append("true" if r.within(pass_gate) else "false")
        lines.append(",".join(fields))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
