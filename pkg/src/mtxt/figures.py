"""Matplotlib rendering of the error-decay and metric studies.

Figures are written next to the CSV outputs; PNG metadata is stripped so a
rerun with the same configuration produces byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .expansion import ErrorCurve  # noqa: E402

__all__ = ["plot_inverse_errors", "plot_exponents", "plot_metric_decay"]

_SAVE_OPTS = dict(dpi=150, bbox_inches="tight", metadata={"Software": None})


def plot_inverse_errors(curve: ErrorCurve, path, title: str | None = None) -> None:
    """Log-log plot of 1/E_i against nu for the three approximation orders."""
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for e, label, marker in ((curve.e0, "$1/E_0$", "o"), (curve.e1, "$1/E_1$", "s"), (curve.e2, "$1/E_2$", "^")):
        ax.loglog(curve.nu, 1.0 / e, marker=marker, markersize=3, linewidth=1.0, label=label)
    ax.set_xlabel(r"$\nu$")
    ax.set_ylabel("inverse supremum error")
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def plot_exponents(curve: ErrorCurve, path, title: str | None = None) -> None:
    """Exponent diagnostics ln E_i / ln(1/nu) with the limiting levels 1, 2, 3."""
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for exp, label, marker in (
        (curve.exp0, r"$\log E_0/\log(\nu^{-1})$", "o"),
        (curve.exp1, r"$\log E_1/\log(\nu^{-1})$", "s"),
        (curve.exp2, r"$\log E_2/\log(\nu^{-1})$", "^"),
    ):
        ax.plot(curve.nu, exp, marker=marker, markersize=3, linewidth=1.0, label=label)
    for level in (1.0, 2.0, 3.0):
        ax.axhline(level, color="grey", linewidth=0.8, linestyle="--")
    ax.set_xlabel(r"$\nu$")
    ax.set_ylabel("error exponent")
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def plot_metric_decay(rows, path, title: str | None = None) -> None:
    """Log-log decay of the TV estimate with the C = 1 bound for reference."""
    nus = [r.nu for r in rows]
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.loglog(nus, [r.tv_estimate for r in rows], "o-", markersize=3, linewidth=1.0, label="TV estimate")
    ax.loglog(nus, [r.hellinger for r in rows], "s-", markersize=3, linewidth=1.0, label="Hellinger")
    ax.loglog(nus, [r.tv_bound_c1 for r in rows], "--", linewidth=1.0, label="TV bound (C=1)")
    ax.set_xlabel(r"$\nu$")
    ax.set_ylabel("distance")
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
