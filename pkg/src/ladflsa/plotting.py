"""Static figures written next to the CSV/JSON reports (Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_fit(y, mu_hat, path, mu0=None, title=None) -> None:
    """Observations in grey, fit in red, optional truth in black."""
    y = np.asarray(y, dtype=float)
    x = np.arange(1, y.size + 1)
    fig, ax = plt.subplots(figsize=(8, 3.5))
    ax.plot(x, y, ".", color="0.6", ms=3, label="data")
    if mu0 is not None:
        ax.step(x, mu0, where="mid", color="k", lw=1.2, label="truth")
    ax.step(x, mu_hat, where="mid", color="tab:red", lw=1.5, label="fit")
    ax.set_xlabel("index")
    ax.legend(loc="best", fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_criterion(sweep, kind, path) -> None:
    """Heat map of a selection criterion over the (lambda1, lambda2) grid."""
    vals = sweep.values(kind)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    finite = np.where(np.isfinite(vals), vals, np.nan)
    im = ax.imshow(finite, origin="lower", aspect="auto",
                   extent=(sweep.lambda2[0], sweep.lambda2[-1],
                           sweep.lambda1[0], sweep.lambda1[-1]))
    p, q = np.unravel_index(np.nanargmin(finite), finite.shape)
    ax.plot(sweep.lambda2[q], sweep.lambda1[p], "w+", ms=12, mew=2)
    ax.set_xlabel("lambda2")
    ax.set_ylabel("lambda1")
    fig.colorbar(im, ax=ax, label=str(getattr(kind, "value", kind)).upper())
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_benchmark(rows, path) -> None:
    """Mean LARE and mean jump count per benchmark cell."""
    labels = [f"{r.family}\nsd={r.sigma:g}\n{r.method}" for r in rows]
    x = np.arange(len(rows))
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(max(6, 1.4 * len(rows) + 2), 3.8))
    a1.bar(x, [r.lare_mean for r in rows], yerr=[r.lare_sd for r in rows], color="tab:blue")
    a1.set_title("LARE")
    a2.bar(x, [r.jump_mean for r in rows], yerr=[r.jump_sd for r in rows], color="tab:orange")
    a2.axhline(5, color="k", lw=0.8, ls="--")
    a2.set_title("JUMP")
    for a in (a1, a2):
        a.set_xticks(x)
        a.set_xticklabels(labels, fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
