"""Static SVG charts for CLI results.

Output is byte-stable: the SVG id salt is fixed and no date is embedded.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SVG_SALT = "lancaster"


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": SVG_SALT, "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_sequence(rho: Sequence[float], R: float, path) -> Path:
    """Stem chart of ``|rho_n|`` with the maximal correlation marked."""
    fig, ax = plt.subplots(figsize=(5, 3.2))
    n = list(range(1, len(rho) + 1))
    ax.stem(n, [abs(r) for r in rho], basefmt=" ")
    ax.axhline(R, color="C3", ls="--", lw=1, label=f"R = {R:.6g}")
    ax.set_xlabel("n")
    ax.set_ylabel(r"$|\rho_n|$")
    ax.set_ylim(0, 1.05)
    ax.legend(frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def plot_estimate(corr_hat: float, stderr: float, bound: float | None, label: str, path) -> Path:
    """Point estimate with a 4-s.e. bar against its bound."""
    fig, ax = plt.subplots(figsize=(4, 3.2))
    ax.errorbar([0], [corr_hat], yerr=[4 * stderr], fmt="o", capsize=6, label="estimate ± 4 s.e.")
    if bound is not None:
        ax.axhline(bound, color="C3", ls="--", lw=1, label=f"bound {bound:.6g}")
    ax.set_xticks([0], [label])
    ax.set_ylabel("correlation")
    ax.legend(frameon=False, loc="lower right")
    fig.tight_layout()
    return _save(fig, path)


def plot_transforms(x, g, y, h, path) -> Path:
    """Optimal transforms found by the oracle on the grid supports."""
    fig, (a, b) = plt.subplots(1, 2, figsize=(7, 3.2))
    a.plot(x, g, ".-", ms=3)
    a.set_xlabel("x")
    a.set_ylabel("g(x)")
    b.plot(y, h, ".-", ms=3, color="C1")
    b.set_xlabel("y")
    b.set_ylabel("h(y)")
    fig.tight_layout()
    return _save(fig, path)


def plot_matrix(expected: Sequence[float], computed: Sequence[float], passed: Sequence[bool], path) -> Path:
    """Scatter of computed against reference values, failures highlighted."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ok = [i for i, p in enumerate(passed) if p]
    bad = [i for i, p in enumerate(passed) if not p]
    ax.scatter([expected[i] for i in ok], [computed[i] for i in ok], s=8, label="pass")
    if bad:
        ax.scatter([expected[i] for i in bad], [computed[i] for i in bad], s=24, marker="x", color="C3", label="fail")
    lo = min(min(expected), min(computed), 0.0)
    hi = max(max(expected), max(computed), 1.0)
    ax.plot([lo, hi], [lo, hi], color="0.6", lw=0.8)
    ax.set_xlabel("reference")
    ax.set_ylabel("computed")
    ax.legend(frameon=False)
    fig.tight_layout()
    return _save(fig, path)
