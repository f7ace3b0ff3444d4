"""Figure rendering for ensemble statistics.

Imported lazily by the CLI so headless use without plots never touches
matplotlib.  Output is PNG only, rendered off-screen, with fixed metadata
so repeat runs produce identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .ensemble import EnsembleStats

_PNG_METADATA = {"Software": "codedswitch"}


def _series(stats: EnsembleStats, key_fn, value_fn):
    groups: dict = {}
    for row in stats.rows:
        groups.setdefault(key_fn(row), []).append((row.load, value_fn(row)))
    return {key: sorted(points) for key, points in groups.items()}


def _save(fig, path: str) -> None:
    if not path.endswith(".png"):
        raise ValueError("plot output must be a .png path")
    fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)


def render_mean_served(stats: EnsembleStats, path: str) -> None:
    """One curve per scheme: mean served packets against offered load."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for scheme, points in sorted(_series(stats, lambda r: r.scheme, lambda r: r.mean_lstar).items()):
        loads = [x for x, _ in points]
        means = [y for _, y in points]
        ax.plot(loads, means, marker="o", label=scheme)
    ax.set_xlabel("packets requested (L)")
    ax.set_ylabel("mean packets served")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_mean_throughput(stats: EnsembleStats, path: str) -> None:
    """One curve per scheme: mean throughput against offered load."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for scheme, points in sorted(
        _series(stats, lambda r: r.scheme, lambda r: r.mean_throughput).items()
    ):
        loads = [x for x, _ in points]
        means = [y for _, y in points]
        ax.plot(loads, means, marker="o", label=scheme)
    ax.set_xlabel("packets requested (L)")
    ax.set_ylabel("mean throughput")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def render_full_throughput(stats: EnsembleStats, path: str) -> None:
    """Per n: empirical full-throughput fraction (markers) under the
    union-size upper bound (lines)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    empirical = _series(stats, lambda r: r.n, lambda r: r.full_fraction)
    analytic = _series(stats, lambda r: r.n, lambda r: r.hall_upper_bound)
    for n in sorted(empirical):
        points = empirical[n]
        ax.plot(
            [x for x, _ in points],
            [y for _, y in points],
            linestyle="none",
            marker="o",
            label=f"measured, n={n}",
        )
    for n in sorted(analytic):
        points = analytic[n]
        ax.plot(
            [x for x, _ in points],
            [y for _, y in points],
            linestyle="--",
            label=f"bound, n={n}",
        )
    ax.set_xlabel("packets requested (L)")
    ax.set_ylabel("fraction served in full")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)
