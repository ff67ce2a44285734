"""Static SVG renderings of the CSV outputs.  The CSV files are the data
contract; these plots are a convenience view of the same rows."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _save(fig, path):
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)


def render_frontier(points, path) -> None:
    """Zero-capacity frontier: gamma against beta with the region shaded."""
    betas = [p[0] for p in points]
    gammas = [p[1] for p in points]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(betas, gammas, "b-", lw=1.5)
    ax.fill_between(betas, 0.0, gammas, alpha=0.15, color="b")
    ax.set_xlabel("beta = Nt / Ne")
    ax.set_ylabel("gamma = Nr / Ne")
    ax.set_title("Zero secrecy capacity region (asymptotic)")
    ax.set_xlim(0.0, 0.55)
    ax.set_ylim(0.0, 1.05)
    _save(fig, path)


def render_allocation(taus, rhos, path) -> None:
    """Minimum eavesdropper antenna ratio against the transmit fraction."""
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(taus, rhos, "b-", lw=1.5)
    ax.axhline(3.0, color="gray", ls=":", lw=1.0)
    ax.set_xlabel("tau = Nt / (Nt + Nr)")
    ax.set_ylabel("min Ne / (Nt + Nr)")
    ax.set_title("Eavesdropper antennas needed to null secrecy")
    _save(fig, path)


def render_sweep(powers, capacity_bits, masked_bits, path) -> None:
    """Capacity and masked-scheme rate against transmit power."""
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.semilogx(powers, capacity_bits, "b-", lw=1.5, label="capacity")
    ax.semilogx(powers, masked_bits, "r--", lw=1.5, label="masked rate")
    ax.set_xlabel("power P")
    ax.set_ylabel("rate (bits)")
    ax.set_title("Secrecy rate vs power")
    ax.legend()
    _save(fig, path)
