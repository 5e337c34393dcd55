"""Static SVG figures."""

from pathlib import Path
from typing import Dict, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..geometry import SampledCurve  # noqa: E402

plt.rcParams["svg.hashsalt"] = "combined-fda"

MODE_STYLES = {-1.0: ("tab:blue", "--"), 0.0: ("black", "-"), 1.0: ("tab:red", ":")}


def plot_modes(curves: Dict[float, SampledCurve], title: str, label: str = "z"):
    """Overlay of the curves of one mode of variation, keyed by perturbation size."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for z, curve in sorted(curves.items()):
        color, style = MODE_STYLES.get(float(np.sign(z)), ("gray", "-"))
        ax.plot(curve.grid.points, curve.values, color=color, linestyle=style, label=f"{label} = {z:g}")
    ax.set_xlabel("t")
    ax.set_title(title)
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    return fig


def plot_mse(m_values: Sequence[int], series: Dict[str, Sequence[float]]):
    """Reconstruction error against the number of components, one line per method."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for method, mse in series.items():
        ax.plot(m_values, mse, marker="o", label=method)
    ax.set_xlabel("number of components m")
    ax.set_ylabel("MSE")
    ax.set_xticks(list(m_values))
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    return fig


def save_svg(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
