"""Matplotlib figures for sweep tables and optimised poses, rendered to files."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .geometry import Pose6D, normal_vector  # noqa: E402
from .runner import median_table  # noqa: E402

_STYLE = {
    "6d-pbf-r2": dict(color="tab:red", marker="o"),
    "6d-pbf-r1": dict(color="tab:orange", marker="s"),
    "orient-pbf": dict(color="tab:blue", marker="^"),
    "pbf-only": dict(color="tab:gray", marker="v"),
}
_LABEL = {
    "6d-pbf-r2": "6D + PBF (R2)",
    "6d-pbf-r1": "6D + PBF (R1)",
    "orient-pbf": "Orientation + PBF",
    "pbf-only": "PBF only",
}


def _schemes(rows):
    out = []
    for r in rows:
        if r["scheme"] not in out:
            out.append(r["scheme"])
    return out


def plot_elements(table, path, dpi=150):
    """Median sensing SNR and S&C correlation against the number of elements."""
    med = median_table(table, keys=("scheme", "N_x", "N_y"))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for name in _schemes(med):
        rows = sorted((m for m in med if m["scheme"] == name), key=lambda m: m["N_x"] * m["N_y"])
        n = [m["N_x"] * m["N_y"] for m in rows]
        kw = _STYLE.get(name, {})
        ax1.plot(n, [m["snr_s_dB"] for m in rows], label=_LABEL.get(name, name), **kw)
        ax2.plot(n, [m["rho"] for m in rows], label=_LABEL.get(name, name), **kw)
    ax1.set_xlabel("reflecting elements N")
    ax1.set_ylabel("median sensing SNR (dB)")
    ax2.set_xlabel("reflecting elements N")
    ax2.set_ylabel(r"median correlation $\rho$")
    ax1.ticklabel_format(axis="y", useOffset=False)
    ax2.ticklabel_format(axis="y", useOffset=False)
    for ax in (ax1, ax2):
        ax.grid(True, alpha=0.3)
    ax1.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path


def plot_tradeoff(table, path, dpi=150):
    """Median (SNR_c, SNR_s) boundary per scheme; infeasible thresholds are dropped."""
    med = median_table(table, keys=("scheme", "Gamma0_dB"))
    fig, ax = plt.subplots(figsize=(5, 4))
    for name in _schemes(med):
        rows = sorted((m for m in med if m["scheme"] == name), key=lambda m: m["Gamma0_dB"])
        rows = [m for m in rows if np.isfinite(m["snr_s_dB"])]
        ax.plot([m["snr_c_dB"] for m in rows], [m["snr_s_dB"] for m in rows],
                label=_LABEL.get(name, name), **_STYLE.get(name, {}))
    ax.set_xlabel("communication SNR (dB)")
    ax.set_ylabel("sensing SNR (dB)")
    ax.ticklabel_format(axis="y", useOffset=False)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path


def plot_geometry(results, scenario, path, dpi=150, arrow=25.0):
    """Top view of the nodes, movable regions and optimised IRS poses.

    Arrows show the horizontal part of each IRS outward normal.
    """
    fig, ax = plt.subplots(figsize=(6, 5))
    for name, reg in scenario.regions.items():
        ax.add_patch(plt.Rectangle((reg.x_min, reg.y_min), reg.x_max - reg.x_min, reg.y_max - reg.y_min,
                                   fill=False, ls="--", lw=1, color="k"))
        ax.annotate(name, (reg.x_max, reg.y_max), fontsize=8, ha="right", va="bottom")
    for label, p, mk in (("BS", scenario.p_B, "ks"), ("UE", scenario.p_U, "g^"), ("target", scenario.p_T, "r*")):
        ax.plot(p[0], p[1], mk, ms=9, label=label)
    seen = set()
    for res in results:
        pose = res.pose if hasattr(res, "pose") else Pose6D(
            [res["p_R_x"], res["p_R_y"], res["p_R_z"]], [res["gamma_x"], res["gamma_y"], res["gamma_z"]])
        name = res.scheme if hasattr(res, "scheme") else res["scheme"]
        kw = _STYLE.get(name, {})
        n = normal_vector(pose)
        ax.plot(pose.p_R[0], pose.p_R[1], ls="none", label=None if name in seen else _LABEL.get(name, name), **kw)
        ax.arrow(pose.p_R[0], pose.p_R[1], arrow * n[0], arrow * n[1], color=kw.get("color", "k"),
                 width=0.4, length_includes_head=True)
        seen.add(name)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path
