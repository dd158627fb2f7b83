"""Static figure rendering for the experiment reports.

Figures are rendered with the Agg backend straight to SVG next to the CSV
output.  The SVG date metadata is suppressed so reruns with identical config
and seed produce byte-identical files.
"""

import math

import matplotlib
matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "loewnerlab"  # deterministic SVG ids
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_SAVE_KW = {"metadata": {"Date": None}, "bbox_inches": "tight"}


def _finish(fig, path):
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def flow_trajectory(path_obj, out_path):
    """x(t), y(t) of one path with the envelope sqrt(1+4t) for y."""
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    ax.plot(path_obj.t, path_obj.x, lw=0.8, label="x(t)")
    ax.plot(path_obj.t, path_obj.y, lw=0.8, label="y(t)")
    ax.plot(path_obj.t, np.sqrt(1.0 + 4.0 * path_obj.t), "k--", lw=0.8,
            label=r"$\sqrt{1+4t}$")
    ax.set_xlabel("capacity time t")
    ax.set_title(f"backward flow from i, kappa={path_obj.kappa.value:g}")
    ax.legend(frameon=False)
    return _finish(fig, out_path)


def density_overlay(centers, density, grid, pdf_vals, out_path, *,
                    title, sample_label="empirical"):
    """Histogram bars against a reference density curve."""
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    width = centers[1] - centers[0] if len(centers) > 1 else 1.0
    ax.bar(centers, density, width=width, alpha=0.45, label=sample_label)
    ax.plot(grid, pdf_vals, "k-", lw=1.2, label="stationary pdf")
    ax.set_title(title)
    ax.legend(frameon=False)
    return _finish(fig, out_path)


def stationary_curves(grid, pdf_vals, cdf_vals, kappa, out_path):
    fig, axes = plt.subplots(1, 2, figsize=(8.0, 3.2))
    axes[0].plot(grid, pdf_vals, lw=1.2)
    axes[0].set_title(f"stationary pdf, kappa={kappa:g}")
    axes[1].plot(grid, cdf_vals, lw=1.2)
    axes[1].set_title("stationary cdf")
    for ax in axes:
        ax.set_xlabel("T")
    return _finish(fig, out_path)


def argument_curve(theta, density, kappa, out_path):
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.plot(theta, density, lw=1.2)
    ax.axhline(1.0 / math.pi, color="k", ls=":", lw=0.8, label=r"$1/\pi$")
    ax.set_xlabel(r"$\theta$")
    ax.set_title(f"argument density, kappa={kappa:g}")
    ax.legend(frameon=False)
    return _finish(fig, out_path)


def ecdf_overlay(samples, labels, out_path, *, title, ref_cdf=None):
    """Empirical CDFs of one or more samples, optionally with a reference."""
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    lo = min(np.min(s) for s in samples)
    hi = max(np.max(s) for s in samples)
    for s, lab in zip(samples, labels):
        xs = np.sort(s)
        ax.step(xs, np.arange(1, len(xs) + 1) / len(xs), where="post",
                lw=0.9, label=lab)
    if ref_cdf is not None:
        grid = np.linspace(lo, hi, 400)
        ax.plot(grid, ref_cdf(grid), "k--", lw=0.9, label="reference cdf")
    ax.set_ylim(0, 1)
    ax.set_title(title)
    ax.legend(frameon=False, loc="lower right")
    return _finish(fig, out_path)


def phase_diagram(kappas, c_inverse, out_path):
    """1/C against kappa with the kappa=8 transition marked."""
    fig, ax = plt.subplots(figsize=(5.6, 3.6))
    finite = [(k, c) for k, c in zip(kappas, c_inverse) if c is not None]
    if finite:
        ks, cs = zip(*finite)
        ax.plot(ks, cs, "o-", lw=1.0)
    ax.axvline(8.0, color="r", ls="--", lw=1.0, label="kappa = 8")
    ax.set_xlabel("kappa")
    ax.set_ylabel("1/C")
    ax.set_yscale("log")
    ax.set_title("normalizing mass across the phase transition")
    ax.legend(frameon=False)
    return _finish(fig, out_path)


def running_average(u, values, target, out_path, *, title):
    fig, ax = plt.subplots(figsize=(6.0, 3.4))
    ax.plot(u, values, lw=1.0, label="running average")
    ax.axhline(target, color="k", ls="--", lw=0.9, label="stationary value")
    ax.set_xlabel("u")
    ax.set_xscale("log")
    ax.set_title(title)
    ax.legend(frameon=False)
    return _finish(fig, out_path)


def ks_vs_horizon(S_values, ks_values, out_path, *, title):
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.plot(S_values, ks_values, "o-", lw=1.0)
    ax.set_xscale("log")
    ax.set_xlabel("S")
    ax.set_ylabel("KS distance")
    ax.set_title(title)
    return _finish(fig, out_path)
