"""Figure rendering for analysis reports.

All figures are written to files (Agg backend); nothing is shown
interactively.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_FIG_KW = dict(figsize=(9.0, 4.5), dpi=130)


def save_fringe_figure(trace, section, path):
    """Counts per bin with the fitted cosine overlaid."""
    fig, ax = plt.subplots(**_FIG_KW)
    t = trace.times()
    ax.plot(t, trace.counts, ".", ms=3, color="crimson", label="counts")
    fit = section.get("fit")
    if fit and fit["converged"]:
        ts = np.linspace(t[0], t[-1], 4 * len(t))
        model = fit["offset"] + fit["amplitude"] * np.cos(
            2.0 * np.pi * ts / fit["period_s"] + fit["phase_rad"]
        )
        ax.plot(ts, model, "-", lw=1.0, color="navy", alpha=0.7,
                label=f"cosine fit (V = {100 * fit['visibility']:.1f}%)")
    if not section.get("degenerate") and "visibility" in section:
        ax.set_title(
            f"visibility {100 * section['visibility']:.2f}%  "
            f"({section['n_maxima']} maxima / {section['n_minima']} minima)"
        )
    ax.set_xlabel("time [s]")
    ax.set_ylabel(f"counts / {trace.bin_duration * 1e3:.0f} ms")
    ax.grid(alpha=0.3)
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_visibility_histogram(estimate, path, reference=None):
    """Monte-Carlo visibility distribution."""
    fig, ax = plt.subplots(**_FIG_KW)
    ax.hist(100.0 * estimate.samples, bins=60, color="steelblue", alpha=0.85)
    ax.axvline(100.0 * estimate.mean, color="k", lw=1.2,
               label=f"mean {100 * estimate.mean:.2f}% ± {100 * estimate.std:.2f}%")
    if reference is not None:
        ax.axvline(100.0 * reference, color="crimson", ls="--", lw=1.2,
                   label=f"reference {100 * reference:.2f}%")
    ax.set_xlabel("visibility [%]")
    ax.set_ylabel("samples")
    ax.grid(alpha=0.3)
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_scaling_figure(points, extrapolation, path, reference_points=()):
    """Visibility vs distance with the fitted line extended to 500 m."""
    fig, ax = plt.subplots(**_FIG_KW)
    d = np.array([p[0] for p in points])
    v = np.array([p[1] for p in points])
    ax.plot(d, 100.0 * v, "o", color="navy", label="simulated")
    if reference_points:
        rd = [p[0] for p in reference_points]
        rv = [100.0 * p[1] for p in reference_points]
        ax.plot(rd, rv, "s", mfc="none", color="crimson", label="reference")
    xs = np.linspace(0.0, 500.0, 200)
    ys = extrapolation["intercept"] + extrapolation["slope_per_m"] * xs
    ax.plot(xs, 100.0 * ys, "--", color="gray", lw=1.0, label="linear extrapolation")
    ax.axhline(50.0, color="lightgray", lw=0.8)
    ax.axhline(10.0, color="lightgray", lw=0.8)
    ax.set_xlabel("distance between sources [m]")
    ax.set_ylabel("coincidence visibility [%]")
    ax.set_ylim(0.0, 105.0)
    ax.grid(alpha=0.3)
    ax.legend(loc="lower left")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
