"""Matplotlib figures written next to the delimited reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "svg.hashsalt": "regpoly",
}


def plot_polygons(points, polygons, path, title=None):
    """Input points as dots, each polygon outlined and coloured by k."""
    xy = np.asarray(points, dtype=float)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5, 5))
        cmap = plt.get_cmap("tab10")
        seen = set()
        for g in polygons:
            v = xy[list(g.vertex_ids) + [g.vertex_ids[0]]]
            label = "k=%d" % g.k if g.k not in seen else None
            seen.add(g.k)
            ax.plot(v[:, 0], v[:, 1], lw=1.0, color=cmap(g.k % 10), label=label)
        ax.scatter(xy[:, 0], xy[:, 1], s=4, color="k", zorder=3)
        ax.set_aspect("equal")
        if seen:
            ax.legend(loc="upper right", frameon=False)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None} if str(path).endswith(".png") else None)
        plt.close(fig)


def plot_scaling(rows, path, slopes=None):
    """Log-log wall time against n, one line per phase."""
    phases = sorted({r["phase"] for r in rows})
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for ph in phases:
            pts = sorted((r["n"], r["seconds"]) for r in rows if r["phase"] == ph)
            ns, ts = zip(*pts)
            label = ph
            if slopes and ph in slopes:
                label += " (slope %.2f)" % slopes[ph]
            ax.loglog(ns, ts, "o-", ms=3, label=label)
        ns = sorted({r["n"] for r in rows})
        if len(ns) > 1:
            ref = np.array(ns, dtype=float)
            t0 = min(r["seconds"] for r in rows if r["n"] == ns[0]) or 1e-3
            ax.loglog(ref, t0 * (ref / ref[0]) ** 2, "k:", lw=0.8, label="n^2")
        ax.set_xlabel("n (points)")
        ax.set_ylabel("seconds")
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
