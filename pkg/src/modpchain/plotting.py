"""Report figures and tab-separated tables.

Figures are drawn on bare ``Figure`` objects with the Agg canvas, so nothing
touches global pyplot state, and PNGs are written without the software
metadata chunk so reruns are byte-identical.
"""

from __future__ import annotations

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure
from matplotlib.patches import FancyArrowPatch
from matplotlib.ticker import MaxNLocator

from .chain import IntegerChain, boundary
from .codim0 import GridChain, grid_select
from .modp import select_residue
from .repair import RepairCertificate

PNG_METADATA = {"Software": None}


def write_tsv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def _save(fig: Figure, path: str | Path) -> None:
    FigureCanvasAgg(fig)
    fig.savefig(path, format="png", dpi=100, metadata=PNG_METADATA)


def _xy(point) -> tuple[float, float]:
    x = float(point[0])
    y = float(point[1]) if len(point) > 1 else 0.0
    return x, y


def draw_chain(ax, chain: IntegerChain, title: str = "") -> None:
    """Edges as arrows along the chain's orientation, labelled by |multiplicity|.

    Only the first two coordinates are drawn.  Parallel edges are bent apart
    so each stays visible.
    """
    K = chain.complex
    pts = [_xy(v) for v in K.vertices]
    if pts:
        xs, ys = zip(*pts)
        ax.scatter(xs, ys, s=12, color="0.3", zorder=3)
        for v, (x, y) in enumerate(pts):
            ax.annotate(str(v), (x, y), textcoords="offset points", xytext=(3, 3), fontsize=7, color="0.3")
    rank: dict[frozenset, int] = {}
    for e, c in chain:
        t, h = K.edges[e]
        key = frozenset((t, h))
        k = rank.get(key, 0)
        rank[key] = k + 1
        rad = 0.0 if k == 0 else 0.25 * ((k + 1) // 2) * (1 if k % 2 else -1)
        a, b = (pts[t], pts[h]) if c > 0 else (pts[h], pts[t])
        color = "tab:blue" if c > 0 else "tab:red"
        ax.add_patch(
            FancyArrowPatch(
                a, b, arrowstyle="-|>", mutation_scale=10, connectionstyle=f"arc3,rad={rad}",
                color=color, linewidth=0.8 + 0.4 * min(abs(c), 5),
            )
        )
        # apex of the arc3 curve sits rad/2 along the right normal of a -> b
        dx, dy = b[0] - a[0], b[1] - a[1]
        mx, my = (a[0] + b[0]) / 2 + rad / 2 * dy, (a[1] + b[1]) / 2 - rad / 2 * dx
        ax.annotate(str(abs(c)), (mx, my), textcoords="offset points", xytext=(0, 3), fontsize=7, ha="center")
    bd = boundary(chain)
    for v, c in bd:
        ax.annotate(f"{c:+d}", pts[v], textcoords="offset points", xytext=(-6, -11), fontsize=7, color="tab:green")
    ax.set_title(title, fontsize=9)
    ax.set_aspect("equal", adjustable="datalim")
    ax.margins(0.15)
    ax.tick_params(labelsize=7)


def plot_repair(cert: RepairCertificate, path: str | Path) -> None:
    """Positive representative, repaired chain and the boundary-mass descent."""
    p = cert.p
    start = IntegerChain(cert.input.complex, 1, {e: c % p for e, c in cert.input})
    fig = Figure(figsize=(11, 3.6))
    ax0, ax1, ax2 = fig.subplots(1, 3)
    draw_chain(ax0, start, f"positive representative (p={p})")
    draw_chain(ax1, cert.output, "repaired")
    masses = [st.boundary_mass_before for st in cert.trace]
    masses.append(cert.trace[-1].boundary_mass_after if cert.trace else sum(abs(c) for _, c in boundary(start)))
    ax2.plot(range(len(masses)), masses, color="k", marker="o", markersize=3)
    bound = (p - 1) * sum(abs(select_residue(c, p)) for _, c in boundary(cert.input))
    ax2.axhline(bound, color="tab:orange", linestyle="--", label="(p-1) x p-mass of input boundary")
    ax2.xaxis.set_major_locator(MaxNLocator(integer=True))
    ax2.set_xlabel("iteration", fontsize=8)
    ax2.set_ylabel("boundary multiplicity sum", fontsize=8)
    ax2.set_title("descent", fontsize=9)
    ax2.legend(fontsize=7)
    ax2.tick_params(labelsize=7)
    fig.tight_layout()
    _save(fig, path)


def _grid_image(T: GridChain) -> np.ndarray:
    if T.ndim == 1:
        return T.theta[np.newaxis, :]
    if T.ndim == 2:
        return T.theta
    # middle slice through the leading axes
    idx = tuple(d // 2 for d in T.dims[:-2])
    return T.theta[idx]


def plot_grid(T: GridChain, p: int, path: str | Path) -> None:
    """Cell values of T beside its select representative (middle slice above 2D)."""
    sel = grid_select(T, p)
    fig = Figure(figsize=(8, 3.6))
    axes = fig.subplots(1, 2)
    for ax, G, title in ((axes[0], T, "values"), (axes[1], sel, f"select representative (p={p})")):
        img = _grid_image(G)
        lim = max(1, int(np.abs(img).max()))
        im = ax.imshow(img, cmap="RdBu_r", vmin=-lim, vmax=lim, interpolation="nearest")
        fig.colorbar(im, ax=ax, shrink=0.8)
        ax.set_title(title, fontsize=9)
        ax.tick_params(labelsize=7)
    fig.tight_layout()
    _save(fig, path)


def plot_sweep(rows: Sequence[dict], path: str | Path) -> None:
    """Boundary mass of the select representative against the p-mass of the
    boundary, one point per instance, with the line of slope p - 1."""
    fig = Figure(figsize=(4.8, 4))
    ax = fig.subplots()
    x = np.array([float(r["pmass_boundary"]) for r in rows])
    y = np.array([float(r["select_boundary_mass"]) for r in rows])
    ax.scatter(x, y, s=10, color="tab:blue", label="instances")
    if len(rows):
        p = rows[0]["p"]
        top = float(x.max()) if x.size else 1.0
        ax.plot([0, top], [0, (p - 1) * top], color="tab:orange", linestyle="--", label=f"slope p-1 = {p - 1}")
    ax.set_xlabel("p-mass of boundary", fontsize=8)
    ax.set_ylabel("boundary mass of select rep.", fontsize=8)
    ax.legend(fontsize=7)
    ax.tick_params(labelsize=7)
    fig.tight_layout()
    _save(fig, path)
