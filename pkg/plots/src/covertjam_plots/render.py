"""Render covertjam CSV reports into figures.

Three kinds: the two-curve strategy-switch plot (fig3), the scheme comparison
plot (fig4), and a 3-d direction diagram from an optimize dump. Output files
are written atomically: a malformed input raises before anything is created.
"""

import os
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import Report, SchemaError, read_report

KINDS = ("fig3", "fig4", "direction")


@dataclass
class FigureSpec:
    input_csv: Path
    figure_kind: str
    output: Path
    title: str = ""

    def __post_init__(self):
        if self.figure_kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.figure_kind!r}")


def _caption(metadata: dict) -> str:
    parts = []
    for key, value in metadata.items():
        if len(value) > 40:
            value = value[:18] + "..." + value[-18:]
        parts.append(f"{key}={value}")
    return ", ".join(parts)


def build_fig3(report: Report, title: str = ""):
    """Two mean curves with stderr bands plus the reported crossover marker."""
    rows = sorted(report.rows)
    sigma = np.array([r[0] for r in rows])
    null_mean = np.array([r[1] for r in rows])
    null_se = np.array([r[2] for r in rows])
    full_mean = np.array([r[3] for r in rows])
    full_se = np.array([r[4] for r in rows])

    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    ax.plot(sigma, null_mean, label="null-space (d=N-1)", color="tab:blue")
    ax.fill_between(sigma, null_mean - null_se, null_mean + null_se, color="tab:blue", alpha=0.25, lw=0)
    ax.plot(sigma, full_mean, label="full-space (d=N)", color="tab:orange")
    ax.fill_between(sigma, full_mean - full_se, full_mean + full_se, color="tab:orange", alpha=0.25, lw=0)

    crossover = report.metadata.get("crossover", "")
    if crossover:
        ax.axvline(float(crossover), color="black", ls="--", lw=1.0,
                   label=f"crossover {float(crossover):.3g}")
        lo, hi = report.metadata.get("crossover_ci_low", ""), report.metadata.get("crossover_ci_high", "")
        if lo and hi:
            ax.axvspan(float(lo), float(hi), color="gray", alpha=0.2, lw=0)
    ax.set_xlabel(r"$\sigma$ (noise-to-jam ratio)")
    ax.set_ylabel("normalized objective (mean)")
    ax.set_title(title or "No-CSI strategy switch: null-space vs full-space")
    ax.legend()
    fig.text(0.5, 0.005, _caption(report.metadata), ha="center", fontsize=6, color="gray")
    fig.tight_layout(rect=(0, 0.03, 1, 1))
    return fig


def build_fig4(report: Report, title: str = ""):
    """One mean curve with a stderr band per scheme tag."""
    by_scheme = {}
    for sigma, scheme, mean, stderr, *_ in report.rows:
        by_scheme.setdefault(scheme, []).append((sigma, mean, stderr))
    n, m = report.rows[0][5], report.rows[0][6]

    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    order = sorted(by_scheme, key=lambda t: (t != "global", t))
    for scheme in order:
        pts = np.array(sorted(by_scheme[scheme]))
        ax.plot(pts[:, 0], pts[:, 1], label=scheme)
        ax.fill_between(pts[:, 0], pts[:, 1] - pts[:, 2], pts[:, 1] + pts[:, 2], alpha=0.2, lw=0)
    ax.set_xlabel(r"$\sigma$ (noise-to-jam ratio)")
    ax.set_ylabel("normalized objective (mean)")
    ax.set_title(title or f"Scheme comparison, N={n}, M={m}")
    ax.legend()
    fig.text(0.5, 0.005, _caption(report.metadata), ha="center", fontsize=6, color="gray")
    fig.tight_layout(rect=(0, 0.03, 1, 1))
    return fig


def _phase_aligned_real(v: np.ndarray) -> np.ndarray:
    """Real-part representative of a complex direction: rotate the global
    phase so the largest entry is real-positive, then take real parts."""
    pivot = v[int(np.argmax(np.abs(v)))]
    w = v * (pivot.conjugate() / abs(pivot))
    real = np.real(w)
    return real / np.linalg.norm(real)


def _collect_vector(report: Report, record: str, label: str) -> np.ndarray:
    entries = {}
    for rec, lab, i, j, re, im in report.rows:
        if rec == record and lab == label:
            entries[(i, j)] = complex(re, im)
    if not entries:
        raise SchemaError(f"optimize dump is missing the {label!r} {record}")
    return entries


def build_direction(report: Report, title: str = ""):
    """3-d arrows for the optimal AN direction, Willie's channel direction,
    and the dominant jammer-to-Bob direction (N = 3 only)."""
    n = int(report.metadata.get("N", "0"))
    if n != 3:
        raise SchemaError(f"direction rendering needs N=3, dump has N={n}")
    v_star = np.array([_collect_vector(report, "vector", "v_star")[(i, -1)] for i in range(3)])
    h_jw = np.array([_collect_vector(report, "vector", "h_jw")[(i, -1)] for i in range(3)])
    hjb_entries = _collect_vector(report, "matrix", "H_jb")
    m = int(report.metadata.get("M", "1"))
    h_jb = np.array([[hjb_entries[(i, j)] for j in range(3)] for i in range(m)])
    bob_dir = np.linalg.svd(h_jb)[2][0].conj()

    arrows = [
        (_phase_aligned_real(v_star), "AN direction $v^*$", "tab:red"),
        (_phase_aligned_real(h_jw / np.linalg.norm(h_jw)), "toward Willie $h_{jw}$", "tab:orange"),
        (_phase_aligned_real(bob_dir), "toward Bob (dominant)", "tab:blue"),
    ]
    fig = plt.figure(figsize=(6.4, 5.6))
    ax = fig.add_subplot(projection="3d")
    for vec, label, color in arrows:
        ax.quiver(0, 0, 0, *vec, color=color, label=label, arrow_length_ratio=0.12)
    lim = 1.05
    ax.set_xlim(-lim, lim), ax.set_ylim(-lim, lim), ax.set_zlim(-lim, lim)
    ax.set_title(title or "Optimal AN direction (phase-aligned real parts)")
    metrics = {lab: re for rec, lab, i, j, re, im in report.rows if rec == "metric"}
    note = ", ".join(f"{k}={v:.3f}" for k, v in sorted(metrics.items()))
    ax.legend(loc="upper left", fontsize=8)
    fig.text(0.5, 0.035, note, ha="center", fontsize=8)
    fig.text(0.5, 0.008, _caption(report.metadata), ha="center", fontsize=6, color="gray")
    return fig


_BUILDERS = {"fig3": ("fig3", build_fig3), "fig4": ("fig4", build_fig4), "direction": ("optimize", build_direction)}


def render(spec: FigureSpec) -> Path:
    """Validate the CSV against its schema, build the figure, and write the
    image atomically (no partial file on failure)."""
    csv_kind, builder = _BUILDERS[spec.figure_kind]
    report = read_report(spec.input_csv, expected_kind=csv_kind)
    fig = builder(report, title=spec.title)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fmt = (out.suffix[1:] or "png").lower()
    tmp = out.with_name(out.name + ".part")
    try:
        fig.savefig(tmp, format=fmt, dpi=150)
        os.replace(tmp, out)
    finally:
        plt.close(fig)
        if tmp.exists():
            tmp.unlink()
    return out
