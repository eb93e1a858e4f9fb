"""The three figure kinds: decay log-log plots, phase-space heatmaps,
and classifier verdict panels.

Reference slopes on decay figures are always drawn from the analytic
prediction supplied by the caller (1 - delta for wave-operator tails,
-delta for remainder norms), never from a fit of the plotted data, so a
disagreement is visible on the figure itself.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, read_csv_table

TAILS_HEADER = ["T", "tail_norm"]
REMAINDER_HEADER = ["t", "masked_norm", "total_norm", "ratio"]
CLASSIFY_HEADER = ["t", "mask_a", "mask_R", "masked_norm", "ratio", "verdict_contrib"]


def _peek_header(path):
    try:
        with open(path, newline="") as fh:
            first = fh.readline()
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}")
    return first.strip().split(",") if first.strip() else []


def _save(fig, out_path):
    fig.savefig(out_path, dpi=150, metadata={"Software": None})
    plt.close(fig)


def decay_loglog(inputs: list, out_path, delta: float) -> None:
    """Log-log decay curves with the predicted power-law reference line.

    Each input is a tails CSV (T,tail_norm; predicted slope 1 - delta) or a
    remainder CSV (t,...; predicted slope -delta); the kind is chosen by the
    header, and mixing kinds in one figure is allowed.
    """
    if not inputs:
        raise SchemaError("decay_loglog needs at least one input CSV")
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    t_all = []
    for path in inputs:
        header = _peek_header(path)
        if header == TAILS_HEADER:
            cols = read_csv_table(path, TAILS_HEADER)
            t, y = cols["T"], cols["tail_norm"]
            slope = 1.0 - delta
            label = f"{path}" if len(inputs) > 1 else "Cauchy tail"
        elif header == REMAINDER_HEADER:
            cols = read_csv_table(path, REMAINDER_HEADER)
            t, y = cols["t"], cols["masked_norm"]
            slope = -delta
            label = f"{path}" if len(inputs) > 1 else "masked remainder"
        else:
            raise SchemaError(
                f"{path}: header {header} matches neither {TAILS_HEADER} "
                f"nor {REMAINDER_HEADER}"
            )
        keep = (t > 0) & (y > 0)
        if keep.sum() < 2:
            raise SchemaError(f"{path}: fewer than two positive samples to plot")
        t, y = t[keep], y[keep]
        ax.loglog(t, y, "o-", label=label)
        # predicted reference line anchored at the first sample
        ref = y[0] * (t / t[0]) ** slope
        ax.loglog(t, ref, "k--", linewidth=1.0,
                  label=f"predicted slope {slope:g}")
        t_all.append(t)
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, out_path)


def phase_heatmap(field_path, out_path, mask_a: float = None, mask_R: float = None) -> None:
    """|W(x, xi)| heatmap for a one-dimensional field, with the mask
    boundary lines |xi| = a and |x| = R overlaid when given."""
    from .io import load_field_file

    field = load_field_file(field_path)
    if field["dim"] != 1:
        raise SchemaError(
            f"{field_path}: phase_heatmap renders one-dimensional fields, got dim={field['dim']}"
        )
    mag = np.abs(field["values"])  # (nx, nxi)
    x, xi = field["x_axis"], field["xi_axis"]
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    im = ax.imshow(
        mag.T,
        origin="lower",
        aspect="auto",
        extent=(x[0], x[-1], xi[0], xi[-1]),
        cmap="magma",
    )
    fig.colorbar(im, ax=ax, label="|W(x, ξ)|")
    if mask_a is not None:
        for s in (-1, 1):
            ax.axhline(s * mask_a, color="cyan", linewidth=1.0, linestyle="--")
    if mask_R is not None:
        for s in (-1, 1):
            ax.axvline(s * mask_R, color="cyan", linewidth=1.0, linestyle="--")
    ax.set_xlabel("x")
    ax.set_ylabel("ξ")
    _save(fig, out_path)


def verdict_panel(classify_path, out_path) -> None:
    """Table figure: one row per mask with its final ratio and verdict
    contribution from a classifier CSV."""
    cols = read_csv_table(classify_path, CLASSIFY_HEADER)
    rows = {}
    for a, second, t, ratio, contrib in zip(
        cols["mask_a"], cols["mask_R"], cols["t"], cols["ratio"], cols["verdict_contrib"]
    ):
        key = (a, second)
        prev = rows.get(key)
        if prev is None or t >= prev[0]:
            rows[key] = (t, ratio, contrib)
    table = [
        [f"{a:g}", f"{second:g}", f"{ratio:.3g}", contrib]
        for (a, second), (_, ratio, contrib) in sorted(rows.items())
    ]
    fig, ax = plt.subplots(figsize=(6.0, 0.6 + 0.35 * len(table)))
    ax.axis("off")
    tab = ax.table(
        cellText=table,
        colLabels=["a", "R / sigma", "final ratio", "verdict"],
        loc="center",
        cellLoc="center",
    )
    tab.auto_set_font_size(False)
    tab.set_fontsize(9)
    _save(fig, out_path)
