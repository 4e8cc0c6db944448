"""Rendering of figure-recipe tables to PNG files (Agg backend only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

MARKERS = "osd^v<>ph"


def _group(rows: list[dict], key: str) -> dict[object, list[dict]]:
    out: dict[object, list[dict]] = {}
    for row in rows:
        out.setdefault(row[key], []).append(row)
    return out


def _rate_plot(ax, rows, group_key, x_key, y_key, asymptote_key=None):
    for i, (label, grp) in enumerate(_group(rows, group_key).items()):
        xs = [r[x_key] for r in grp]
        ys = [r[y_key] for r in grp]
        ax.plot(xs, ys, marker=MARKERS[i % len(MARKERS)], ms=3, label=str(label))
        if asymptote_key and grp:
            ax.axhline(grp[0][asymptote_key], ls=":", lw=0.8, color="gray")
    ax.set_xlabel(x_key)
    ax.set_ylabel(y_key)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)


def _cer_plot(ax, rows, group_key, extra_series=()):
    for i, (label, grp) in enumerate(_group(rows, group_key).items()):
        xs = [r["sinr_db"] for r in grp]
        ax.semilogy(
            xs, [max(r["cer"], 1e-12) for r in grp],
            marker=MARKERS[i % len(MARKERS)], ms=4, label=f"{label} (MC)",
        )
        for series in extra_series:
            if grp[0].get(series) is None:
                continue
            ax.semilogy(
                xs, [max(r[series], 1e-12) for r in grp],
                ls="--", lw=1, label=f"{label} ({series})",
            )
    ax.set_xlabel("SINR (dB)")
    ax.set_ylabel("codeword error rate")
    ax.legend(fontsize=7)
    ax.grid(True, which="both", alpha=0.3)


def render_figure(result, png_path: str) -> str:
    """Render one recipe table; returns the written path."""
    name = result.name
    rows = result.rows
    fig, ax = plt.subplots(figsize=(6.4, 4.4), dpi=150)
    if name == "fig2":
        _rate_plot(ax, rows, "family", "length", "code_rate", "asymptote")
    elif name == "fig3":
        _rate_plot(ax, rows, "rho", "length", "code_rate", "asymptote")
        for label, grp in _group(rows, "rho").items():
            xs = [r["length"] for r in grp]
            ax.plot(xs, [r["lower_bound"] for r in grp], ls="--", lw=0.8)
            ax.plot(xs, [r["upper_bound"] for r in grp], ls="--", lw=0.8)
    elif name in ("fig4", "fig5"):
        _rate_plot(ax, rows, "length", "n_levels", "rate")
    elif name == "fig6":
        _cer_plot(ax, rows, "weights", extra_series=("chernoff",))
    elif name == "fig7":
        _cer_plot(ax, rows, "n_levels")
    elif name == "fig8":
        _cer_plot(
            ax, rows, "curve",
            extra_series=("chernoff", "skellam", "orderstat_lower", "orderstat_upper"),
        )
    elif name == "fig9":
        for i, (label, grp) in enumerate(_group(rows, "config").items()):
            xs = [r["length"] for r in grp]
            ax.semilogy(
                xs, [max(r["cer"], 1e-12) for r in grp],
                marker=MARKERS[i % len(MARKERS)], ms=4, label=str(label),
            )
        ax.set_xlabel("codeword length")
        ax.set_ylabel("codeword error rate at 10 dB")
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.3)
    elif name == "fig10-analog":
        for i, (label, grp) in enumerate(_group(rows, "detector").items()):
            xs = [r["length"] for r in grp]
            ax.semilogy(
                xs, [max(r["ber"], 1e-12) for r in grp],
                marker=MARKERS[i % len(MARKERS)], ms=4, label=str(label),
            )
        ax.set_xlabel("codeword length")
        ax.set_ylabel("bit error rate")
        ax.legend(fontsize=8)
        ax.grid(True, which="both", alpha=0.3)
    else:  # fallback: first two numeric columns
        xs = [r[result.header[0]] for r in rows]
        ys = [r[result.header[1]] for r in rows]
        ax.plot(xs, ys, marker="o", ms=3)
    ax.set_title(name)
    fig.tight_layout()
    fig.savefig(png_path)
    plt.close(fig)
    return png_path
