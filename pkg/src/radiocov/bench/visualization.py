"""Scaling charts using Plotly.

One figure per metric, one line per mode, NP on a log2 axis:
- Wall time (best of N)
- Speedup, with the ideal line
- Parallel efficiency
"""

from __future__ import annotations

import math
from pathlib import Path

import plotly
import plotly.graph_objects as go
import polars as pl

from radiocov.logging import get_logger

__all__ = ["plot_scaling", "save_scaling_html"]

logger = get_logger(__name__)

_MODE_COLORS = {"mw": "#00D9FF", "mwd": "#FF6B9D"}

_METRICS = {
    "wall_clock": ("best_s", "Wall time (s)"),
    "speedup": ("speedup", "Speedup"),
    "efficiency": ("efficiency", "Parallel efficiency"),
}


def _apply_theme(fig: go.Figure) -> go.Figure:
    fig.update_layout(
        template="plotly_dark",
        font={"family": "Arial, sans-serif", "size": 12, "color": "#E1E1E1"},
        plot_bgcolor="#1E1E1E",
        paper_bgcolor="#2D2D2D",
        hovermode="x unified",
        height=420,
    )
    fig.update_xaxes(type="log", dtick=math.log10(2), gridcolor="#333", title="Workers (NP)")
    fig.update_yaxes(gridcolor="#333", zeroline=False)
    return fig


def plot_scaling(frame: pl.DataFrame, title: str = "Scaling") -> dict[str, go.Figure]:
    """Wall time, speedup and efficiency against NP.

    Args:
        frame: Report as returned by :func:`radiocov.bench.report_frame` or ``load_report``
        title: Prefix of every chart title

    Returns:
        Figures keyed ``wall_clock``, ``speedup`` and ``efficiency``
    """
    figures: dict[str, go.Figure] = {}
    modes = sorted(frame.get_column("mode").unique().to_list())
    for key, (column, label) in _METRICS.items():
        fig = go.Figure()
        for mode in modes:
            rows = frame.filter((pl.col("mode") == mode) & pl.col(column).is_not_null()).sort("np")
            fig.add_trace(
                go.Scatter(
                    x=rows.get_column("np").to_list(),
                    y=rows.get_column(column).to_list(),
                    mode="lines+markers",
                    name=mode.upper(),
                    line={"color": _MODE_COLORS.get(mode, "#FFD166"), "width": 2},
                )
            )
        if key == "speedup":
            nps = sorted(frame.get_column("np").unique().to_list())
            fig.add_trace(
                go.Scatter(x=nps, y=nps, mode="lines", name="Ideal", line={"color": "#888", "dash": "dash"})
            )
        fig.update_layout(title=f"{title}: {label}", yaxis_title=label)
        figures[key] = _apply_theme(fig)
    return figures


def save_scaling_html(frame: pl.DataFrame, path: Path | str, title: str = "Scaling") -> Path:
    """Write all scaling charts into one self-contained HTML page."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    parts = [
        "<!DOCTYPE html>",
        "<html lang='en'>",
        "<head>",
        "<meta charset='UTF-8'>",
        f"<title>{title}</title>",
        f"<script>{plotly.offline.get_plotlyjs()}</script>",
        "</head>",
        "<body style='background:#2D2D2D'>",
    ]
    for key, fig in plot_scaling(frame, title).items():
        parts.append(
            plotly.io.to_html(
                fig,
                include_plotlyjs=False,
                full_html=False,
                div_id=f"{key}-chart",
                config={"displayModeBar": True, "displaylogo": False},
            )
        )
    parts.extend(["</body>", "</html>"])
    path.write_text("\n".join(parts), encoding="utf-8")
    logger.info("Wrote scaling charts to %s", path)
    return path
