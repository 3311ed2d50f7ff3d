# svg_plot.py

import math
import xml.etree.ElementTree as ET
from typing import Dict, Sequence

from wavelet_amp.utils.logger import logger

log = logger(__name__)

WIDTH = 800
HEIGHT = 400
MARGIN_LEFT = 70
MARGIN_RIGHT = 130
MARGIN_TOP = 40
MARGIN_BOTTOM = 50

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _num(value: float) -> str:
    # Fixed precision keeps the output byte-identical for identical inputs.
    text = f"{value:.2f}"
    return "0.00" if text == "-0.00" else text


def svgroot(width: int, height: int) -> ET.Element:
    return ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        version="1.1",
        width=f"{width}px",
        height=f"{height}px",
        viewBox=f"0 0 {width} {height}",
    )


def _text(parent: ET.Element, x: float, y: float, content: str, **attrs) -> ET.Element:
    element = ET.SubElement(parent, "text", x=_num(x), y=_num(y), **attrs)
    element.text = content
    return element


def _range(values: Sequence[float]):
    low, high = min(values), max(values)
    if low == high:
        pad = 1.0 if low == 0.0 else abs(low) * 0.1
        return low - pad, high + pad
    return low, high


def render_lines(
    x: Sequence[float],
    series: Dict[str, Sequence[float]],
    path: str,
    title: str = "",
    x_label: str = "t",
    y_label: str = "",
):
    """
    Write a standalone line plot: one polyline per series, axes with end-point
    tick labels, and a legend. Series are drawn in the order given.
    """
    if len(x) == 0:
        raise ValueError("Cannot plot an empty series.")
    if not series:
        raise ValueError("At least one series is required.")
    for name, values in series.items():
        if len(values) != len(x):
            raise ValueError(f"Series '{name}' has {len(values)} points, x has {len(x)}.")

    finite = [v for values in series.values() for v in values if math.isfinite(v)]
    if not finite:
        raise ValueError("All plotted values are non-finite.")
    x_low, x_high = _range(list(x))
    y_low, y_high = _range(finite)

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(value: float) -> float:
        return MARGIN_LEFT + (value - x_low) / (x_high - x_low) * plot_w

    def py(value: float) -> float:
        return MARGIN_TOP + (y_high - value) / (y_high - y_low) * plot_h

    svg = svgroot(WIDTH, HEIGHT)
    ET.SubElement(svg, "rect", x="0", y="0", width=str(WIDTH), height=str(HEIGHT), fill="white")
    if title:
        _text(svg, WIDTH / 2, MARGIN_TOP / 2 + 5, title, **{"text-anchor": "middle", "font-size": "16"})

    axes = ET.SubElement(svg, "g", stroke="black", **{"stroke-width": "1"})
    bottom = MARGIN_TOP + plot_h
    ET.SubElement(axes, "line", x1=_num(MARGIN_LEFT), y1=_num(bottom), x2=_num(MARGIN_LEFT + plot_w), y2=_num(bottom))
    ET.SubElement(axes, "line", x1=_num(MARGIN_LEFT), y1=_num(MARGIN_TOP), x2=_num(MARGIN_LEFT), y2=_num(bottom))

    labels = ET.SubElement(svg, "g", **{"font-size": "12", "font-family": "sans-serif"})
    _text(labels, MARGIN_LEFT, bottom + 18, f"{x_low:.4g}", **{"text-anchor": "middle"})
    _text(labels, MARGIN_LEFT + plot_w, bottom + 18, f"{x_high:.4g}", **{"text-anchor": "middle"})
    _text(labels, MARGIN_LEFT - 6, bottom, f"{y_low:.4g}", **{"text-anchor": "end"})
    _text(labels, MARGIN_LEFT - 6, MARGIN_TOP + 4, f"{y_high:.4g}", **{"text-anchor": "end"})
    _text(labels, MARGIN_LEFT + plot_w / 2, HEIGHT - 12, x_label, **{"text-anchor": "middle"})
    if y_label:
        _text(
            labels, 18, MARGIN_TOP + plot_h / 2, y_label,
            **{"text-anchor": "middle", "transform": f"rotate(-90 18 {_num(MARGIN_TOP + plot_h / 2)})"},
        )

    lines = ET.SubElement(svg, "g", fill="none", **{"stroke-width": "1.5"})
    legend = ET.SubElement(svg, "g", **{"font-size": "12", "font-family": "sans-serif"})
    for i, (name, values) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        points = " ".join(
            f"{_num(px(xv))},{_num(py(yv))}" for xv, yv in zip(x, values) if math.isfinite(yv)
        )
        ET.SubElement(lines, "polyline", points=points, stroke=color)

        row_y = MARGIN_TOP + 10 + i * 18
        ET.SubElement(
            legend, "line",
            x1=_num(WIDTH - MARGIN_RIGHT + 15), y1=_num(row_y),
            x2=_num(WIDTH - MARGIN_RIGHT + 40), y2=_num(row_y),
            stroke=color, **{"stroke-width": "2"},
        )
        _text(legend, WIDTH - MARGIN_RIGHT + 46, row_y + 4, name)

    ET.ElementTree(svg).write(path, encoding="utf-8", xml_declaration=True)
    log.debug(f"wrote {path} with {len(series)} series")


def render_svg(trace: Sequence, columns: Sequence[str], path: str, title: str = ""):
    """Plot the selected trace columns against t."""
    if not trace:
        raise ValueError("Cannot render an empty trace.")
    if not columns:
        raise ValueError("At least one column is required.")
    known = trace[0].as_dict()
    for column in columns:
        if column not in known or column in ("k", "t", "applied"):
            raise ValueError(f"unknown plot column: {column}")

    t = [row.t for row in trace]
    series = {}
    for column in columns:
        values = []
        for row in trace:
            value = getattr(row, column)
            values.append(float("nan") if value is None else float(value))
        series[column] = values
    render_lines(t, series, path, title=title or ", ".join(columns), x_label="t")
