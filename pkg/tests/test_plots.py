"""SVG chart emission: geometry, determinism, well-formedness."""

import re
from xml.dom import minidom

import numpy as np
import pytest

from swp import ValidationError, build_grid, constant_profile
from swp.plots import (
    HEIGHT,
    MARGIN_LEFT,
    MARGIN_TOP,
    PLOT_H,
    PLOT_W,
    WIDTH,
    cost_curve_plot,
    profile_plot,
    render_line_chart,
    x_to_px,
)


def polyline_points(svg_text):
    """All polylines as lists of (x, y) floats."""
    out = []
    for m in re.finditer(r'<polyline [^>]*points="([^"]+)"', svg_text):
        pts = [tuple(map(float, p.split(","))) for p in m.group(1).split()]
        out.append(pts)
    return out


def test_constant_series_is_horizontal_midline(tmp_path):
    xs = np.linspace(0.0, 10.0, 21)
    ys = np.full(21, 7.25)
    p = render_line_chart(tmp_path / "c.svg", "flat", [("s", xs, ys)])
    (pts,) = polyline_points(p.read_text())
    y_mid = MARGIN_TOP + PLOT_H / 2.0
    assert all(y == pytest.approx(y_mid, abs=0.01) for _, y in pts)
    assert pts[0][0] == pytest.approx(MARGIN_LEFT, abs=0.01)
    assert pts[-1][0] == pytest.approx(MARGIN_LEFT + PLOT_W, abs=0.01)


def test_decaying_series_has_increasing_pixel_y(tmp_path):
    xs = np.linspace(0.0, 50.0, 40)
    ys = 100.0 * np.exp(-0.1 * xs)
    p = render_line_chart(tmp_path / "d.svg", "decay", [("s", xs, ys)])
    (pts,) = polyline_points(p.read_text())
    py = np.array([y for _, y in pts])
    assert np.all(np.diff(py) > 0)  # svg y grows downward
    assert py[0] == pytest.approx(MARGIN_TOP, abs=0.01)
    assert py[-1] == pytest.approx(MARGIN_TOP + PLOT_H, abs=0.01)


def test_marker_lands_at_scaled_age(tmp_path):
    g = build_grid(20.0, 70.0, 0.5)
    d = 500.0 + (g.nodes - 53.5) ** 2
    p = cost_curve_plot(g.nodes, d, 53.5, tmp_path / "m.svg")
    text = p.read_text()
    m = re.search(r'<line class="marker" x1="([0-9.]+)"', text)
    assert m is not None
    expected = x_to_px(53.5, 20.0, 70.0)
    assert float(m.group(1)) == pytest.approx(expected, abs=0.005)


def test_svg_is_well_formed_with_fixed_viewport(tmp_path):
    g = build_grid(20.0, 70.0, 1.0)
    p = profile_plot(constant_profile(g, 3.0), tmp_path / "w.svg", "T <sub> & more", "y")
    doc = minidom.parseString(p.read_text())
    svg = doc.documentElement
    assert svg.tagName == "svg"
    assert svg.getAttribute("viewBox") == f"0 0 {WIDTH} {HEIGHT}"
    assert (WIDTH, HEIGHT) == (640, 400)


def test_same_inputs_give_identical_bytes(tmp_path):
    xs = np.linspace(0.0, 1.0, 11)
    ys = np.sin(xs)
    a = render_line_chart(tmp_path / "a.svg", "t", [("s", xs, ys)], marker_x=0.5)
    b = render_line_chart(tmp_path / "b.svg", "t", [("s", xs, ys)], marker_x=0.5)
    assert a.read_bytes() == b.read_bytes()


def test_empty_series_rejected(tmp_path):
    with pytest.raises(ValidationError):
        render_line_chart(tmp_path / "e.svg", "t", [])
    with pytest.raises(ValidationError):
        render_line_chart(tmp_path / "e.svg", "t", [("s", np.array([]), np.array([]))])


def test_non_finite_values_rejected(tmp_path):
    xs = np.array([0.0, 1.0])
    ys = np.array([1.0, np.nan])
    with pytest.raises(ValidationError):
        render_line_chart(tmp_path / "n.svg", "t", [("s", xs, ys)])
