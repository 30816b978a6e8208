import re
import xml.etree.ElementTree as ET

import numpy as np

from fdivrange.bounds import d2d3_boundary
from fdivrange.generators import resolve
from fdivrange.jointrange import GridSpec, sample_atlas
from fdivrange.svg import render_atlas_svg

NS = "{http://www.w3.org/2000/svg}"


def small_atlas(fs, gs):
    f = resolve(fs)
    g = f if fs == gs else resolve(gs)
    return sample_atlas(f, g, GridSpec(resolution=16))


def test_svg_is_well_formed_with_fixed_viewport():
    svg = render_atlas_svg(small_atlas("tv", "js"), title="(tv, js)")
    root = ET.fromstring(svg)
    assert root.get("width") == "800" and root.get("height") == "600"
    assert root.get("viewBox") == "0 0 800 600"
    texts = [t.text for t in root.iter(NS + "text")]
    assert "D_tv" in texts and "D_js" in texts and "(tv, js)" in texts


def test_hull_outline_and_scatter_present():
    root = ET.fromstring(render_atlas_svg(small_atlas("tv", "js")))
    polygons = list(root.iter(NS + "polygon"))
    assert len(polygons) == 1
    assert len(list(root.iter(NS + "rect"))) > 50
    assert not list(root.iter(NS + "polyline"))


def test_exact_curve_is_dashed():
    root = ET.fromstring(render_atlas_svg(small_atlas("chi2", "power:3"), exact=d2d3_boundary))
    (line,) = list(root.iter(NS + "polyline"))
    assert line.get("stroke-dasharray")
    # the curve starts at the origin of the plot
    first = line.get("points").split()[0]
    assert first == "70,540"


def test_coordinates_rounded_to_three_decimals():
    svg = render_atlas_svg(small_atlas("hellinger", "lecam"))
    for num in re.findall(r"-?\d+\.\d+", svg):
        assert len(num.split(".")[1]) <= 3


def test_rendering_is_byte_deterministic():
    a = render_atlas_svg(small_atlas("kl", "tv"))
    b = render_atlas_svg(small_atlas("kl", "tv"))
    assert a == b


def test_same_generator_plot_is_a_diagonal():
    root = ET.fromstring(render_atlas_svg(small_atlas("js", "js")))
    pts = np.array([[float(v) for v in p.split(",")] for p in next(root.iter(NS + "polygon")).get("points").split()])
    # plot coordinates (x - 70) / 700 and (540 - y) / 510 are equal on a diagonal
    np.testing.assert_allclose((pts[:, 0] - 70) / 700, (540 - pts[:, 1]) / 510, atol=2e-6)
