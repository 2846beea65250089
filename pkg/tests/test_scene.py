import re
import xml.etree.ElementTree as ET

import pytest

from adamotif import DomainError, MotifEdge, MotifScene, load_scene, render
from adamotif.layout import ABSENT, LARGE, MEDIUM, RINGED, SMALL, DecoratedLayout, NodeEncoding
from adamotif.motif import Motif, Polygon
from adamotif.scene import RING_SCALE, edge_stroke, scene_from_dict, scene_to_dict

SVG = "{http://www.w3.org/2000/svg}"


def square_motif(community, anchor, enc=None):
    contour = Polygon(((-10.0, -10.0), (10.0, -10.0), (10.0, 10.0), (-10.0, 10.0)))
    pos = {"a": (-4.0, 0.0), "b": (4.0, 0.0)}
    enc = enc or {"a": NodeEncoding(), "b": NodeEncoding()}
    internal = DecoratedLayout(pos, enc, frozenset({("a", "b")}), (("a", "b"),))
    return Motif(community, community, "#1f77b4", contour, internal, 1.0, 2, anchor, 400.0, "a")


def toy_scene(count=5):
    ms = (
        square_motif(0, (50.0, 50.0), {"a": NodeEncoding(RINGED, 3), "b": NodeEncoding(ABSENT)}),
        square_motif(1, (150.0, 50.0)),
    )
    edge = MotifEdge((0, 1), count, 1.0, ((60.0, 50.0), (100.0, 55.0), (140.0, 50.0)))
    return MotifScene(ms, (edge,), (200.0, 100.0), {"name": "toy", "node_radius": 3.0})


def svg_root(data: bytes):
    return ET.fromstring(data)


def test_m_contour_paths(lesmis_run):
    scene, _ = lesmis_run
    root = svg_root(render(scene, "svg"))
    contours = [p for p in root.iter(f"{SVG}path") if p.get("class") == "motif-contour"]
    assert len(contours) == len(scene.motifs)
    for p, m in zip(contours, scene.motifs):
        assert p.get("fill") == m.color and p.get("fill-opacity") == "0.35" and p.get("stroke-width") == "1.5"
    edges = [p for p in root.iter(f"{SVG}path") if p.get("class") == "motif-edge"]
    assert len(edges) == len(scene.edges)


def test_json_round_trip(lesmis_run):
    scene, _ = lesmis_run
    data = render(scene, "json")
    back = load_scene(data)
    assert back == scene
    assert render(back, "json") == data
    assert render(back, "svg") == render(scene, "svg")


def test_byte_deterministic(lesmis_run):
    scene, _ = lesmis_run
    assert render(scene, "svg") == render(scene, "svg")


def test_count_five_label_at_threshold_five():
    root = svg_root(render(toy_scene(5), "svg"))
    labels = [t.text for t in root.iter(f"{SVG}text")]
    assert labels == ["5"]
    root = svg_root(render(toy_scene(4), "svg"))
    assert [t.text for t in root.iter(f"{SVG}text")] == []
    assert [t.text for t in svg_root(render(toy_scene(4), "svg", label_threshold=1)).iter(f"{SVG}text")] == ["4"]


def test_node_encodings_drawn():
    root = svg_root(render(toy_scene(), "svg"))
    circles = list(root.iter(f"{SVG}circle"))
    absent = [c for c in circles if c.get("class") == "node-absent"]
    assert len(absent) == 1 and absent[0].get("fill") == "#ffffff" and absent[0].get("stroke-dasharray")
    rings = [c for c in circles if (c.get("class") or "").startswith("node-ring")]
    assert len(rings) == 1 and "ring-medium" in rings[0].get("class")
    # annulus from r to 1.8 r drawn as a stroke centred between them
    assert float(rings[0].get("r")) == pytest.approx(3.0 * 1.4)
    assert float(rings[0].get("stroke-width")) == pytest.approx(3.0 * 0.8)
    dashed = [l for l in root.iter(f"{SVG}line") if l.get("stroke-dasharray")]
    assert len(dashed) == 2


def test_ring_scale_is_increasing():
    assert RING_SCALE[SMALL] < RING_SCALE[MEDIUM] < RING_SCALE[LARGE]


def test_edge_luminance_range():
    assert edge_stroke(0.0) == "#d9d9d9"  # 85% of 255 = 216.75 -> 217
    assert edge_stroke(1.0) == "#404040"  # 25% of 255 = 63.75 -> 64
    assert edge_stroke(2.0) == edge_stroke(1.0)


def test_scene_validation_and_schema():
    with pytest.raises(DomainError):
        MotifScene(toy_scene().motifs, (MotifEdge((0, 3), 1, 0.5),), (10.0, 10.0))
    d = scene_to_dict(toy_scene())
    assert d["schema_version"] == 1
    d["schema_version"] = 2
    with pytest.raises(DomainError):
        scene_from_dict(d)
    with pytest.raises(DomainError):
        render(toy_scene(), "png")


def test_numbers_have_two_decimals():
    text = render(toy_scene(), "svg").decode()
    nums = re.findall(r'd="([^"]+)"', text)
    assert all(re.fullmatch(r"-?\d+\.\d\d", x) for d in nums for x in re.findall(r"-?[\d.]+", d))
