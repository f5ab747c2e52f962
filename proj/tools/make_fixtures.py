#!/usr/bin/env python3
"""Regenerate the synthetic GeoJSON fixtures under tests/fixtures.

Output is a pure function of the seeds below, so rerunning rewrites identical files.
"""
import argparse
import json
import math
import pathlib
import random

SYLLABLES = ["ka", "lo", "ver", "mi", "ton", "sa", "ber", "ly", "nor", "wick", "ash", "den", "ford", "ra", "hol", "me"]


def name(rng, lo=2, hi=4):
    return "".join(rng.choice(SYLLABLES) for _ in range(rng.randint(lo, hi))).capitalize()


def r3(v):
    return round(v, 3)


def blob(rng, cx, cy, radius, vertices=None):
    """Star-shaped ring around (cx, cy); simple by construction."""
    k = vertices or rng.randint(6, 10)
    step = 2 * math.pi / k
    ring = []
    for i in range(k):
        a = i * step + rng.uniform(-0.3, 0.3) * step
        r = radius * rng.uniform(0.65, 1.0)
        ring.append([r3(cx + r * math.cos(a)), r3(cy + r * math.sin(a))])
    ring.append(ring[0])
    return ring


def walk(rng, x, y, extent, steps):
    heading = rng.uniform(0, 2 * math.pi)
    pts = [[r3(x), r3(y)]]
    for _ in range(steps):
        heading += rng.uniform(-0.6, 0.6)
        d = rng.uniform(30, 60)
        x = min(max(x + d * math.cos(heading), 0), extent[0])
        y = min(max(y + d * math.sin(heading), 0), extent[1])
        if [r3(x), r3(y)] != pts[-1]:
            pts.append([r3(x), r3(y)])
    return pts


def feature(fid, geometry, label, **props):
    p = {"name": label}
    p.update(props)
    return {"type": "Feature", "id": fid, "properties": p, "geometry": geometry}


def collection(features):
    return {"type": "FeatureCollection", "features": features}


def mixed_map(seed, areas, lines, points, extent, cell, label_height, char_width):
    """Polygons on a jittered grid, random-walk lines and scattered points."""
    rng = random.Random(seed)
    cols = int(extent[0] // cell)
    rows = int(extent[1] // cell)
    cells = [(c, r) for r in range(rows) for c in range(cols)]
    if areas > len(cells):
        raise ValueError("extent too small for the requested polygon count")
    rng.shuffle(cells)
    out = []
    sizes = {"label_height": label_height, "label_char_width": char_width}
    for i, (c, r) in enumerate(sorted(cells[:areas], key=lambda t: (t[1], t[0]))):
        cx = (c + 0.5) * cell + rng.uniform(-0.08, 0.08) * cell
        cy = (r + 0.5) * cell + rng.uniform(-0.08, 0.08) * cell
        ring = blob(rng, cx, cy, 0.42 * cell)
        out.append(feature(f"a{i}", {"type": "Polygon", "coordinates": [ring]}, name(rng), **sizes))
    for i in range(lines):
        pts = walk(rng, rng.uniform(0, extent[0]), rng.uniform(0, extent[1]), extent, rng.randint(3, 7))
        out.append(feature(f"l{i}", {"type": "LineString", "coordinates": pts}, name(rng, 2, 3) + " Rd", **sizes))
    for i in range(points):
        p = [r3(rng.uniform(0, extent[0])), r3(rng.uniform(0, extent[1]))]
        out.append(feature(f"p{i}", {"type": "Point", "coordinates": p}, name(rng), **sizes))
    return collection(out)


def shortcut10():
    """Five far-apart squares with short labels and a stack of five abutting squares with long ones."""
    out = []
    square = lambda x, y, s: [[x, y], [x + s, y], [x + s, y + s], [x, y + s], [x, y]]
    for i in range(5):
        out.append(feature(f"iso{i}", {"type": "Polygon", "coordinates": [square(i * 400.0, 0.0, 100.0)]},
                           f"Island{i}", label_height=8, label_char_width=5))
    for i in range(5):
        out.append(feature(f"row{i}", {"type": "Polygon", "coordinates": [square(0.0, 500.0 + i * 30.0, 30.0)]},
                           f"Neighbourhood{i}", label_height=8, label_char_width=5))
    return collection(out)


def small():
    tiny = collection([
        feature("town", {"type": "Point", "coordinates": [10.0, 10.0]}, "Springfield",
                label_height=2, label_char_width=1),
        feature("river", {"type": "LineString", "coordinates": [[0.0, 0.0], [20.0, 5.0], [40.0, 0.0]]}, "River",
                label_height=2, label_char_width=1),
        feature("park", {"type": "Polygon", "coordinates": [[[30.0, 20.0], [60.0, 20.0], [60.0, 40.0], [30.0, 40.0],
                                                             [30.0, 20.0]]]}, "Park", label_height=2,
                label_char_width=1),
    ])
    hole = collection([
        feature("lake", {"type": "Polygon", "coordinates": [
            [[0, 0], [80, 0], [80, 20], [0, 20], [0, 0]],
            [[30, 5], [50, 5], [50, 15], [30, 15], [30, 5]]]}, "Lake"),
    ])
    multipart = collection([
        feature("isles", {"type": "MultiPolygon", "coordinates": [
            [[[0, 0], [40, 0], [40, 20], [0, 20], [0, 0]]],
            [[[100, 0], [140, 0], [140, 20], [100, 20], [100, 0]]]]}, "Isles"),
        feature("canal", {"type": "MultiLineString", "coordinates": [
            [[0, 50], [60, 50]], [[80, 50], [140, 60]]]}, "Canal"),
    ])
    label_only = collection([
        {"type": "Feature", "properties": {"label": "Summit", "name": "ignored"},
         "geometry": {"type": "Point", "coordinates": [1.5, 2.5]}},
    ])
    empty = collection([])
    single_vertex = collection([
        feature("stub", {"type": "LineString", "coordinates": [[1, 1]]}, "Stub"),
    ])
    missing_label = collection([
        {"type": "Feature", "id": "anon", "properties": {"kind": "hill"},
         "geometry": {"type": "Point", "coordinates": [0, 0]}},
    ])
    unsupported = collection([
        feature("cluster", {"type": "MultiPoint", "coordinates": [[0, 0], [1, 1]]}, "Cluster"),
    ])
    return {
        "tiny.geojson": tiny,
        "hole.geojson": hole,
        "multipart.geojson": multipart,
        "label_property.geojson": label_only,
        "empty.geojson": empty,
        "bad_single_vertex.geojson": single_vertex,
        "bad_missing_label.geojson": missing_label,
        "bad_unsupported.geojson": unsupported,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    files = {
        # 39 area / 17 line / 15 point, the mix of the Washington map.
        "washington71.geojson": mixed_map(71, 39, 17, 15, (1000.0, 800.0), 120.0, 10.0, 6.0),
        "dense320.geojson": mixed_map(320, 120, 100, 100, (700.0, 700.0), 60.0, 8.0, 5.0),
        "shortcut10.geojson": shortcut10(),
    }
    files.update(small())
    for fname, doc in files.items():
        (out / fname).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    # Truncated document for the parse-error path.
    (out / "bad_malformed.geojson").write_text('{"type": "FeatureCollection", "features": [\n')


if __name__ == "__main__":
    main()
