#!/usr/bin/env python3
"""Download Natural Earth layers and convert a bounding box of them into labelforge GeoJSON.

Coordinates are projected to a local equirectangular plane in kilometres so label
sizes and layer radii are in the same units as the geometry.

    tools/fetch_natural_earth.py --bbox -10 35 30 60 --out europe.geojson
"""
import argparse
import json
import math
import pathlib
import sys
import urllib.request

BASE = "https://raw.githubusercontent.com/nvkelso/natural-earth-vector/master/geojson/"
LAYERS = {
    "point": "ne_110m_populated_places.geojson",
    "line": "ne_50m_rivers_lake_centerlines.geojson",
    "area": "ne_50m_lakes.geojson",
}
EARTH_RADIUS_KM = 6371.0


def fetch(name, cache):
    path = cache / name
    if not path.exists():
        cache.mkdir(parents=True, exist_ok=True)
        print(f"downloading {name}", file=sys.stderr)
        with urllib.request.urlopen(BASE + name, timeout=120) as r:
            path.write_bytes(r.read())
    return json.loads(path.read_text(encoding="utf-8"))


def projector(bbox):
    lon0 = (bbox[0] + bbox[2]) / 2
    lat0 = (bbox[1] + bbox[3]) / 2
    k = math.cos(math.radians(lat0))

    def project(pos):
        x = math.radians(pos[0] - lon0) * k * EARTH_RADIUS_KM
        y = math.radians(pos[1] - lat0) * EARTH_RADIUS_KM
        return [round(x, 3), round(y, 3)]

    return project


def inside(pos, bbox):
    return bbox[0] <= pos[0] <= bbox[2] and bbox[1] <= pos[1] <= bbox[3]


def clip_parts(geometry, bbox):
    """Parts whose every position lies in the box; partial parts are dropped, not cut."""
    t, coords = geometry["type"], geometry["coordinates"]
    if t == "Point":
        return [coords] if inside(coords, bbox) else []
    if t == "LineString":
        coords = [coords]
        t = "MultiLineString"
    if t == "Polygon":
        coords = [coords]
        t = "MultiPolygon"
    if t == "MultiLineString":
        return [p for p in coords if len(p) >= 2 and all(inside(q, bbox) for q in p)]
    if t == "MultiPolygon":
        return [p[:1] for p in coords if all(inside(q, bbox) for q in p[0])]
    return []


def label_of(props):
    for key in ("name_en", "name", "NAME"):
        if props.get(key):
            return str(props[key])
    return None


def convert(bbox, cache, char_width, label_height):
    project = projector(bbox)
    out = []
    for kind, layer in LAYERS.items():
        for i, f in enumerate(fetch(layer, cache)["features"]):
            label = label_of(f.get("properties") or {})
            if not label or not f.get("geometry"):
                continue
            for k, part in enumerate(clip_parts(f["geometry"], bbox)):
                if kind == "point":
                    geom = {"type": "Point", "coordinates": project(part)}
                elif kind == "line":
                    geom = {"type": "LineString", "coordinates": [project(q) for q in part]}
                else:
                    geom = {"type": "Polygon", "coordinates": [[project(q) for q in part[0]]]}
                out.append({
                    "type": "Feature",
                    "id": f"{kind}-{i}-{k}",
                    "properties": {"label": label, "label_char_width": char_width, "label_height": label_height},
                    "geometry": geom,
                })
    return {"type": "FeatureCollection", "features": out}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--bbox", nargs=4, type=float, metavar=("W", "S", "E", "N"), required=True)
    ap.add_argument("--out", type=pathlib.Path, required=True)
    ap.add_argument("--cache", type=pathlib.Path, default=pathlib.Path(".cache/natural_earth"))
    ap.add_argument("--char-width", type=float, default=12.0, help="km per character")
    ap.add_argument("--label-height", type=float, default=20.0, help="km")
    args = ap.parse_args()
    fc = convert(args.bbox, args.cache, args.char_width, args.label_height)
    args.out.write_text(json.dumps(fc, indent=1) + "\n", encoding="utf-8")
    kinds = {}
    for f in fc["features"]:
        kinds[f["geometry"]["type"]] = kinds.get(f["geometry"]["type"], 0) + 1
    print(f"wrote {len(fc['features'])} features {kinds} to {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
