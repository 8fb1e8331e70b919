#!/usr/bin/env python3
"""Writes tests/fixtures/albany/albany.osm, a stylized ~1 km2 downtown extract, and prints the
node/edge counts a faithful conversion must produce, computed here without the C++ code."""
import json
import math
import sys
from pathlib import Path

LAT0, LON0 = 42.6526, -73.7562
M_PER_DEG = 111320.0

nodes = {}      # id -> (x, y, tags)
by_xy = {}
ways = {}       # id -> (refs, tags)
next_node = [1001]
next_way = [501]


def node(x, y, tags=None):
    key = (x, y)
    if key in by_xy:
        if tags:
            nodes[by_xy[key]][2].update(tags)
        return by_xy[key]
    nid = next_node[0]
    next_node[0] += 1
    nodes[nid] = (x, y, dict(tags or {}))
    by_xy[key] = nid
    return nid


def way(points, tags):
    wid = next_way[0]
    next_way[0] += 1
    ways[wid] = ([node(x, y) for x, y in points], tags)
    return wid


SIGNAL = {"highway": "traffic_signals"}
XS = [-400, -200, 0, 200, 400]
for x in (-400, 0, 200, 400):
    for y in (300, -300):
        node(x, y, SIGNAL)
node(200, 100, SIGNAL)

# North-south streets, drawn south to north.
ns = [
    (-400, {"highway": "secondary", "name": "Lark Street"}),
    (-200, {"highway": "residential", "name": "Dove Street", "oneway": "yes"}),
    (0, {"highway": "tertiary", "name": "Swan Street"}),
    (200, {"highway": "tertiary", "name": "Eagle Street"}),
    (400, {"highway": "secondary", "name": "South Pearl Street", "maxspeed": "30 mph"}),
]
for x, tags in ns:
    way([(x, y) for y in (-450, -300, -100, 100, 300, 450)], tags)

# East-west streets.
way([(-500, 300), (-450, 300), (-400, 300), (-300, 300), (-200, 300), (-100, 300), (0, 300)],
    {"highway": "primary", "name": "Washington Avenue", "lanes": "4"})
way([(0, 300), (100, 300), (200, 300), (300, 300), (400, 300), (500, 300)],
    {"highway": "primary", "name": "Washington Avenue", "lanes": "4"})
way([(x, 100) for x in (-500, -400, -200, 0, 200, 400, 500)],
    {"highway": "secondary", "name": "State Street"})
way([(x, -100) for x in (500, 400, 200, 0, -200, -400, -500)],
    {"highway": "residential", "name": "Lancaster Street", "oneway": "yes"})
way([(x, -300) for x in (-500, -400, -200, -100, 0, 200, 400, 500)],
    {"highway": "primary", "name": "Madison Avenue"})
way([(x, 450) for x in (-400, -200, 0, 200, 400)],
    {"highway": "residential", "name": "Orange Street"})
way([(-100, -300), (-100, -450)], {"highway": "residential", "name": "Madison Place"})
way([(300, 300), (300, 380), (360, 380)], {"highway": "service"})

# Filtered by the parser: a footpath, a building, and an island the component pass drops.
way([(-300, 300), (-300, 100)], {"highway": "footway", "name": "Academy Park Path"})
way([(100, 150), (150, 150), (150, 200), (100, 200), (100, 150)], {"building": "yes"})
way([(450, -450), (480, -420)], {"highway": "service", "name": "Loading Dock"})


def latlon(x, y):
    lat = LAT0 + y / M_PER_DEG
    lon = LON0 + x / (M_PER_DEG * math.cos(math.radians(LAT0)))
    return lat, lon


def write_osm(path):
    out = ['<?xml version="1.0" encoding="UTF-8"?>', '<osm version="0.6" generator="hand">']
    for nid, (x, y, tags) in sorted(nodes.items()):
        lat, lon = latlon(x, y)
        if tags:
            out.append(f'  <node id="{nid}" lat="{lat:.7f}" lon="{lon:.7f}">')
            for k, v in sorted(tags.items()):
                out.append(f'    <tag k="{k}" v="{v}"/>')
            out.append('  </node>')
        else:
            out.append(f'  <node id="{nid}" lat="{lat:.7f}" lon="{lon:.7f}"/>')
    for wid, (refs, tags) in sorted(ways.items()):
        out.append(f'  <way id="{wid}">')
        for r in refs:
            out.append(f'    <nd ref="{r}"/>')
        for k, v in sorted(tags.items()):
            out.append(f'    <tag k="{k}" v="{v}"/>')
        out.append('  </way>')
    out.append('</osm>')
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n")


DRIVABLE = {"motorway", "trunk", "primary", "secondary", "tertiary", "residential", "unclassified",
            "living_street", "service"}


def expected_counts():
    kept = {w: v for w, v in ways.items() if v[1].get("highway") in DRIVABLE}
    uses = {}
    for refs, _ in kept.values():
        for r in refs:
            uses[r] = uses.get(r, 0) + 1
    cuts = {r for r, c in uses.items() if c > 1}
    cuts |= {r for r in uses if nodes[r][2].get("highway") == "traffic_signals"}
    for refs, _ in kept.values():
        cuts |= {refs[0], refs[-1]}
    arcs = []   # (from, to, name)
    for refs, tags in kept.values():
        start = refs[0]
        for r in refs[1:]:
            if r in cuts:
                one = tags.get("oneway") == "yes"
                arcs.append((start, r, tags.get("name", "")))
                if not one:
                    arcs.append((r, start, tags.get("name", "")))
                start = r
    # Largest weak component by edge count.
    parent = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            a = parent[a]
        return a

    for a, b, _ in arcs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    sizes = {}
    for a, _, _ in arcs:
        sizes[find(a)] = sizes.get(find(a), 0) + 1
    best = max(sizes, key=lambda r: (sizes[r], -r))
    arcs = [a for a in arcs if find(a[0]) == best]
    used = {a for a, _, _ in arcs} | {b for _, b, _ in arcs}
    lights = [n for n in used if nodes[n][2].get("highway") == "traffic_signals"]
    per_name = {}
    for _, _, name in arcs:
        per_name[name] = per_name.get(name, 0) + 1
    return len(used), len(arcs), len(lights), per_name


if __name__ == "__main__":
    root = Path(__file__).resolve().parents[1]
    write_osm(root / "fixtures" / "albany" / "albany.osm")
    n, e, l, per_name = expected_counts()
    expected = {"nodes": n, "edges": e, "traffic_lights": l, "edges_per_name": per_name}
    (root / "fixtures" / "albany" / "expected.json").write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")
    print(f"nodes {n}\nedges {e}\nlights {l}")
    for name, count in sorted(per_name.items()):
        print(f"  {name or '(unnamed)'}: {count}")
    sys.exit(0)
