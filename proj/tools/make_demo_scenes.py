#!/usr/bin/env python3
"""Writes the demo scene files under demo/.

Each scene is a 4 m x 4 m x 3 m room (floor at z = 0) viewed from its center at 1.2 m, looking
along +y at the wall y = 2. The context geometry is arranged so that the expected view
parameters follow from the frame geometry alone.
"""
import json
import math
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "demo"


def quad(p0, p1, p2, p3):
    return {"vertices": [p0, p1, p2, p3], "triangles": [[0, 1, 2], [0, 2, 3]]}


def labeled(category, mesh):
    return {"category": category, **mesh}


def box(lo, hi):
    x0, y0, z0 = lo
    x1, y1, z1 = hi
    v = [[x0, y0, z0], [x1, y0, z0], [x1, y1, z0], [x0, y1, z0],
         [x0, y0, z1], [x1, y0, z1], [x1, y1, z1], [x0, y1, z1]]
    t = [[0, 2, 1], [0, 3, 2], [4, 5, 6], [4, 6, 7], [0, 1, 5], [0, 5, 4],
         [1, 2, 6], [1, 6, 5], [2, 3, 7], [2, 7, 6], [3, 0, 4], [3, 4, 7]]
    return {"vertices": v, "triangles": t}


def room_shell():
    x0, x1, y0, y1, z0, z1 = -2.0, 2.0, -2.0, 2.0, 0.0, 3.0
    return [
        labeled("wall", quad([x0, y1, z0], [x1, y1, z0], [x1, y1, z1], [x0, y1, z1])),
        labeled("wall", quad([x0, y0, z0], [x1, y0, z0], [x1, y0, z1], [x0, y0, z1])),
        labeled("wall", quad([x0, y0, z0], [x0, y1, z0], [x0, y1, z1], [x0, y0, z1])),
        labeled("wall", quad([x1, y0, z0], [x1, y1, z0], [x1, y1, z1], [x1, y0, z1])),
        labeled("floor", quad([x0, y0, z0], [x1, y0, z0], [x1, y1, z0], [x0, y1, z0])),
        labeled("ceiling", quad([x0, y0, z1], [x1, y0, z1], [x1, y1, z1], [x0, y1, z1])),
    ]


def window(xa, xb, za, zb, y=2.0):
    return {"polygon": [[xa, y, za], [xb, y, za], [xb, y, zb], [xa, y, zb]]}


def ground(category, z=-8.8, extent=20000.0):
    return labeled(category, quad([-extent, -extent, z], [extent, -extent, z],
                                  [extent, extent, z], [-extent, extent, z]))


def viewpoint(fov):
    return {"position": [0.0, 0.0, 1.2], "direction": [0.0, 1.0, 0.0], "fov_deg": fov,
            "aspect": [3, 2], "resolution": [366, 244], "sky_condition": 2}


def write(name, doc):
    OUT.mkdir(exist_ok=True)
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")


# Full-frame window; a 10 m building cube whose near face sits 10 m ahead and whose left edge is
# on the view axis, so it fills exactly the right half of the frame. Sky fills the left half.
write("box_half_window", {
    "units": "m",
    "objects": [
        labeled("building", box([0.0, 10.0, -3.8], [10.0, 20.0, 6.2])),
        labeled("artificial_ground", quad([-3, -3, -8.8], [3, -3, -8.8], [3, 1.9, -8.8], [-3, 1.9, -8.8])),
    ],
    "room": {"shell": room_shell(), "windows": [window(-1.9, 1.9, 0.1, 2.9)]},
    "viewpoint": viewpoint(30.0),
})

# Window covering exactly the left half of the frame; pavement below the horizon, sky above.
write("half_wall_window", {
    "units": "m",
    "objects": [ground("artificial_ground")],
    "room": {"shell": room_shell(), "windows": [window(-1.9, 0.0, 0.1, 2.9)]},
    "viewpoint": viewpoint(70.0),
})

# Window covering exactly the middle-center third of the frame. Water below the horizon; above
# it a tree screen 30 m out on the left and open sky on the right.
tw = math.tan(math.radians(35.0))
th = tw * 2.0 / 3.0
hx = 2.0 * tw / 3.0
hz = 2.0 * th / 3.0
write("thirds_window", {
    "units": "m",
    "objects": [
        ground("water"),
        labeled("tree", quad([-1000.0, 30.0, 1.2], [0.0, 30.0, 1.2], [0.0, 30.0, 1000.0], [-1000.0, 30.0, 1000.0])),
    ],
    "room": {"shell": room_shell(), "windows": [window(-hx, hx, 1.2 - hz, 1.2 + hz)]},
    "viewpoint": viewpoint(70.0),
})
