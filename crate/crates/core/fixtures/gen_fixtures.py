"""Regenerates the mesh fixtures shipped with the crate.

  unit_square_123.mesh   coarse Delaunay triangulation of (0,1)^2, 123 triangles,
                         interior points relaxed by 50 Lloyd-type sweeps
  tube_sod.msh           tetrahedral mesh of the cylinder -1 < x < 1, r < 0.2,
                         with a layer plane at x = 0 (MSH 2.2 ASCII)

Usage: python3 gen_fixtures.py  (writes next to this script)
"""

import math
import os

import numpy as np
from scipy.spatial import Delaunay

HERE = os.path.dirname(os.path.abspath(__file__))


def unit_square_points(rng):
    # 4 corners + 17 boundary points (4, 4, 4, 5 per side) + 52 interior points:
    # T = 2n - b - 2 = 2*73 - 21 - 2 = 123.
    pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    for k in range(1, 5):
        pts.append((k / 5.0, 0.0))
        pts.append((1.0, k / 5.0))
        pts.append((k / 5.0, 1.0))
    for k in range(1, 6):
        pts.append((0.0, k / 6.0))
    interior = []
    while len(interior) < 52:
        p = rng.uniform(0.07, 0.93, size=2)
        if all(np.hypot(*(p - q)) > 0.085 for q in interior):
            interior.append(p)
    pts.extend(map(tuple, interior))
    return np.array(pts)


def relax(pts, fixed, sweeps):
    """Moves every free point to the area-weighted mean of its triangles' centroids."""
    for _ in range(sweeps):
        acc = np.zeros_like(pts)
        w = np.zeros(len(pts))
        for t in Delaunay(pts).simplices:
            a, b, c = pts[t]
            area = 0.5 * abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
            for v in t:
                acc[v] += area * (a + b + c) / 3.0
                w[v] += area
        pts[fixed:] = acc[fixed:] / w[fixed:, None]
    return pts


def write_square(path):
    rng = np.random.default_rng(20240611)
    pts = relax(unit_square_points(rng), 21, 50)
    tri = Delaunay(pts)
    simplices = tri.simplices
    assert len(simplices) == 123, len(simplices)
    with open(path, "w") as f:
        f.write("# coarse Delaunay triangulation of the unit square (123 triangles)\n")
        f.write("dim 2\n")
        f.write(f"vertices {len(pts)}\n")
        for x, y in pts:
            f.write(f"{x:.17g} {y:.17g}\n")
        f.write(f"elements {len(simplices)}\n")
        for a, b, c in simplices:
            f.write(f"tri {a} {b} {c}\n")


def disk_points(radius, rings):
    pts = [(0.0, 0.0)]
    for r in range(1, rings + 1):
        n = 6 * r
        rr = radius * r / rings
        phase = 0.5 * (r % 2) * 2.0 * math.pi / n
        for k in range(n):
            a = phase + 2.0 * math.pi * k / n
            pts.append((rr * math.cos(a), rr * math.sin(a)))
    return np.array(pts), 6 * rings


def write_tube(path, rings=3, layers=48):
    sec, n_rim = disk_points(0.2, rings)
    tris = Delaunay(sec).simplices
    ns = len(sec)
    rim = set(range(ns - n_rim, ns))
    xs = np.linspace(-1.0, 1.0, layers + 1)
    assert abs(xs[layers // 2]) < 1e-15
    nodes = [(x, y, z) for x in xs for (y, z) in sec]

    def gid(layer, k):
        return layer * ns + k

    tets = []
    for l in range(layers):
        for t in tris:
            a, b, c = sorted(int(v) for v in t)
            bottom = [gid(l, a), gid(l, b), gid(l, c)]
            top = [gid(l + 1, a), gid(l + 1, b), gid(l + 1, c)]
            tets.append((bottom[0], bottom[1], bottom[2], top[0]))
            tets.append((bottom[1], bottom[2], top[0], top[1]))
            tets.append((bottom[2], top[0], top[1], top[2]))

    boundary = []
    for t in tris:
        boundary.append((1, [gid(0, int(v)) for v in t]))
        boundary.append((2, [gid(layers, int(v)) for v in t]))
    # lateral wall: rim edges split consistently with the tetrahedra
    rim_edges = set()
    for t in tris:
        for i in range(3):
            u, v = sorted((int(t[i]), int(t[(i + 1) % 3])))
            if u in rim and v in rim:
                rim_edges.add((u, v))
    for l in range(layers):
        for (u, v) in sorted(rim_edges):
            boundary.append((3, [gid(l, u), gid(l, v), gid(l + 1, u)]))
            boundary.append((3, [gid(l, v), gid(l + 1, u), gid(l + 1, v)]))

    with open(path, "w") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write("$PhysicalNames\n4\n2 1 \"inlet\"\n2 2 \"outlet\"\n2 3 \"wall\"\n3 4 \"fluid\"\n$EndPhysicalNames\n")
        f.write(f"$Nodes\n{len(nodes)}\n")
        for i, (x, y, z) in enumerate(nodes):
            f.write(f"{i + 1} {x:.17g} {y:.17g} {z:.17g}\n")
        f.write("$EndNodes\n")
        f.write(f"$Elements\n{len(boundary) + len(tets)}\n")
        eid = 1
        for tag, vs in boundary:
            f.write(f"{eid} 2 2 {tag} {tag} " + " ".join(str(v + 1) for v in vs) + "\n")
            eid += 1
        for vs in tets:
            f.write(f"{eid} 4 2 4 4 " + " ".join(str(v + 1) for v in vs) + "\n")
            eid += 1
        f.write("$EndElements\n")
    return len(tets)


if __name__ == "__main__":
    write_square(os.path.join(HERE, "unit_square_123.mesh"))
    n = write_tube(os.path.join(HERE, "tube_sod.msh"))
    print("tube tetrahedra:", n)
