"""Closed-form oracle for the parabola-limit distances pinned in acceptance.rs.

U_m = conv(E_m, ..., E_200), E_k the ellipse with foci 1, k^2 and minor
semi-axis k/2; E = {Re z >= 3/4 + (Im z)^2}. Both are clipped to
[0.75, 30] x [-6, 6] and compared by the polygon Hausdorff distance.
U_m is bracketed by an inscribed polygon (exact tangent points) and a
circumscribed one (exact support lines).
"""
import numpy as np
import shapely
from shapely.geometry import Polygon, box

CLIP = box(0.75, -6.0, 30.0, 6.0)
N_DIR = 50_000


def ellipse(k):
    c = (1.0 + k * k) / 2.0
    f = (k * k - 1.0) / 2.0
    b = k / 2.0
    return c, np.hypot(f, b), b


def hull_polygons(m, last=200):
    th = np.linspace(0.0, 2.0 * np.pi, N_DIR, endpoint=False)
    ct, st = np.cos(th), np.sin(th)
    best = np.full(N_DIR, -np.inf)
    pts = np.zeros((N_DIR, 2))
    for k in range(m, last + 1):
        c, a, b = ellipse(k)
        h = np.sqrt(a * a * ct * ct + b * b * st * st)
        s = c * ct + h
        better = s > best
        best = np.where(better, s, best)
        px = c + a * a * ct / h
        py = b * b * st / h
        pts[better, 0] = px[better]
        pts[better, 1] = py[better]
    inscribed = Polygon(pts).convex_hull
    # consecutive support lines x cos + y sin = s
    ct2, st2, s2 = np.roll(ct, -1), np.roll(st, -1), np.roll(best, -1)
    det = ct * st2 - st * ct2
    vx = (best * st2 - s2 * st) / det
    vy = (ct * s2 - ct2 * best) / det
    circumscribed = Polygon(np.column_stack([vx, vy])).convex_hull
    return inscribed.intersection(CLIP), circumscribed.intersection(CLIP)


def parabola():
    ymax = np.sqrt(30.0 - 0.75)
    y = np.linspace(-ymax, ymax, 20_001)
    return Polygon(np.column_stack([0.75 + y * y, y]))


def hausdorff(p, q):
    def directed(a, b):
        v = shapely.points(np.asarray(a.exterior.coords))
        return float(shapely.distance(v, b).max())
    return max(directed(p, q), directed(q, p))


if __name__ == "__main__":
    e = parabola()
    for m in (5, 10, 20, 40):
        ins, circ = hull_polygons(m)
        print(m, f"{hausdorff(ins, e):.7f}", f"{hausdorff(circ, e):.7f}")
