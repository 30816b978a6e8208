"""Planar convex hulls and point-to-hull distances.

All routines work on ``(n, 2)`` float arrays in whatever (normalised)
coordinate frame the caller chooses; tolerances are absolute in that frame.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

__all__ = ["clip_to_box", "convex_hull", "hull_distance", "lower_upper_chains"]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


_TURN_ERR = 4 * float(np.finfo(float).eps)
_TINY = 1e-290  # below this products may have lost bits to underflow


def _exact_turn(o, m, p) -> int:
    """Sign of the turn o -> m -> p in exact rational arithmetic."""
    ox, oy = Fraction(float(o[0])), Fraction(float(o[1]))
    c = (Fraction(float(m[0])) - ox) * (Fraction(float(p[1])) - oy) - (Fraction(float(m[1])) - oy) * (
        Fraction(float(p[0])) - ox
    )
    return (c > 0) - (c < 0)


def _turn_signs(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Signs of the turns a -> b -> c for rows of ``(n, 2)`` arrays.

    The turn is the same whichever vertex serves as the base, so each base is
    tried against the usual floating-point error bound; rows that none of them
    settles fall back to exact rational arithmetic.
    """
    sign = np.zeros(len(a), dtype=int)
    open_ = np.ones(len(a), dtype=bool)
    for o, m, p in ((a, b, c), (b, c, a), (c, a, b)):
        mx, my = m[:, 0] - o[:, 0], m[:, 1] - o[:, 1]
        px, py = p[:, 0] - o[:, 0], p[:, 1] - o[:, 1]
        cr = mx * py - my * px
        sure = open_ & (np.abs(cr) > _TURN_ERR * (np.abs(mx * py) + np.abs(my * px)) + _TINY)
        sign[sure] = np.sign(cr[sure]).astype(int)
        open_ &= ~sure
    for j in np.flatnonzero(open_):
        sign[j] = _exact_turn(a[j], b[j], c[j])
    return sign


def _turn_sign(a, b, c) -> int:
    """Scalar :func:`_turn_signs`."""
    for o, m, p in ((a, b, c), (b, c, a), (c, a, b)):
        mx, my = m[0] - o[0], m[1] - o[1]
        px, py = p[0] - o[0], p[1] - o[1]
        cr = mx * py - my * px
        if abs(cr) > _TURN_ERR * (abs(mx * py) + abs(my * px)) + _TINY:
            return 1 if cr > 0 else -1
    return _exact_turn(a, b, c)


def _chain(pts, order, tol):
    """One monotone chain; drops right turns and points within ``tol`` of a chord.

    A middle point within ``tol`` of the chord is dropped only when it lies
    between its neighbours.  Along near-vertical runs the sort order by ``x``
    need not follow the line, and there the exact turn decides, so the
    extremes of the run survive.
    """
    out = []
    for i in order:
        p = pts[i]
        while len(out) >= 2:
            o, m = pts[out[-2]], pts[out[-1]]
            ex, ey = p[0] - o[0], p[1] - o[1]
            c = (m[0] - o[0]) * ey - (m[1] - o[1]) * ex
            if c > tol * math.hypot(ex, ey):
                break
            if c >= -tol * math.hypot(ex, ey):
                t = (m[0] - o[0]) * ex + (m[1] - o[1]) * ey
                if not 0 < t < ex * ex + ey * ey:
                    if _turn_sign(o, m, p) > 0:
                        break
            out.pop()
        out.append(i)
    return out


_MAX_SWEEPS = 64


def _chain_sweeps(pts: np.ndarray, order: np.ndarray, tol: float) -> np.ndarray:
    """Vectorised :func:`_chain`: drop every removable point at once, repeatedly.

    A point that turns right, or lies between its neighbours within ``tol``
    of their chord, is not a vertex of the chain's hull, so all of them can go
    in one sweep.  After at most ``_MAX_SWEEPS`` sweeps the scalar chain
    finishes the (by then short) remainder.
    """
    k = order
    for _ in range(_MAX_SWEEPS):
        if k.size < 3:
            return k
        a, m, c = pts[k[:-2]], pts[k[1:-1]], pts[k[2:]]
        ex, ey = c[:, 0] - a[:, 0], c[:, 1] - a[:, 1]
        mx, my = m[:, 0] - a[:, 0], m[:, 1] - a[:, 1]
        cross = mx * ey - my * ex
        band = tol * np.hypot(ex, ey)
        flat = np.abs(cross) <= band
        t = mx * ex + my * ey
        ll = ex * ex + ey * ey
        between = (t > 0) & (t < ll)
        right = cross < -band
        odd = np.flatnonzero(flat & ~between)
        if odd.size:
            right[odd] = _turn_signs(pts[k[odd]], pts[k[odd + 1]], pts[k[odd + 2]]) <= 0
        # a chord-tolerance drop is only sound while both neighbours stay
        near = flat & between & ~right
        near &= ~np.r_[False, right[:-1]] & ~np.r_[right[1:], False]
        # within a run of candidates take every other one
        pos = np.arange(near.size)
        start = np.maximum.accumulate(np.where(near & ~np.r_[False, near[:-1]], pos, 0))
        near &= (pos - start) % 2 == 0
        drop = np.zeros(k.size, dtype=bool)
        drop[1:-1] = right | near
        if not drop.any():
            return k
        k = k[~drop]
    return np.asarray(_chain(pts.tolist(), k.tolist(), tol), dtype=int)


def _monotone_chain(pts: np.ndarray, idx: np.ndarray, tol: float) -> list[int]:
    # lexicographic by (x, y); duplicates collapse because their cross product is 0
    order = idx[np.lexsort((pts[idx, 1], pts[idx, 0]))]
    # copies of one point would each count as lying between the others
    sp = pts[order]
    fresh = np.r_[True, np.any(sp[1:] != sp[:-1], axis=1)]
    order = order[fresh]
    lower = _chain_sweeps(pts, order, tol).tolist()
    upper = _chain_sweeps(pts, order[::-1], tol).tolist()
    # the chains share their end points; join them without repeats
    hull = []
    for i in lower + upper:
        if not hull or hull[-1] != i:
            hull.append(i)
    while len(hull) > 1 and hull[-1] == hull[0]:
        hull.pop()
    if not hull:
        hull = [int(order[0])]
    # collapse a degenerate hull (all points coincident) to one vertex
    if len(hull) == 2 and np.array_equal(pts[hull[0]], pts[hull[1]]):
        hull = hull[:1]
    return hull


def _interior_mask(pts: np.ndarray, poly: np.ndarray, margin: float) -> np.ndarray:
    """Points strictly inside a CCW convex polygon by more than ``margin``."""
    inside = np.ones(len(pts), dtype=bool)
    m = len(poly)
    for j in range(m):
        a = poly[j]
        b = poly[(j + 1) % m]
        e = b - a
        c = e[0] * (pts[:, 1] - a[1]) - e[1] * (pts[:, 0] - a[0])
        inside &= c > margin * np.hypot(e[0], e[1])
    return inside


def convex_hull(points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Indices of the convex hull vertices of ``points``, counterclockwise.

    Points within ``tol`` of the chord joining their neighbours are dropped
    as collinear.  Starts at the lexicographically smallest
    point.  A set of coincident points yields one index; a collinear set
    yields its two extreme points.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise ValueError("convex_hull needs a non-empty (n, 2) array")
    idx = np.arange(len(pts))
    if len(pts) > 64:
        # Akl-Toussaint: discard points strictly inside the octagon of extremes
        keys = (pts[:, 0], pts[:, 1], pts[:, 0] + pts[:, 1], pts[:, 0] - pts[:, 1])
        ext = np.unique([int(np.argmin(k)) for k in keys] + [int(np.argmax(k)) for k in keys])
        if len(ext) >= 3:
            oct_idx = _monotone_chain(pts, ext, tol)
            if len(oct_idx) >= 3:
                keep = ~_interior_mask(pts, pts[oct_idx], 1e-9)
                idx = idx[keep]
    return np.asarray(_monotone_chain(pts, idx, tol), dtype=int)


def _segment_distance(z: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from points ``z`` (n, 2) to segments ``a -> b`` (m, 2); shape (n, m)."""
    e = b - a
    ee = np.einsum("ij,ij->i", e, e)
    w = z[:, None, :] - a[None, :, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.einsum("nmj,mj->nm", w, e) / ee
    s = np.where(ee > 0, np.clip(s, 0.0, 1.0), 0.0)
    d = w - s[..., None] * e[None, :, :]
    return np.hypot(d[..., 0], d[..., 1])


def hull_distance(hull: np.ndarray, points: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Euclidean distance from each point to a convex polygon (0 inside).

    ``hull`` holds the vertices in counterclockwise order; one or two
    vertices describe a point or a segment.
    """
    V = np.asarray(hull, dtype=float)
    Z = np.atleast_2d(np.asarray(points, dtype=float))
    if len(V) == 0:
        raise ValueError("empty hull")
    m = len(V)
    dist = np.zeros(len(Z))
    if m >= 3:
        v0 = V[0]
        rel = Z - v0
        c_first = _cross(v0, V[1], Z.T)
        c_last = _cross(v0, V[m - 1], Z.T)
        in_wedge = (c_first >= 0) & (c_last <= 0)
        lo = np.ones(len(Z), dtype=int)
        hi = np.full(len(Z), m - 1)
        while np.any(hi - lo > 1):
            mid = (lo + hi) // 2
            d = V[mid] - v0
            c = d[:, 0] * rel[:, 1] - d[:, 1] * rel[:, 0]
            go_up = c >= 0
            lo = np.where(go_up, mid, lo)
            hi = np.where(go_up, hi, mid)
        a = V[lo]
        b = V[np.minimum(lo + 1, m - 1)]
        side = (b[:, 0] - a[:, 0]) * (Z[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (Z[:, 0] - a[:, 0])
        outside = ~(in_wedge & (side >= 0))
        # an edge facing the point: the wedge edge, or one at v0 when behind it
        start = np.where(in_wedge, lo, np.where(c_first < 0, 0, m - 1))
        todo = np.flatnonzero(outside)
        if todo.size:
            dist[todo] = _polygon_distance(V, Z[todo], start[todo], chunk)
        return dist
    todo = np.arange(len(Z))
    if m == 1:
        dist[:] = np.hypot(*(Z - V[0]).T)
    else:
        for s in range(0, todo.size, chunk):
            sel = todo[s : s + chunk]
            dist[sel] = _segment_distance(Z[sel], V[:1], V[1:]).min(axis=1)
    return dist


def _polygon_distance(V: np.ndarray, Z: np.ndarray, start: np.ndarray, chunk: int) -> np.ndarray:
    """Distances from points outside a convex polygon to its boundary.

    The edges facing a point form one chain, along which the distance is
    unimodal, so a window around a facing edge ``start`` suffices once its
    minimum is interior.  Edges facing away are ignored; the window doubles
    until it covers the polygon.
    """
    m = len(V)
    A, B = V, np.roll(V, -1, axis=0)
    E = B - A
    out = np.empty(len(Z))
    pending = np.arange(len(Z))
    w = 8
    while pending.size:
        full = 2 * w + 1 >= m
        offs = np.arange(m) if full else np.arange(-w, w + 1)
        step = max(chunk * 64 // offs.size, 1)
        retry = []
        for s in range(0, pending.size, step):
            sel = pending[s : s + step]
            idx = (start[sel, None] + offs[None, :]) % m
            a, e, z = A[idx], E[idx], Z[sel, None, :]
            w_ = z - a
            ee = np.einsum("nkj,nkj->nk", e, e)
            with np.errstate(invalid="ignore", divide="ignore"):
                t = np.einsum("nkj,nkj->nk", w_, e) / ee
            t = np.where(ee > 0, np.clip(t, 0.0, 1.0), 0.0)
            d = np.hypot(w_[..., 0] - t * e[..., 0], w_[..., 1] - t * e[..., 1])
            facing = e[..., 0] * w_[..., 1] - e[..., 1] * w_[..., 0] <= 0
            dm = np.where(facing, d, np.inf)
            k = np.argmin(dm, axis=1)
            best = dm[np.arange(sel.size), k]
            # nothing facing (degenerate slivers): plain minimum over the window
            none = np.isinf(best)
            best[none] = d[none].min(axis=1)
            out[sel] = best
            if not full:
                edge = (k == 0) | (k == offs.size - 1) | none
                retry.append(sel[edge])
        pending = np.concatenate(retry) if retry else np.empty(0, dtype=int)
        w *= 4
    return out


def lower_upper_chains(hull: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a CCW hull into its lower and upper chains, both sorted by x."""
    V = np.asarray(hull, dtype=float)
    if len(V) <= 2:
        order = np.argsort(V[:, 0], kind="stable")
        return V[order], V[order]
    i_min = int(np.lexsort((V[:, 1], V[:, 0]))[0])
    i_max = int(np.lexsort((-V[:, 1], V[:, 0]))[-1])
    V = np.roll(V, -i_min, axis=0)
    i_max = (i_max - i_min) % len(V)
    lower = V[: i_max + 1]
    upper = np.concatenate([V[i_max:], V[:1]])[::-1]
    # vertical edges at the x extremes belong to neither chain's graph
    return _dedupe_x(lower, keep_max=False), _dedupe_x(upper, keep_max=True)


def _dedupe_x(chain: np.ndarray, keep_max: bool) -> np.ndarray:
    keep = []
    for i, v in enumerate(chain):
        if keep and chain[keep[-1]][0] == v[0]:
            if (v[1] > chain[keep[-1]][1]) == keep_max:
                keep[-1] = i
            continue
        keep.append(i)
    return chain[keep]


def _clip_halfplane(verts, src, axis, bound):
    out_v, out_s = [], []
    m = len(verts)
    for i in range(m):
        a, b = verts[i], verts[(i + 1) % m]
        a_in, b_in = a[axis] <= bound, b[axis] <= bound
        if a_in:
            out_v.append(a)
            out_s.append(src[i])
        if a_in != b_in:
            t = (bound - a[axis]) / (b[axis] - a[axis])
            c = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
            c[axis] = bound
            out_v.append(c)
            out_s.append(-1)
    return out_v, out_s


def clip_to_box(poly: np.ndarray, xmax: float, ymax: float) -> tuple[np.ndarray, np.ndarray]:
    """Intersect a CCW convex polygon with ``{x <= xmax, y <= ymax}``.

    Returns the clipped vertices and, per vertex, the index of the input
    vertex it came from (``-1`` for new vertices on the box edges).
    """
    verts = np.asarray(poly, dtype=float).tolist()
    src = list(range(len(verts)))
    for axis, bound in ((0, xmax), (1, ymax)):
        if not verts:
            break
        verts, src = _clip_halfplane(verts, src, axis, bound)
    def same(u, v):
        return all(abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b)) for a, b in zip(u, v))

    # drop repeated vertices (degenerate polygons pass through twice)
    keep_v, keep_s = [], []
    for v, s in zip(verts, src):
        if keep_v and same(keep_v[-1], v):
            continue
        keep_v.append(v)
        keep_s.append(s)
    while len(keep_v) > 1 and same(keep_v[0], keep_v[-1]):
        keep_v.pop()
        keep_s.pop()
    if len(keep_v) == 3 and same(keep_v[0], keep_v[2]):
        keep_v, keep_s = keep_v[:2], keep_s[:2]
    return np.asarray(keep_v, dtype=float).reshape(-1, 2), np.asarray(keep_s, dtype=int)
