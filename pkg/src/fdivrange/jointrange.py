"""Joint range of a pair of f-divergences.

Every (f, g)-divergence pair is a convex combination of two pairs realised
by distributions on two points, so the joint range is the convex hull of the
image of the triangle ``{(p, q): 0 <= p <= q <= 1}`` under

    (p, q) -> (D_f((1-p, p), (1-q, q)), D_g((1-p, p), (1-q, q))).

:func:`sample_atlas` images a grid on the triangle, clips values to a box
(the range is often unbounded) and builds the hull of the clipped image.
Curved stretches of the hull boundary are then refined adaptively: for every
hull edge a small stencil of parameters between its two endpoints is
evaluated and the point bulging furthest outward is added, until no edge
bulges by more than ``refine_rtol`` in the normalised frame (relative to the
point's magnitude near the origin).  A Newton search for the support point
of each edge complements the stencil where the boundary is attained far
from the edge in parameter space.  Without refinement, points of the true
range near a curved boundary would sit outside the sampled hull by the
chord gap.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .divcore import DivergenceError, Generator, divergence_batch, two_point_divergence
from .hull import clip_to_box, convex_hull, hull_distance, lower_upper_chains

__all__ = [
    "DivergencePair",
    "GridSpec",
    "OracleReport",
    "RangeAtlas",
    "TwoPointParam",
    "achievability_oracle",
    "atlas_csv",
    "bin_minima",
    "envelope_table",
    "log_bins",
    "grid_pairs",
    "grid_values",
    "hull_contains",
    "hull_csv",
    "hull_distances",
    "jacobian_determinant",
    "mixture_pair",
    "sample_atlas",
    "two_point_pair",
    "unbounded_json",
]

DEFAULT_SEED = 7

#: Collinearity tolerance of the hull, as a distance in the normalised frame.
HULL_TOL = 1e-12

#: The hull is built inside this multiple of the clip box, then cut by the box.
OUTER_FACTOR = 1e10

_STENCIL_LAMBDA = np.array([0.25, 0.5, 0.75])
_STENCIL_MU = np.array([-0.5, -0.25, 0.0, 0.25, 0.5])
SUPPORT_ITERATIONS = 4
MAX_POLISH_PASSES = 8
#: Stencil rounds between support searches while edges are still unsettled.
POLISH_EVERY = 8


@dataclass(frozen=True)
class TwoPointParam:
    """``P = (1-p, p)``, ``Q = (1-q, q)``; canonical when ``p <= q``."""

    p: float
    q: float

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.q <= 1.0):
            raise DivergenceError(f"two-point parameter out of range: ({self.p}, {self.q})")

    def canonical(self) -> "TwoPointParam":
        if self.p <= self.q:
            return self
        return TwoPointParam(1.0 - self.p, 1.0 - self.q)

    def as_dict(self) -> dict:
        return {"p": self.p, "q": self.q}


@dataclass(frozen=True)
class DivergencePair:
    x: float
    y: float

    def __iter__(self):
        return iter((self.x, self.y))


def two_point_pair(f: Generator, g: Generator, param: TwoPointParam) -> DivergencePair:
    """``(D_f, D_g)`` at ``P = (1-p, p)``, ``Q = (1-q, q)``."""
    x = two_point_divergence(f, param.p, param.q)[0]
    y = two_point_divergence(g, param.p, param.q)[0]
    return DivergencePair(float(x), float(y))


# ---------------------------------------------------------------------------
# grid and atlas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Sampling grid on the parameter triangle and hull options.

    The 1-D grid is ``{i / resolution}`` plus geometric clusters
    ``0.5 * ratio**-k`` and ``1 - 0.5 * ratio**-k`` down to ``depth``;
    the triangle samples are all pairs ``p <= q`` of grid values, plus
    (``diagonal``) pairs ``(c, c + d)`` with the same geometric gaps ``d``.
    """

    resolution: int = 512
    ratio: float = 1.15
    depth: float = 1e-16
    clip: tuple[float, float] = (50.0, 50.0)
    diagonal: bool = True
    refine: bool = True
    refine_rtol: float = 5e-10
    max_rounds: int = 60
    max_samples: int = 5_000_000

    def __post_init__(self):
        if self.resolution < 2:
            raise DivergenceError("grid resolution must be at least 2")
        if not self.ratio > 1.0:
            raise DivergenceError("geometric ratio must exceed 1")
        if not (0.0 < self.depth < 0.5):
            raise DivergenceError("depth must lie in (0, 0.5)")
        if min(self.clip) <= 0:
            raise DivergenceError("clip bounds must be positive")


def grid_values(spec: GridSpec) -> np.ndarray:
    """Sorted 1-D grid on [0, 1]."""
    uniform = np.arange(spec.resolution + 1) / spec.resolution
    n_geo = int(math.floor(math.log(0.5 / spec.depth) / math.log(spec.ratio))) + 1
    geo = 0.5 * spec.ratio ** -np.arange(n_geo, dtype=float)
    return np.unique(np.concatenate([uniform, geo, 1.0 - geo]))


def grid_pairs(spec: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Canonical ``(p, q)`` samples: all grid pairs plus near-diagonal offsets.

    The offsets ``q = c + d`` put geometric gaps ``d`` below the uniform
    spacing at every uniform ``c``; boundary points near the origin are often
    attained by nearly equal pairs away from the ends.
    """
    u = grid_values(spec)
    i, j = np.triu_indices(u.size)
    p, q = u[i], u[j]
    if spec.diagonal:
        n_geo = int(math.floor(math.log(0.5 / spec.depth) / math.log(spec.ratio))) + 1
        gaps = 0.5 * spec.ratio ** -np.arange(n_geo, dtype=float)
        gaps = gaps[gaps < 1.0 / spec.resolution]
        c = np.arange(1, spec.resolution) / spec.resolution
        cp = np.repeat(c, gaps.size)
        cq = cp + np.tile(gaps, c.size)
        p, q = np.concatenate([p, cp]), np.concatenate([q, cq])
    return p, q


@dataclass
class RangeAtlas:
    """Sampled image of the parameter triangle with its clipped convex hull.

    ``p, q, x, y`` hold every evaluated sample (raw, possibly infinite
    divergences).  ``hull`` lists the hull vertices in clipped coordinates,
    counterclockwise, and ``hull_params`` the parameters producing them.
    ``unbounded`` maps ``"x"``/``"y"`` to parameters whose image exceeded the
    clip bound in that coordinate.
    """

    f: Generator
    g: Generator
    p: np.ndarray
    q: np.ndarray
    x: np.ndarray
    y: np.ndarray
    clip_bounds: tuple[float, float]
    scale: tuple[float, float]
    hull: np.ndarray
    hull_params: np.ndarray
    unbounded: dict = field(default_factory=dict)
    refine_rounds: int = 0

    @property
    def clipped(self) -> np.ndarray:
        return (self.x > self.clip_bounds[0]) | (self.y > self.clip_bounds[1])

    @property
    def xc(self) -> np.ndarray:
        return np.minimum(self.x, self.clip_bounds[0])

    @property
    def yc(self) -> np.ndarray:
        return np.minimum(self.y, self.clip_bounds[1])

    @property
    def finite(self) -> np.ndarray:
        return np.isfinite(self.x) & np.isfinite(self.y)

    def samples(self):
        """Iterate ``(TwoPointParam, DivergencePair)`` over all samples."""
        for p, q, x, y in zip(self.p.tolist(), self.q.tolist(), self.x.tolist(), self.y.tolist()):
            yield TwoPointParam(p, q), DivergencePair(x, y)

    def __len__(self) -> int:
        return self.p.size

    @property
    def unbounded_directions(self) -> set:
        return {k for k, v in self.unbounded.items() if v}

    def envelope(self, xs) -> tuple[np.ndarray, np.ndarray]:
        """Lower and upper hull boundary at abscissae ``xs`` (NaN outside)."""
        lower, upper = lower_upper_chains(self.hull)
        xs = np.asarray(xs, dtype=float)
        lo = np.interp(xs, lower[:, 0], lower[:, 1], left=np.nan, right=np.nan)
        hi = np.interp(xs, upper[:, 0], upper[:, 1], left=np.nan, right=np.nan)
        return lo, hi


def _outer_frame(x, y, clip, scale) -> np.ndarray:
    """Samples in the normalised frame, pulled into a far outer box.

    Finite points beyond ``OUTER_FACTOR`` times the clip box are scaled
    towards the origin; the segment to the origin lies in the range, so this
    keeps them inside it.  A point infinite in one coordinate is placed on
    the outer box in that coordinate.  Points infinite in both carry no
    direction and become NaN.
    """
    bx = OUTER_FACTOR * clip[0] / scale[0]
    by = OUTER_FACTOR * clip[1] / scale[1]
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        xn = np.asarray(x, dtype=float) / scale[0]
        yn = np.asarray(y, dtype=float) / scale[1]
        out = np.full((xn.size, 2), np.nan)
        fin = np.isfinite(xn) & np.isfinite(yn)
        s = np.minimum(1.0, np.minimum(bx / xn[fin], by / yn[fin]))
        out[fin, 0] = xn[fin] * s
        out[fin, 1] = yn[fin] * s
    x_inf = np.isinf(xn) & np.isfinite(yn)
    out[x_inf, 0] = bx
    out[x_inf, 1] = np.minimum(yn[x_inf], by)
    y_inf = np.isfinite(xn) & np.isinf(yn)
    out[y_inf, 0] = np.minimum(xn[y_inf], bx)
    out[y_inf, 1] = by
    return out


def _into_box(xn: np.ndarray, yn: np.ndarray, bx: float, by: float) -> np.ndarray:
    # radial projection of finite normalised points into the clip box
    with np.errstate(divide="ignore"):
        s = np.minimum(1.0, np.minimum(bx / xn, by / yn))
    return np.column_stack([xn * s, yn * s])


def _canonicalise(p: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.clip(p, 0.0, 1.0)
    q = np.clip(q, 0.0, 1.0)
    swap = p > q
    return np.where(swap, 1.0 - p, p), np.where(swap, 1.0 - q, q)


def _hull_of(pts: np.ndarray, idx: np.ndarray) -> np.ndarray:
    ok = idx[~np.isnan(pts[idx, 0])]
    return ok[convex_hull(pts[ok], HULL_TOL)]


def _edge_frame(allpts, ia, ib):
    A, B = allpts[ia], allpts[ib]
    e = B - A
    elen = np.hypot(e[:, 0], e[:, 1])
    normal = np.column_stack([e[:, 1], -e[:, 0]]) / np.where(elen > 0, elen, 1.0)[:, None]
    return A, elen, normal


def _support_search(evaluate, p0, q0, normal, step):
    """Local ascent of ``normal . F(p, q)`` from ``(p0, q0)``, one start per row.

    Each iteration builds a finite-difference gradient and Hessian and tries
    a short ladder of step lengths along the Newton direction (the gradient
    where the Hessian is not negative definite).  The height is badly
    conditioned near folds of the map, where the boundary of the range is
    attained, which is why plain gradient steps are not enough.
    """
    n_rows = p0.size
    nx, ny = normal[:, 0], normal[:, 1]

    def height(p, q, per):
        pts = evaluate(p, q)
        h = pts[:, 0] * np.repeat(nx, per) + pts[:, 1] * np.repeat(ny, per)
        return np.where(np.isnan(h), -np.inf, h).reshape(n_rows, per)

    ladder = 2.0 ** np.arange(-3, 3)
    offsets = np.array([[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [-1, -1]], dtype=float)
    p, q = p0.copy(), q0.copy()
    h = height(*_canonicalise(p, q), 1)[:, 0]
    for _ in range(SUPPORT_ITERATIONS):
        tau = np.clip(0.1 * step, 1e-9, 1e-3)
        sp = p[:, None] + tau[:, None] * offsets[None, :, 0]
        sq = q[:, None] + tau[:, None] * offsets[None, :, 1]
        hs = height(*_canonicalise(sp.ravel(), sq.ravel()), offsets.shape[0])
        t2 = tau * tau
        gp = (hs[:, 0] - hs[:, 1]) / (2 * tau)
        gq = (hs[:, 2] - hs[:, 3]) / (2 * tau)
        hpp = (hs[:, 0] - 2 * h + hs[:, 1]) / t2
        hqq = (hs[:, 2] - 2 * h + hs[:, 3]) / t2
        hpq = (hs[:, 4] - hs[:, 0] - hs[:, 2] + 2 * h - hs[:, 1] - hs[:, 3] + hs[:, 5]) / (2 * t2)
        det = hpp * hqq - hpq * hpq
        newton = (hpp < 0) & (det > 0) & np.isfinite(det)
        safe = np.where(newton, det, 1.0)
        dp = np.where(newton, -(hqq * gp - hpq * gq) / safe, gp)
        dq = np.where(newton, -(-hpq * gp + hpp * gq) / safe, gq)
        dn = np.hypot(dp, dq)
        ok = np.isfinite(dn) & (dn > 0)
        # Newton steps keep their length, gradient steps get length ``step``
        length = np.where(newton, dn, step)
        length = np.minimum(length, 0.25)
        ux = np.where(ok, dp / np.where(ok, dn, 1.0), 0.0)
        uy = np.where(ok, dq / np.where(ok, dn, 1.0), 0.0)
        lp = p[:, None] + (length[:, None] * ladder[None, :]) * ux[:, None]
        lq = q[:, None] + (length[:, None] * ladder[None, :]) * uy[:, None]
        cp, cq = _canonicalise(lp.ravel(), lq.ravel())
        hl = height(cp, cq, ladder.size)
        k = np.argmax(hl, axis=1)
        rows = np.arange(n_rows)
        better = hl[rows, k] > h
        p = np.where(better, cp.reshape(n_rows, -1)[rows, k], p)
        q = np.where(better, cq.reshape(n_rows, -1)[rows, k], q)
        h = np.where(better, hl[rows, k], h)
        step = np.where(better, np.maximum(length * ladder[k], 1e-12), step / 8.0)
    return p, q


def _refine(f, g, p, q, x, y, pts, hull_idx, spec, scale):
    """Adaptive outward refinement of the hull; returns grown arrays.

    Stencil rounds probe a few parameters between the endpoints of each
    hull edge.  An edge whose stencil finds nothing outside is settled and
    not probed again while both its endpoints stay on the hull.  Once every
    edge is settled, and every few rounds before that, a support search from
    each unpolished edge looks for boundary points the stencil cannot reach
    quickly: the stencil only probes within an edge's own parameter span, so
    where the true boundary is far away in parameter space it would creep
    towards it one short step per round.
    """
    p_l, q_l, x_l, y_l, pts_l = [p], [q], [x], [y], [pts]
    allp, allq, allpts = p, q, pts
    n_total = p.size
    settled: set = set()
    polished: set = set()
    polish_passes = 0
    since_polish = 0
    rounds = 0

    box_l1 = spec.clip[0] / scale[0] + spec.clip[1] / scale[1]

    def evaluate(cp, cq):
        cx = two_point_divergence(f, cp, cq)
        cy = two_point_divergence(g, cp, cq)
        return cx, cy, _outer_frame(cx, cy, spec.clip, scale)

    def outward(cpts, A, normal, per_edge):
        n_edges = A.shape[0]
        dev = np.einsum("ijk,ik->ij", cpts.reshape(n_edges, per_edge, 2) - A[:, None, :], normal)
        mag = np.abs(cpts).sum(axis=1).reshape(n_edges, per_edge)
        # absolute tolerance inside the box, relative near the origin and far outside it
        mag = np.where(mag > box_l1, mag, np.minimum(mag, 1.0))
        slack = dev - np.maximum(spec.refine_rtol * mag, 4.0 * HULL_TOL)
        return np.where(np.isnan(slack), -np.inf, slack)

    while rounds < spec.max_rounds and len(hull_idx) >= 3 and n_total < spec.max_samples:
        ia_all, ib_all = hull_idx, np.roll(hull_idx, -1)
        keys = list(zip(ia_all.tolist(), ib_all.tolist()))
        todo = np.array([k not in settled for k in keys], dtype=bool)
        fresh = np.array([k not in polished for k in keys], dtype=bool)
        can_polish = polish_passes < MAX_POLISH_PASSES and fresh.any()
        if todo.any() and not (can_polish and since_polish >= POLISH_EVERY):
            since_polish += 1
            ia, ib = ia_all[todo], ib_all[todo]
            A, elen, normal = _edge_frame(allpts, ia, ib)
            pa, qa = allp[ia], allq[ia]
            dp, dq = allp[ib] - pa, allq[ib] - qa
            # stencil: points along the parameter segment, offset perpendicular to it
            lam = _STENCIL_LAMBDA[None, :, None]
            mu = _STENCIL_MU[None, None, :]
            cp = pa[:, None, None] + lam * dp[:, None, None] - mu * dq[:, None, None]
            cq = qa[:, None, None] + lam * dq[:, None, None] + mu * dp[:, None, None]
            cp, cq = _canonicalise(cp.ravel(), cq.ravel())
            cx, cy, cpts = evaluate(cp, cq)
            slack = outward(cpts, A, normal, _STENCIL_LAMBDA.size * _STENCIL_MU.size)
            best = np.argmax(slack, axis=1)
            rows = np.arange(ia.size)
            grow = (slack[rows, best] > 0) & (elen > 0)
            settled.update(zip(ia[~grow].tolist(), ib[~grow].tolist()))
            pick = rows[grow] * slack.shape[1] + best[grow]
        else:
            if not can_polish:
                break
            polish_passes += 1
            since_polish = 0
            polished.update(keys)
            ia, ib = ia_all[fresh], ib_all[fresh]
            A, elen, normal = _edge_frame(allpts, ia, ib)
            span = np.hypot(allp[ib] - allp[ia], allq[ib] - allq[ia])
            step = np.clip(span, 1e-12, 0.05)
            # start from the midpoint of the parameter segment
            # heights are -inf off the finite range; differences of them are masked
            with np.errstate(invalid="ignore"):
                sp, sq = _support_search(
                    lambda a, b: evaluate(a, b)[2],
                    0.5 * (allp[ia] + allp[ib]),
                    0.5 * (allq[ia] + allq[ib]),
                    normal,
                    step,
                )
            cp, cq = _canonicalise(sp, sq)
            cx, cy, cpts = evaluate(cp, cq)
            slack = outward(cpts, A, normal, 1)[:, 0]
            grow = (slack > 0) & (elen > 0)
            pick = np.flatnonzero(grow)
        if pick.size == 0:
            if todo.any():
                continue
            break
        rounds += 1
        # the same parameter may be picked by two edges
        _, first = np.unique(np.column_stack([cp[pick], cq[pick]]), axis=0, return_index=True)
        pick = pick[np.sort(first)]
        p_l.append(cp[pick])
        q_l.append(cq[pick])
        x_l.append(cx[pick])
        y_l.append(cy[pick])
        pts_l.append(cpts[pick])
        allp, allq, allpts = (np.concatenate(v) for v in (p_l, q_l, pts_l))
        p_l, q_l, pts_l = [allp], [allq], [allpts]
        new_idx = np.arange(n_total, n_total + pick.size)
        n_total += pick.size
        hull_idx = _hull_of(allpts, np.concatenate([hull_idx, new_idx]))
    return (
        np.concatenate(p_l),
        np.concatenate(q_l),
        np.concatenate(x_l),
        np.concatenate(y_l),
        hull_idx,
        rounds,
    )


def sample_atlas(f: Generator, g: Generator, grid: Optional[GridSpec] = None) -> RangeAtlas:
    """Image the parameter triangle under ``(D_f, D_g)`` and build its hull.

    The hull is that of the sampled range intersected with the clip box:
    it is built in a far outer frame and then cut by the box, so the cut
    edges follow the range instead of a corner made up by clamping.
    """
    spec = grid or GridSpec()
    p, q = grid_pairs(spec)
    x = two_point_divergence(f, p, q)
    y = x.copy() if g is f else two_point_divergence(g, p, q)
    clip = (float(spec.clip[0]), float(spec.clip[1]))
    scale = []
    for vals, bound in ((x, clip[0]), (y, clip[1])):
        fin = vals[np.isfinite(vals)]
        top = float(fin.max()) if fin.size else bound
        scale.append(max(min(top, bound), 1e-300))
    scale = (scale[0], scale[1])
    pts = _outer_frame(x, y, clip, scale)
    hull_idx = _hull_of(pts, np.arange(p.size))
    rounds = 0
    if spec.refine:
        p, q, x, y, hull_idx, rounds = _refine(f, g, p, q, x, y, pts, hull_idx, spec, scale)
        pts = _outer_frame(x, y, clip, scale)
    box = (clip[0] / scale[0], clip[1] / scale[1])
    verts, src = clip_to_box(pts[hull_idx], *box)
    # deterministic starting vertex: lexicographically smallest
    k = int(np.lexsort((verts[:, 1], verts[:, 0]))[0])
    verts, src = np.roll(verts, -k, axis=0), np.roll(src, -k)
    params = np.full((len(src), 2), np.nan)
    has = src >= 0
    params[has] = np.column_stack([p, q])[hull_idx[src[has]]]
    hull = verts * np.asarray(scale)
    # vertices cut exactly at the box edge
    hull[:, 0] = np.where(src < 0, np.minimum(hull[:, 0], clip[0]), hull[:, 0])
    hull[:, 1] = np.where(src < 0, np.minimum(hull[:, 1], clip[1]), hull[:, 1])
    unbounded = {}
    for name, vals, bound in (("x", x, clip[0]), ("y", y, clip[1])):
        over = np.flatnonzero(vals > bound)
        # witnesses: the most extreme samples first, ties by index
        order = over[np.lexsort((over, -vals[over]))][:8]
        unbounded[name] = [TwoPointParam(float(p[k]), float(q[k])) for k in order]
    return RangeAtlas(
        f=f,
        g=g,
        p=p,
        q=q,
        x=x,
        y=y,
        clip_bounds=clip,
        scale=scale,
        hull=hull,
        hull_params=params,
        unbounded=unbounded,
        refine_rounds=rounds,
    )


def log_bins(lo: float, hi: float, per_decade: int = 200) -> np.ndarray:
    """Edges of logarithmic bins covering ``[lo, hi]``."""
    if not (0 < lo < hi):
        raise DivergenceError(f"bad bin range [{lo}, {hi}]")
    n = max(int(math.ceil(per_decade * math.log10(hi / lo) - 1e-9)), 1)
    return lo * (hi / lo) ** (np.arange(n + 1) / n)


def envelope_table(atlas: RangeAtlas, lo: float, hi: float, per_decade: int = 200):
    """Hull envelope at the geometric centres of log bins over ``[lo, hi]``.

    Returns ``(centres, lower, upper)``; NaN where the hull does not reach.
    """
    edges = log_bins(lo, hi, per_decade)
    centres = np.sqrt(edges[:-1] * edges[1:])
    lower, upper = atlas.envelope(centres)
    return centres, lower, upper


def bin_minima(atlas: RangeAtlas, lo: float, hi: float, per_decade: int = 200):
    """Per log bin, the finite sample with the smallest ``y``.

    Returns ``(x, y)`` of those samples; bins without samples are dropped.
    """
    edges = log_bins(lo, hi, per_decade)
    fin = atlas.finite & (atlas.x >= lo) & (atlas.x < edges[-1])
    x, y = atlas.x[fin], atlas.y[fin]
    b = np.searchsorted(edges, x, side="right") - 1
    order = np.lexsort((y, b))
    b, x, y = b[order], x[order], y[order]
    first = np.r_[True, b[1:] != b[:-1]]
    return x[first], y[first]


# ---------------------------------------------------------------------------
# hull membership
# ---------------------------------------------------------------------------


def hull_distances(atlas: RangeAtlas, xs, ys) -> np.ndarray:
    """Distance (normalised frame) from each point to the atlas hull.

    Finite points are projected radially into the clip box first.  A
    coordinate that is infinite, or beyond the clip bound, only counts when
    the atlas certifies that direction unbounded; otherwise the distance is
    ``inf``.  Points infinite in a certified direction get distance 0.
    """
    if len(atlas.hull) == 0:
        raise DivergenceError("atlas hull is empty")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    dirs = atlas.unbounded_directions
    ok = ~(np.isnan(xs) | np.isnan(ys))
    if "x" not in dirs:
        ok &= xs <= atlas.clip_bounds[0]
    if "y" not in dirs:
        ok &= ys <= atlas.clip_bounds[1]
    out = np.full(xs.shape, math.inf)
    infinite = ok & (np.isinf(xs) | np.isinf(ys))
    out[infinite] = 0.0
    fin = ok & ~infinite
    if fin.any():
        sx, sy = atlas.scale
        pts = _into_box(xs[fin] / sx, ys[fin] / sy, atlas.clip_bounds[0] / sx, atlas.clip_bounds[1] / sy)
        verts = atlas.hull / np.asarray(atlas.scale)
        out[fin] = hull_distance(verts, pts)
    return out


def hull_contains(atlas: RangeAtlas, point, tolerance: float = 1e-9) -> bool:
    """Whether ``point`` lies in the hull inflated by ``tolerance`` (normalised frame)."""
    x, y = point
    return bool(hull_distances(atlas, [x], [y])[0] <= tolerance)


# ---------------------------------------------------------------------------
# mixtures
# ---------------------------------------------------------------------------


def _weights(P) -> np.ndarray:
    from .divcore import Distribution

    return P.weights if isinstance(P, Distribution) else Distribution(P).weights


def mixture_pair(f: Generator, g: Generator, P0, Q0, P1, Q1, alpha: float) -> DivergencePair:
    """Pair of the disjoint-support mixture ``((1-a) P0 + a P1, (1-a) Q0 + a Q1)``.

    The two components live on disjoint blocks of a ``k0 + k1`` point space,
    so the result is ``(1-a) pair(P0, Q0) + a pair(P1, Q1)``.
    """
    if not (0.0 <= alpha <= 1.0):
        raise DivergenceError(f"mixing weight {alpha!r} outside [0, 1]")
    p0, q0, p1, q1 = (_weights(D) for D in (P0, Q0, P1, Q1))
    if p0.size != q0.size or p1.size != q1.size:
        raise DivergenceError("component pairs must have matching lengths")
    P = np.concatenate([(1.0 - alpha) * p0, alpha * p1])[None, :]
    Q = np.concatenate([(1.0 - alpha) * q0, alpha * q1])[None, :]
    x = divergence_batch(f, P, Q)[0]
    y = divergence_batch(g, P, Q)[0]
    return DivergencePair(float(x), float(y))


# ---------------------------------------------------------------------------
# Jacobian
# ---------------------------------------------------------------------------

_FD_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_FD_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


def jacobian_determinant(f: Generator, g: Generator, param: TwoPointParam, step: float = 1e-4) -> float:
    """Fourth-order finite-difference determinant of ``d(D_f, D_g) / d(p, q)``.

    The step is ``step * min(p, q - p, 1 - q)``; the parameter must be
    strictly inside the triangle.
    """
    p, q = param.p, param.q
    if not (0.0 < p < q < 1.0):
        raise DivergenceError(f"({p}, {q}) is not interior to the parameter triangle")
    h = step * min(p, q - p, 1.0 - q)
    pp = np.concatenate([p + _FD_OFFSETS * h, np.full(4, p)])
    qq = np.concatenate([np.full(4, q), q + _FD_OFFSETS * h])
    fx = two_point_divergence(f, pp, qq)
    gx = two_point_divergence(g, pp, qq)
    dfdp = _FD_WEIGHTS @ fx[:4] / h
    dfdq = _FD_WEIGHTS @ fx[4:] / h
    dgdp = _FD_WEIGHTS @ gx[:4] / h
    dgdq = _FD_WEIGHTS @ gx[4:] / h
    return float(dfdp * dgdq - dgdp * dfdq)


# ---------------------------------------------------------------------------
# achievability oracle
# ---------------------------------------------------------------------------


@dataclass
class OracleReport:
    pair: tuple[str, str]
    k_max: int
    trials: int
    seed: int
    tolerance: float
    checked: int = 0
    failures: list = field(default_factory=list)
    max_distance: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "k_max": self.k_max,
            "trials": self.trials,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "checked": self.checked,
            "max_distance": self.max_distance,
            "failures": self.failures,
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2)


def _jsonable(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _random_case(rng: np.random.Generator, k: int, kind: int) -> tuple[np.ndarray, np.ndarray]:
    P = rng.dirichlet(np.ones(k))
    Q = rng.dirichlet(np.ones(k))
    if kind == 4:
        # shared zeros
        z = rng.choice(k, size=int(rng.integers(1, k)), replace=False)
        P[z] = 0.0
        Q[z] = 0.0
    elif kind in (5, 6):
        # zeros in one argument only
        z = rng.choice(k, size=int(rng.integers(1, k)), replace=False)
        (Q if kind == 5 else P)[z] = 0.0
    elif kind == 7:
        if rng.random() < 0.25:
            # disjoint supports
            cut = int(rng.integers(1, k))
            perm = rng.permutation(k)
            P[perm[cut:]] = 0.0
            Q[perm[:cut]] = 0.0
        else:
            eps = 10.0 ** rng.uniform(-6, -1)
            Q = P * np.exp(eps * rng.standard_normal(k))
    P = P / P.sum()
    Q = Q / Q.sum()
    return P, Q


def random_pairs(k: int, trials: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Oracle test distributions on ``k`` points; one RNG stream per trial."""
    P = np.empty((trials, k))
    Q = np.empty((trials, k))
    for t in range(trials):
        rng = np.random.default_rng([seed, k, t])
        P[t], Q[t] = _random_case(rng, k, t % 8)
    return P, Q


def achievability_oracle(
    f: Generator,
    g: Generator,
    atlas: RangeAtlas,
    k_max: int = 6,
    trials: int = 1000,
    seed: int = DEFAULT_SEED,
    tolerance: float = 1e-6,
) -> OracleReport:
    """Check random k-point divergence pairs against the two-point hull."""
    if k_max < 2:
        raise DivergenceError("k_max must be at least 2")
    if trials < 1:
        raise DivergenceError("trials must be positive")
    report = OracleReport(
        pair=(f.name, g.name), k_max=k_max, trials=trials, seed=seed, tolerance=tolerance
    )
    for k in range(2, k_max + 1):
        P, Q = random_pairs(k, trials, seed)
        xs = divergence_batch(f, P, Q)
        ys = divergence_batch(g, P, Q)
        dist = hull_distances(atlas, xs, ys)
        report.checked += trials
        report.max_distance = max(report.max_distance, float(dist.max()))
        for t in np.flatnonzero(dist > tolerance):
            report.failures.append(
                {
                    "pair": [f.name, g.name],
                    "k": k,
                    "seed": seed,
                    "trial": int(t),
                    "point": [float(xs[t]), float(ys[t])],
                    "violation_distance": float(dist[t]),
                }
            )
    return report


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def _fmt(v: float) -> str:
    if math.isinf(v):
        return "inf"
    return repr(float(v))


def atlas_csv(atlas: RangeAtlas) -> str:
    """Sample table with header ``p,q,df,dg,clipped``."""
    lines = ["p,q,df,dg,clipped"]
    clipped = atlas.clipped.tolist()
    for p, q, x, y, c in zip(atlas.p.tolist(), atlas.q.tolist(), atlas.x.tolist(), atlas.y.tolist(), clipped):
        lines.append(f"{_fmt(p)},{_fmt(q)},{_fmt(x)},{_fmt(y)},{int(c)}")
    return "\n".join(lines) + "\n"


def hull_csv(atlas: RangeAtlas) -> str:
    """Hull vertices ``x,y`` in counterclockwise order."""
    lines = ["x,y"]
    for x, y in atlas.hull.tolist():
        lines.append(f"{_fmt(x)},{_fmt(y)}")
    return "\n".join(lines) + "\n"


def unbounded_json(atlas: RangeAtlas) -> dict:
    return {
        "pair": [atlas.f.name, atlas.g.name],
        "clip_bounds": list(atlas.clip_bounds),
        "unbounded": {
            d: [w.as_dict() for w in atlas.unbounded.get(d, [])] for d in ("x", "y")
        },
    }
