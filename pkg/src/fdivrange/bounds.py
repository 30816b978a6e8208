"""Ratio diagnostics, best-constant certificates and the (D_2, D_3) boundary.

For generators ``f`` and ``g`` the best constants in

    D_g >= beta * D_f        and        D_g <= gamma * D_f

are the infimum and supremum of ``D_g / D_f`` over all pairs.  By the
mediant inequality ``sum a_i / sum b_i`` lies between the extreme ``a_i / b_i``,
so these equal the extremes over two-point pairs, which the atlas samples.
The ratio of the generators themselves near ``t = 0``, ``t = inf`` and
``t = 1`` is reachable along two-point rays and caps the sampled extremes.

All numeric limits here are estimates on finite grids, not proofs.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional, Union

import numpy as np

from .divcore import DivergenceError, Generator, two_point_divergence
from .jointrange import RangeAtlas, TwoPointParam, _jsonable

__all__ = [
    "CertificateResult",
    "PinskerReport",
    "RatioLimits",
    "certify_lower",
    "certify_upper",
    "d2d3_boundary",
    "d2d3_range_membership",
    "pinsker_floor_check",
    "ratio_limits",
]

#: Estimates beyond this are reported as infinite, below its inverse as 0.
DIVERGENCE_FLAG = 1e10
#: Certified constants at or below this are treated as zero.
VACUOUS_THRESHOLD = 1e-6
GOLDEN_ITERATIONS = 60

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RatioLimits:
    """Endpoint estimates of ``g(t) / f(t)``.

    ``method_*`` records how each endpoint was obtained: ``"power"`` (leading
    terms of two power generators), ``"limits"`` (ratio of the generators'
    boundary values), or ``"numeric"`` (grid estimate).
    """

    liminf_at_zero: float
    limsup_at_zero: float
    liminf_at_infinity: float
    limsup_at_infinity: float
    ratio_at_one: Optional[float]
    method_at_zero: str = "numeric"
    method_at_infinity: str = "numeric"
    method_at_one: str = "curvature"

    def to_dict(self) -> dict:
        return asdict(self)


Witness = Union[TwoPointParam, str]


@dataclass(frozen=True)
class CertificateResult:
    """``direction`` is ``lower`` (``D_g >= c D_f``) or ``upper`` (``D_g <= c D_f``).

    ``witness`` is the two-point parameter attaining the constant, or a ray
    name (``"t->0"``, ``"t->inf"``, ``"t->1"``) when a limit attains it.
    """

    pair: tuple[str, str]
    direction: str
    constant: float
    status: str
    witness: Witness
    diagnostics: RatioLimits

    def to_dict(self) -> dict:
        w = self.witness.as_dict() if isinstance(self.witness, TwoPointParam) else {"ray": self.witness}
        return {
            "pair": list(self.pair),
            "direction": self.direction,
            "constant": self.constant,
            "status": self.status,
            "witness": w,
            "diagnostics": self.diagnostics.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2)


# ---------------------------------------------------------------------------
# ratio limits
# ---------------------------------------------------------------------------


def _power_ratio_at_zero(a: float, b: float) -> float:
    # lim_{t->0} phi_b(t) / phi_a(t)
    fa, fb = 1.0 / a if a > 0 else math.inf, 1.0 / b if b > 0 else math.inf
    if a > 0 and b > 0:
        return a / b
    if math.isfinite(fa):
        return math.inf
    if math.isfinite(fb):
        return 0.0
    # both blow up; the more negative index (t**b, or -ln t at 0) wins
    if a == b:
        return 1.0
    return math.inf if b < a else 0.0


def _limit_ratio(fa: float, fb: float) -> Optional[float]:
    # ratio of boundary values when they decide the limit
    if math.isfinite(fa) and math.isfinite(fb) and fa > 0:
        return fb / fa
    if math.isfinite(fa) and fa > 0 and math.isinf(fb):
        return math.inf
    if math.isinf(fa) and math.isfinite(fb):
        return 0.0
    return None


def _tail_estimate(r: np.ndarray) -> tuple[float, float]:
    """(liminf, limsup) from ratios ordered towards the endpoint.

    The last decade is the tail.  Growth past :data:`DIVERGENCE_FLAG`, or
    growth that does not slow down from one decade to the next, is read as
    divergence; decay below the inverse flag as a zero limit.
    """
    per = max(r.size // 10, 2)
    tail = r[-per - 1 :]
    prev = r[-2 * per - 1 : -per]
    lo, hi = float(tail.min()), float(tail.max())
    step_tail, step_prev = tail[-1] - tail[0], prev[-1] - prev[0]
    unslowed = step_tail > 0 and step_prev > 0 and step_tail >= 0.5 * step_prev
    if hi > DIVERGENCE_FLAG or (unslowed and tail[-1] > 1.0):
        hi = math.inf
        if np.all(np.diff(tail) >= 0):
            lo = math.inf
    elif lo < 1.0 / DIVERGENCE_FLAG and tail[-1] <= tail[0]:
        lo = 0.0
        if hi < 1.0 / DIVERGENCE_FLAG:
            hi = 0.0
    return lo, hi


def _numeric_endpoint(f: Generator, g: Generator, t: np.ndarray) -> tuple[float, float]:
    fv, gv = f(t), g(t)
    ok = np.isfinite(fv) & np.isfinite(gv) & (fv != 0)
    if ok.sum() < 4:
        raise DivergenceError(f"cannot estimate {g.name}/{f.name}: f vanishes on the grid")
    return _tail_estimate(gv[ok] / fv[ok])


def _ratio_at_one(f: Generator, g: Generator) -> tuple[Optional[float], str]:
    if f.curvature_at_one and g.curvature_at_one is not None:
        return g.curvature_at_one / f.curvature_at_one, "curvature"
    # numeric: approach t = 1 from both sides
    u = np.logspace(-2, -12, 101)
    est = []
    for sgn in (1.0, -1.0):
        fv, gv = f.shifted(sgn * u), g.shifted(sgn * u)
        ok = np.isfinite(fv) & np.isfinite(gv) & (fv > 0)
        if ok.sum() < 4:
            return None, "numeric"
        est.append(_tail_estimate(gv[ok] / fv[ok]))
    lo = min(e[0] for e in est)
    hi = max(e[1] for e in est)
    if hi == math.inf:
        return math.inf, "numeric"
    if lo == 0.0:
        return 0.0, "numeric"
    return 0.5 * (lo + hi), "numeric"


def ratio_limits(f: Generator, g: Generator) -> RatioLimits:
    """Estimates of the liminf/limsup of ``g(t)/f(t)`` at 0, infinity and 1."""
    if f.power_index is not None and g.power_index is not None:
        a, b = f.power_index, g.power_index
        r0, rinf = _power_ratio_at_zero(a, b), _power_ratio_at_zero(1.0 - a, 1.0 - b)
        lo0 = hi0 = r0
        loi = hii = rinf
        m0 = mi = "power"
    else:
        r0 = None if f.approximate_limits or g.approximate_limits else _limit_ratio(
            f.limit_at_zero, g.limit_at_zero
        )
        if r0 is None:
            lo0, hi0 = _numeric_endpoint(f, g, np.logspace(-2, -12, 201))
            m0 = "numeric"
        else:
            lo0 = hi0 = r0
            m0 = "limits"
        rinf = None if f.approximate_limits or g.approximate_limits else _limit_ratio(
            f.conjugate_limit, g.conjugate_limit
        )
        if rinf is None:
            loi, hii = _numeric_endpoint(f, g, np.logspace(2, 12, 201))
            mi = "numeric"
        else:
            loi = hii = rinf
            mi = "limits"
    one, m1 = _ratio_at_one(f, g)
    return RatioLimits(
        liminf_at_zero=lo0,
        limsup_at_zero=hi0,
        liminf_at_infinity=loi,
        limsup_at_infinity=hii,
        ratio_at_one=one,
        method_at_zero=m0,
        method_at_infinity=mi,
        method_at_one=m1,
    )


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


def _same_generator(f: Generator, g: Generator) -> bool:
    if f is g:
        return True
    if f.power_index is not None and g.power_index is not None:
        return f.power_index == g.power_index
    return f.name == g.name and f.power_index is None and g.power_index is None


def _sample_ratios(atlas: RangeAtlas) -> np.ndarray:
    """``y / x`` per sample; NaN where undefined (x = 0 or both infinite)."""
    x, y = atlas.x, atlas.y
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(x > 0, y / x, np.nan)
    return r


def _ratio_at(f: Generator, g: Generator, p: float, q: float) -> float:
    x = two_point_divergence(f, p, q)[0]
    y = two_point_divergence(g, p, q)[0]
    if not x > 0 or (math.isinf(x) and math.isinf(y)):
        return math.nan
    return float(y / x)


def _golden(fun, lo: float, hi: float, maximise: bool) -> tuple[float, float]:
    sign = -1.0 if maximise else 1.0

    def h(s):
        v = fun(s)
        return math.inf if math.isnan(v) else sign * v

    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    hc, hd = h(c), h(d)
    for _ in range(GOLDEN_ITERATIONS):
        if hc <= hd:
            b, d, hd = d, c, hc
            c = b - _INV_PHI * (b - a)
            hc = h(c)
        else:
            a, c, hc = c, d, hd
            d = a + _INV_PHI * (b - a)
            hd = h(d)
    s = c if hc <= hd else d
    return s, sign * min(hc, hd)


def _neighbours(grid: np.ndarray, v: float) -> tuple[float, float]:
    i = int(np.searchsorted(grid, v))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)] if i < grid.size and grid[i] == v else grid[min(i, grid.size - 1)]
    return float(lo), float(hi)


def _refine_extreme(f, g, atlas: RangeAtlas, k: int, maximise: bool) -> tuple[float, TwoPointParam]:
    """Golden-section search through the best sample, one parameter at a time."""
    p, q = float(atlas.p[k]), float(atlas.q[k])
    best = _ratio_at(f, g, p, q)
    better = (lambda a, b: a > b) if maximise else (lambda a, b: a < b)
    grid = np.unique(np.concatenate([atlas.p, atlas.q]))
    # along p with q fixed, then along q with p fixed
    lo, hi = _neighbours(grid, p)
    hi = min(hi, q)
    if hi > lo:
        s, v = _golden(lambda s: _ratio_at(f, g, s, q), lo, hi, maximise)
        if better(v, best):
            best, p = v, s
    lo, hi = _neighbours(grid, q)
    lo = max(lo, p)
    if hi > lo:
        s, v = _golden(lambda s: _ratio_at(f, g, p, s), lo, hi, maximise)
        if better(v, best):
            best, q = v, s
    return best, TwoPointParam(p, q)


def _check_atlas(f: Generator, g: Generator, atlas: RangeAtlas) -> None:
    if len(atlas) == 0:
        raise DivergenceError("atlas is empty")


def certify_lower(f: Generator, g: Generator, atlas: RangeAtlas) -> CertificateResult:
    """Largest ``beta`` with ``D_g >= beta * D_f`` on the atlas and its limits."""
    _check_atlas(f, g, atlas)
    lims = ratio_limits(f, g)
    pair = (f.name, g.name)
    if _same_generator(f, g):
        return CertificateResult(pair, "lower", 1.0, "finite", "t->1", lims)
    r = _sample_ratios(atlas)
    ok = ~np.isnan(r)
    if not ok.any():
        raise DivergenceError("atlas has no sample with D_f > 0")
    k = int(np.flatnonzero(ok)[np.argmin(r[ok])])
    beta, witness = float(r[k]), TwoPointParam(float(atlas.p[k]), float(atlas.q[k]))
    if math.isfinite(beta) and beta > 0:
        beta, witness = _refine_extreme(f, g, atlas, k, maximise=False)
    caps = [
        (lims.liminf_at_zero, "t->0"),
        (lims.liminf_at_infinity, "t->inf"),
    ]
    if lims.ratio_at_one is not None:
        caps.append((lims.ratio_at_one, "t->1"))
    for c, ray in caps:
        if c < beta:
            beta, witness = c, ray
    if lims.liminf_at_zero == 0.0 or lims.liminf_at_infinity == 0.0 or beta <= VACUOUS_THRESHOLD:
        return CertificateResult(pair, "lower", 0.0, "vacuous-zero", witness, lims)
    return CertificateResult(pair, "lower", beta, "finite", witness, lims)


def certify_upper(f: Generator, g: Generator, atlas: RangeAtlas) -> CertificateResult:
    """Smallest ``gamma`` with ``D_g <= gamma * D_f``, or why none exists.

    ``infinite-per-lemma-11`` means ``g/f`` is unbounded towards ``t -> 0`` or
    ``t -> inf`` (the latter covers ``g*(0) = inf`` with ``f*(0)`` finite);
    ``infinite-near-diagonal`` means it is unbounded as ``t -> 1``.
    """
    _check_atlas(f, g, atlas)
    lims = ratio_limits(f, g)
    pair = (f.name, g.name)
    if _same_generator(f, g):
        return CertificateResult(pair, "upper", 1.0, "finite", "t->1", lims)
    if lims.limsup_at_infinity == math.inf:
        return CertificateResult(pair, "upper", math.inf, "infinite-per-lemma-11", "t->inf", lims)
    if lims.limsup_at_zero == math.inf:
        return CertificateResult(pair, "upper", math.inf, "infinite-per-lemma-11", "t->0", lims)
    if lims.ratio_at_one == math.inf:
        return CertificateResult(pair, "upper", math.inf, "infinite-near-diagonal", "t->1", lims)
    r = _sample_ratios(atlas)
    ok = ~np.isnan(r)
    if not ok.any():
        raise DivergenceError("atlas has no sample with D_f > 0")
    k = int(np.flatnonzero(ok)[np.argmax(r[ok])])
    gamma, witness = float(r[k]), TwoPointParam(float(atlas.p[k]), float(atlas.q[k]))
    if math.isinf(gamma):
        # D_g infinite where D_f is finite: the swapped-argument clause
        return CertificateResult(pair, "upper", math.inf, "infinite-per-lemma-11", witness, lims)
    gamma, witness = _refine_extreme(f, g, atlas, k, maximise=True)
    caps = [(lims.limsup_at_zero, "t->0"), (lims.limsup_at_infinity, "t->inf")]
    if lims.ratio_at_one is not None:
        caps.append((lims.ratio_at_one, "t->1"))
    for c, ray in caps:
        if c > gamma:
            gamma, witness = c, ray
    return CertificateResult(pair, "upper", gamma, "finite", witness, lims)


# ---------------------------------------------------------------------------
# the (D_2, D_3) range
# ---------------------------------------------------------------------------

BOUNDARY_TOL = 1e-9


def d2d3_boundary(x: float) -> float:
    """Lower boundary ``(2/3) x (x + 1)`` of the ``(D_2, D_3)`` joint range."""
    if x < 0:
        raise DivergenceError(f"negative divergence value {x!r}")
    return 2.0 / 3.0 * x * (x + 1.0)


def d2d3_range_membership(x: float, y: float) -> str:
    """Classify ``(x, y)`` against the ``(D_2, D_3)`` range.

    One of ``origin``, ``closure-only`` (``x = 0 < y``), ``boundary-curve``,
    ``interior`` or ``outside``.
    """
    if x < 0 or y < 0:
        raise DivergenceError(f"negative divergence value in ({x!r}, {y!r})")
    if x == 0:
        return "origin" if y == 0 else "closure-only"
    b = d2d3_boundary(x)
    if abs(y - b) <= BOUNDARY_TOL:
        return "boundary-curve"
    return "interior" if y > b else "outside"


# ---------------------------------------------------------------------------
# Pinsker floor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PinskerReport:
    checked: int
    excluded: int
    violations: int
    min_slack: float
    argmin: Optional[TwoPointParam]

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["argmin"] = self.argmin.as_dict() if self.argmin else None
        return d


def pinsker_floor_check(atlas: RangeAtlas, tolerance: float = 1e-9) -> PinskerReport:
    """``D >= V**2 / 2`` on every finite sample of a ``(tv, kl)`` atlas."""
    if atlas.f.name != "tv" or atlas.g.power_index != 1.0:
        raise DivergenceError(
            f"Pinsker check needs a (tv, kl) atlas, got ({atlas.f.name}, {atlas.g.name})"
        )
    fin = atlas.finite
    v, d = atlas.x[fin], atlas.y[fin]
    slack = d - 0.5 * v * v
    k = int(np.argmin(slack))
    idx = np.flatnonzero(fin)[k]
    return PinskerReport(
        checked=int(fin.sum()),
        excluded=int((~fin).sum()),
        violations=int((slack < -tolerance).sum()),
        min_slack=float(slack[k]),
        argmin=TwoPointParam(float(atlas.p[idx]), float(atlas.q[idx])),
    )
