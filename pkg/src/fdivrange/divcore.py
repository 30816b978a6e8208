"""Core f-divergence evaluation on finite discrete distributions.

Divergence values live in the extended half-line [0, inf].  They are plain
Python floats with ``math.inf`` standing for positive infinity; the only
arithmetic rule that floats get wrong for us is ``0 * inf``, which must be 0
for the ``f*(0) * P(q = 0)`` mass term, and every multiplication by a
possibly-infinite limit goes through :func:`ext_scale`.

A :class:`Generator` carries the convex function ``f`` together with its
closed-form boundary limits ``f(0)`` and ``f*(0)``.  Evaluation of a term
``q * f(p / q)`` uses the shifted form ``f(1 + u)`` with ``u = (p - q) / q``
whenever the likelihood ratio is near one, so values close to the diagonal
keep full relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

__all__ = [
    "ContractViolation",
    "Distribution",
    "DivergenceError",
    "Generator",
    "NEAR_ONE",
    "check_conjugate_symmetry",
    "check_convexity",
    "compensated_rowsum",
    "conjugate",
    "divergence",
    "divergence_batch",
    "ext_add",
    "ext_scale",
    "from_callable",
    "two_point_divergence",
]

#: Ratios with |t - 1| at most this are evaluated through ``eval_shifted``.
NEAR_ONE = 0.5

#: Tolerance on the total mass of an input probability vector.
MASS_TOLERANCE = 1e-9

# Negative rounding noise below this (relative to the term magnitudes) is
# clamped to zero; anything larger is a contract violation.
_NEGATIVE_SLACK = 1e-12


class DivergenceError(ValueError):
    """Invalid input to a divergence computation."""


class ContractViolation(RuntimeError):
    """A computed value broke a documented postcondition."""


ArrayFn = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# Extended reals
# ---------------------------------------------------------------------------


def ext_scale(c: float, v: float) -> float:
    """Return ``c * v`` with the convention ``0 * inf = 0``."""
    if c == 0.0:
        return 0.0
    return c * v


def ext_add(a: float, b: float) -> float:
    """Sum of two extended values (``finite + inf = inf``)."""
    if math.isinf(a) or math.isinf(b):
        if (a == -math.inf) or (b == -math.inf):
            raise ContractViolation("negative infinity is outside the extended half-line")
        return math.inf
    return a + b


def compensated_rowsum(terms: np.ndarray) -> np.ndarray:
    """Neumaier-compensated sum along the last axis, in index order.

    Rows containing ``+inf`` sum to ``+inf``.
    """
    terms = np.atleast_2d(np.asarray(terms, dtype=float))
    has_inf = np.isinf(terms).any(axis=-1)
    work = np.where(np.isinf(terms), 0.0, terms)
    s = np.zeros(work.shape[:-1])
    c = np.zeros(work.shape[:-1])
    for j in range(work.shape[-1]):
        x = work[..., j]
        t = s + x
        big = np.abs(s) >= np.abs(x)
        c += np.where(big, (s - t) + x, (x - t) + s)
        s = t
    out = s + c
    out[has_inf] = math.inf
    return out


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    """A convex ``f`` on (0, inf) with ``f(1) = 0`` and its boundary limits.

    Attributes
    ----------
    name:
        Identifier used in reports and on the command line.
    eval:
        Vectorised map ``t -> f(t)`` for ``t > 0``.
    limit_at_zero:
        ``f(0) = lim_{t->0} f(t)``, possibly ``inf``.
    conjugate_limit:
        ``f*(0) = lim_{t->inf} f(t) / t``, possibly ``inf``.
    curvature_at_one:
        ``f''(1)``, or ``None`` when ``f`` is not twice differentiable at 1.
    eval_shifted:
        Vectorised map ``u -> f(1 + u)`` for ``u > -1``, accurate for small
        ``|u|``.  Defaults to ``eval(1 + u)``.
    power_index:
        ``alpha`` when this generator is the power function ``phi_alpha``.
    approximate_limits:
        True when the limits were estimated numerically.
    """

    name: str
    eval: ArrayFn = field(repr=False, compare=False)
    limit_at_zero: float
    conjugate_limit: float
    curvature_at_one: Optional[float] = None
    eval_shifted: Optional[ArrayFn] = field(default=None, repr=False, compare=False)
    power_index: Optional[float] = None
    approximate_limits: bool = False

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(self.eval(t), dtype=float)
        return float(out) if out.ndim == 0 else out

    def shifted(self, u) -> np.ndarray:
        """``f(1 + u)``."""
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            if self.eval_shifted is not None:
                return np.asarray(self.eval_shifted(u), dtype=float)
            return np.asarray(self.eval(1.0 + u), dtype=float)

    @property
    def is_smooth(self) -> bool:
        return self.curvature_at_one is not None


def from_callable(
    name: str,
    fn: ArrayFn,
    limit_at_zero: Optional[float] = None,
    conjugate_limit: Optional[float] = None,
    curvature_at_one: Optional[float] = None,
) -> Generator:
    """Wrap a user-supplied convex function.

    Missing limits are estimated by evaluating at ``t = 1e-12`` and
    ``t = 1e12``; the resulting generator is flagged ``approximate_limits``.
    """
    approx = False
    with np.errstate(all="ignore"):
        if limit_at_zero is None:
            limit_at_zero = float(fn(np.asarray(1e-12)))
            approx = True
        if conjugate_limit is None:
            conjugate_limit = float(fn(np.asarray(1e12))) / 1e12
            approx = True
    return Generator(
        name=name,
        eval=fn,
        limit_at_zero=limit_at_zero,
        conjugate_limit=conjugate_limit,
        curvature_at_one=curvature_at_one,
        approximate_limits=approx,
    )


def conjugate(f: Generator) -> Generator:
    """The generator ``f*(t) = t f(1/t)``, which satisfies ``D_f(P,Q) = D_f*(Q,P)``."""

    def ev(t):
        return t * f.eval(1.0 / t)

    def ev_shift(u):
        return (1.0 + u) * f.shifted(-u / (1.0 + u))

    name = f.name[:-1] if f.name.endswith("*") else f.name + "*"
    return Generator(
        name=name,
        eval=ev,
        limit_at_zero=f.conjugate_limit,
        conjugate_limit=f.limit_at_zero,
        curvature_at_one=f.curvature_at_one,
        eval_shifted=ev_shift,
        power_index=None if f.power_index is None else 1.0 - f.power_index,
        approximate_limits=f.approximate_limits,
    )


def check_convexity(f: Generator, rng: np.random.Generator, n: int = 1000) -> bool:
    """Spot-check midpoint-style convexity of ``f`` on random triples."""
    t1 = np.exp(rng.uniform(-8, 8, n))
    t2 = np.exp(rng.uniform(-8, 8, n))
    lam = rng.uniform(0, 1, n)
    lhs = f(lam * t1 + (1 - lam) * t2)
    rhs = lam * f(t1) + (1 - lam) * f(t2)
    scale = np.maximum(1.0, np.abs(rhs))
    return bool(np.all(lhs <= rhs + 1e-12 * scale))


# ---------------------------------------------------------------------------
# Distributions
# ---------------------------------------------------------------------------


class Distribution:
    """An immutable finite probability vector.

    Inputs whose total mass is within ``1e-9`` of one are renormalised;
    negative or non-finite weights are rejected.
    """

    __slots__ = ("_w",)

    def __init__(self, weights: Union[Sequence[float], np.ndarray, "Distribution"]):
        if isinstance(weights, Distribution):
            self._w = weights._w
            return
        w = np.array(weights, dtype=float).reshape(-1)
        if w.size < 1:
            raise DivergenceError("a distribution needs at least one weight")
        if not np.all(np.isfinite(w)):
            raise DivergenceError("weights must be finite")
        if np.any(w < 0):
            raise DivergenceError(f"negative weight in {w.tolist()}")
        total = math.fsum(w)
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise DivergenceError(f"weights sum to {total!r}, not 1")
        if total != 1.0:
            w = w / total
            w[np.argmax(w)] += 1.0 - math.fsum(w)
        w.setflags(write=False)
        self._w = w

    @property
    def weights(self) -> np.ndarray:
        return self._w

    def __len__(self) -> int:
        return self._w.size

    def __iter__(self):
        return iter(self._w.tolist())

    def __getitem__(self, i):
        return self._w[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Distribution) and np.array_equal(self._w, other._w)

    def __hash__(self) -> int:
        return hash(self._w.tobytes())

    def __repr__(self) -> str:
        return f"Distribution({self._w.tolist()})"


def _as_weights(P) -> np.ndarray:
    return P.weights if isinstance(P, Distribution) else Distribution(P).weights


# ---------------------------------------------------------------------------
# Divergence
# ---------------------------------------------------------------------------


def _terms(f: Generator, P: np.ndarray, Q: np.ndarray, D: np.ndarray) -> np.ndarray:
    """Per-coordinate contributions ``q_i f(p_i/q_i)`` with boundary conventions.

    ``D`` holds ``P - Q`` computed by the caller (so two-point callers can
    supply it without cancellation).
    """
    out = np.zeros(P.shape)
    qpos = Q > 0
    with np.errstate(all="ignore"):
        regular = qpos & (P > 0)
        if regular.any():
            p, q, d = P[regular], Q[regular], D[regular]
            u = d / q
            t = p / q
            val = np.empty(p.shape)
            near = np.abs(u) <= NEAR_ONE
            if near.any():
                val[near] = f.shifted(u[near])
            far = ~near
            if far.any():
                val[far] = np.asarray(f.eval(t[far]), dtype=float)
            contrib = q * val
            # p/q overflowed: the term is the q -> 0 limit p f*(0)
            blown = np.isinf(t)
            if blown.any():
                contrib[blown] = [ext_scale(pi, f.conjugate_limit) for pi in p[blown]]
            out[regular] = contrib
        zero_p = qpos & (P == 0)
        if zero_p.any():
            out[zero_p] = Q[zero_p] * f.limit_at_zero
        zero_q = (~qpos) & (P > 0)
        if zero_q.any():
            out[zero_q] = P[zero_q] * f.conjugate_limit
    return out


def _finish(f: Generator, terms: np.ndarray) -> np.ndarray:
    if np.isnan(terms).any():
        raise ContractViolation(f"generator {f.name!r} produced NaN")
    total = compensated_rowsum(terms)
    scale = np.abs(np.where(np.isinf(terms), 0.0, terms)).sum(axis=-1)
    bad = total < -_NEGATIVE_SLACK * np.maximum(scale, 1e-300)
    if bad.any():
        raise ContractViolation(
            f"negative divergence {total[bad][0]!r} for generator {f.name!r}"
        )
    return np.maximum(total, 0.0)


def divergence(f: Generator, P, Q) -> float:
    """``D_f(P, Q)`` as an extended nonnegative float.

    Coordinates with ``q_i > 0`` contribute ``q_i f(p_i / q_i)`` (``q_i f(0)``
    when ``p_i = 0``); coordinates with ``q_i = 0`` contribute
    ``p_i f*(0)``.  Terms are accumulated in index order with compensated
    summation.
    """
    p = _as_weights(P)
    q = _as_weights(Q)
    if p.size != q.size:
        raise DivergenceError(f"length mismatch: {p.size} vs {q.size}")
    terms = _terms(f, p[None, :], q[None, :], (p - q)[None, :])
    return float(_finish(f, terms)[0])


def divergence_batch(f: Generator, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Row-wise divergences for stacked probability vectors of shape ``(n, k)``.

    Rows are assumed to be valid probability vectors already.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape:
        raise DivergenceError(f"shape mismatch: {P.shape} vs {Q.shape}")
    if np.any(P < 0) or np.any(Q < 0):
        raise DivergenceError("negative weight in batch")
    return _finish(f, _terms(f, P, Q, P - Q))


def two_point_divergence(f: Generator, p, q) -> np.ndarray:
    """``D_f((1-p, p), (1-q, q))`` elementwise over arrays ``p`` and ``q``."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    p, q = np.broadcast_arrays(p, q)
    P = np.stack([1.0 - p, p], axis=-1)
    Q = np.stack([1.0 - q, q], axis=-1)
    d = q - p
    D = np.stack([d, -d], axis=-1)
    return _finish(f, _terms(f, P, Q, D))


def check_conjugate_symmetry(f: Generator, P, Q, rtol: float = 1e-10) -> bool:
    """Whether ``D_f(P, Q)`` and ``D_{f*}(Q, P)`` agree."""
    a = divergence(f, P, Q)
    b = divergence(conjugate(f), Q, P)
    if math.isinf(a) or math.isinf(b):
        return math.isinf(a) and math.isinf(b)
    return abs(a - b) <= rtol * max(abs(a), abs(b)) + 1e-300
