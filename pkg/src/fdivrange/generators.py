"""Named generators: the power family and the classical divergences built on it.

Power family::

    phi_a(t) = (t**a - a*(t - 1) - 1) / (a*(a - 1))      a not in {0, 1}
    phi_0(t) = -ln t + t - 1
    phi_1(t) = t ln t - t + 1

Boundary limits of ``phi_a`` by regime:

==============  ===========  ===============
regime          f(0)         f*(0)
==============  ===========  ===============
a < 0           inf          1 / (1 - a)
a = 0           inf          1
0 < a < 1       1 / a        1 / (1 - a)
a = 1           1            inf
a > 1           1 / a        inf
==============  ===========  ===============

``f''(1) = 1`` throughout, and ``phi_a*`` is ``phi_{1-a}``.

Normalisations follow the definitions used for the joint-range analysis:
Hellinger is ``D_{1/2} = 2 sum (sqrt p - sqrt q)^2`` (maximum 4), total
variation is ``sum |p - q|`` (maximum 2), and LeCam is
``(1/2) D_2(P, M) + (1/2) D_2(Q, M)`` with ``M = (P + Q) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .divcore import DivergenceError, Generator

__all__ = [
    "GENERATOR_NAMES",
    "GeneratorSpec",
    "make_jensen_shannon",
    "make_lecam",
    "make_power",
    "make_total_variation",
    "parse_spec",
    "resolve",
]

_ALIASES = {"chi2": 2.0, "kl": 1.0, "rkl": 0.0, "hellinger": 0.5}

GENERATOR_NAMES = ("power:<alpha>", "tv", "js", "lecam", "hellinger", "chi2", "kl", "rkl")


# ---------------------------------------------------------------------------
# power family
# ---------------------------------------------------------------------------


def _power_limits(alpha: float) -> tuple[float, float]:
    if alpha < 0:
        return math.inf, 1.0 / (1.0 - alpha)
    if alpha == 0:
        return math.inf, 1.0
    if alpha < 1:
        return 1.0 / alpha, 1.0 / (1.0 - alpha)
    if alpha == 1:
        return 1.0, math.inf
    return 1.0 / alpha, math.inf


def _power_series(alpha: float, u: np.ndarray, nmax: int = 80) -> np.ndarray:
    # phi_a(1+u) = sum_{n>=2} c_n u^n,  c_2 = 1/2,  c_{n+1} = c_n (a - n) / (n + 1)
    total = np.zeros_like(u)
    term = 0.5 * u * u
    for n in range(2, nmax):
        total = total + term
        if not np.any(np.abs(term) > 1e-17 * np.abs(total)):
            break
        term = term * u * (alpha - n) / (n + 1)
    return total


def _power_closed(alpha: float, t: np.ndarray, u: np.ndarray) -> np.ndarray:
    if alpha == 0:
        return u - np.log(t)
    if alpha == 1:
        return t * np.log(t) - u
    return (np.power(t, alpha) - alpha * u - 1.0) / (alpha * (alpha - 1.0))


def make_power(alpha: float, name: Optional[str] = None) -> Generator:
    """The power generator ``phi_alpha``."""
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise DivergenceError(f"power index must be finite, got {alpha!r}")
    radius = min(0.25, 1.0 / max(1.0, abs(alpha)))

    def shifted(u):
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        small = np.abs(u) <= radius
        if small.any():
            out[small] = _power_series(alpha, u[small])
        big = ~small
        if big.any():
            out[big] = _power_closed(alpha, 1.0 + u[big], u[big])
        return out

    def ev(t):
        t = np.asarray(t, dtype=float)
        u = t - 1.0
        out = np.empty_like(t)
        small = np.abs(u) <= radius
        if small.any():
            out[small] = _power_series(alpha, u[small])
        big = ~small
        if big.any():
            out[big] = _power_closed(alpha, t[big], u[big])
        return out

    f0, fstar0 = _power_limits(alpha)
    return Generator(
        name=name or f"power:{alpha:g}",
        eval=ev,
        limit_at_zero=f0,
        conjugate_limit=fstar0,
        curvature_at_one=1.0,
        eval_shifted=shifted,
        power_index=alpha,
    )


# ---------------------------------------------------------------------------
# the rest
# ---------------------------------------------------------------------------


def make_total_variation() -> Generator:
    """``f(t) = |t - 1|``; the divergence is ``sum |p_i - q_i|``."""
    return Generator(
        name="tv",
        eval=lambda t: np.abs(t - 1.0),
        limit_at_zero=1.0,
        conjugate_limit=1.0,
        curvature_at_one=None,
        eval_shifted=np.abs,
    )


def _js_shifted(u):
    # With a = u / (2 + u):  f(1+u) = [(1+a) ln(1+a) + (1-a) ln(1-a)] / (2 (1-a))
    # and (1+a)ln(1+a) + (1-a)ln(1-a) = sum_{n>=1} a^{2n} / (n (2n - 1)).
    u = np.asarray(u, dtype=float)
    a = u / (2.0 + u)
    out = np.empty_like(u)
    small = np.abs(a) <= 0.2
    if small.any():
        a2 = a[small] ** 2
        s = np.zeros_like(a2)
        power = a2.copy()
        for n in range(1, 30):
            s += power / (n * (2 * n - 1))
            power = power * a2
        out[small] = s / (2.0 * (1.0 - a[small]))
    big = ~small
    if big.any():
        ab = a[big]
        out[big] = 0.5 * ((1.0 + u[big]) * np.log1p(ab) + np.log1p(-ab))
    return out


def _js_eval(t):
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    near = np.abs(t - 1.0) <= 0.5
    if near.any():
        out[near] = _js_shifted(t[near] - 1.0)
    far = ~near
    if far.any():
        tf = t[far]
        out[far] = 0.5 * (tf * np.log(2.0 * tf / (tf + 1.0)) + np.log(2.0 / (tf + 1.0)))
    return out


def make_jensen_shannon() -> Generator:
    """Generator whose divergence is ``(1/2) D(P||M) + (1/2) D(Q||M)``, ``M = (P+Q)/2``."""
    half_ln2 = 0.5 * math.log(2.0)
    return Generator(
        name="js",
        eval=_js_eval,
        limit_at_zero=half_ln2,
        conjugate_limit=half_ln2,
        curvature_at_one=0.25,
        eval_shifted=_js_shifted,
    )


def make_lecam() -> Generator:
    """``f(t) = (t - 1)^2 / (4 (t + 1))``; the divergence is ``(1/4) sum (p-q)^2/(p+q)``."""
    return Generator(
        name="lecam",
        eval=lambda t: 0.25 * (t - 1.0) ** 2 / (t + 1.0),
        limit_at_zero=0.25,
        conjugate_limit=0.25,
        curvature_at_one=0.25,
        eval_shifted=lambda u: 0.25 * u * u / (2.0 + u),
    )


# ---------------------------------------------------------------------------
# specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorSpec:
    """Parsed generator name: ``kind`` is one of power, tv, js, lecam."""

    kind: str
    alpha: Optional[float] = None
    label: str = ""

    def resolve(self) -> Generator:
        if self.kind == "power":
            return make_power(self.alpha, name=self.label or None)
        if self.kind == "tv":
            return make_total_variation()
        if self.kind == "js":
            return make_jensen_shannon()
        if self.kind == "lecam":
            return make_lecam()
        raise DivergenceError(f"unknown generator kind {self.kind!r}")


def parse_spec(text: str) -> GeneratorSpec:
    """Parse ``power:<alpha>``, ``tv``, ``js``, ``lecam`` or an alias."""
    s = text.strip().lower()
    if s in ("tv", "js", "lecam"):
        return GeneratorSpec(kind=s, label=s)
    if s in _ALIASES:
        return GeneratorSpec(kind="power", alpha=_ALIASES[s], label=s)
    if s.startswith("power:"):
        try:
            alpha = float(s.split(":", 1)[1])
        except ValueError:
            raise DivergenceError(f"bad power index in {text!r}") from None
        if not math.isfinite(alpha):
            raise DivergenceError(f"bad power index in {text!r}")
        return GeneratorSpec(kind="power", alpha=alpha, label=f"power:{alpha:g}")
    raise DivergenceError(
        f"unknown generator {text!r}; expected one of {', '.join(GENERATOR_NAMES)}"
    )


def resolve(text: str) -> Generator:
    """Generator for a spec string."""
    return parse_spec(text).resolve()
