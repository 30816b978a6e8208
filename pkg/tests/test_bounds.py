import json
import math

import numpy as np
import pytest
from scipy.spatial.distance import jensenshannon

from fdivrange.bounds import (
    certify_lower,
    certify_upper,
    d2d3_boundary,
    d2d3_range_membership,
    pinsker_floor_check,
    ratio_limits,
)
from fdivrange.divcore import DivergenceError, from_callable
from fdivrange.generators import resolve
from fdivrange.jointrange import GridSpec, TwoPointParam, sample_atlas, two_point_pair

from conftest import cached_atlas

LN2 = math.log(2)


def atlas_for(fs, gs):
    return cached_atlas(fs, gs)


def gens(fs, gs):
    f = resolve(fs)
    return f, (f if fs == gs else resolve(gs))


# ---------------------------------------------------------------------------
# ratio limits
# ---------------------------------------------------------------------------


def test_d2d3_ratio_limits():
    lims = ratio_limits(*gens("chi2", "power:3"))
    assert lims.liminf_at_infinity == math.inf
    assert lims.liminf_at_zero == pytest.approx(2 / 3, abs=1e-6)
    assert lims.ratio_at_one == 1.0


@pytest.mark.parametrize("spec", ["tv", "js", "kl", "power:-1", "lecam"])
def test_identical_generators_have_unit_limits(spec):
    f = resolve(spec)
    lims = ratio_limits(f, f)
    for v in (lims.liminf_at_zero, lims.limsup_at_zero, lims.liminf_at_infinity, lims.limsup_at_infinity):
        assert v == pytest.approx(1.0, rel=1e-9)
    assert lims.ratio_at_one == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("fs, gs", [("chi2", "power:3"), ("tv", "js"), ("js", "tv"), ("kl", "tv"),
                                    ("hellinger", "lecam"), ("rkl", "power:0.3")])
def test_limits_are_ordered(fs, gs):
    lims = ratio_limits(*gens(fs, gs))
    assert lims.liminf_at_zero <= lims.limsup_at_zero
    assert lims.liminf_at_infinity <= lims.limsup_at_infinity


@pytest.mark.parametrize("a, b", [(2.0, 3.0), (0.5, 2.0), (-1.0, 0.0), (0.0, 1.0), (1.0, 0.3), (-2.0, -1.0)])
def test_power_limits_agree_with_evaluation(a, b):
    # closed-form leading terms against the generators at t = 1e-8 and 1e8
    f, g = resolve(f"power:{a}"), resolve(f"power:{b}")
    lims = ratio_limits(f, g)
    for t, v in ((1e-8, lims.liminf_at_zero), (1e8, lims.liminf_at_infinity)):
        r = float(g(t) / f(t))
        if math.isinf(v):
            assert r > 10
        elif v == 0:
            assert r < 0.1
        else:
            assert r == pytest.approx(v, rel=0.05)


def test_numeric_limits_for_generic_generators():
    f = from_callable("sq", lambda t: (t - 1.0) ** 2)
    g = from_callable("abs", lambda t: np.abs(t - 1.0))
    lims = ratio_limits(f, g)
    assert lims.method_at_zero == "numeric"
    assert lims.liminf_at_zero == pytest.approx(1.0, rel=1e-3)
    assert lims.liminf_at_infinity == 0.0
    assert lims.ratio_at_one == math.inf


def test_all_points_excluded_is_an_error():
    zero = from_callable("zero", lambda t: 0.0 * t, limit_at_zero=0.0, conjugate_limit=0.0)
    with pytest.raises(DivergenceError):
        ratio_limits(zero, resolve("tv"))


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


def test_d2d3_certificates():
    f, g = gens("chi2", "power:3")
    atlas = atlas_for("chi2", "power:3")
    lower = certify_lower(f, g, atlas)
    assert lower.status == "finite"
    assert lower.constant == pytest.approx(2 / 3, abs=1e-4)
    upper = certify_upper(f, g, atlas)
    assert upper.status == "infinite-per-lemma-11"
    assert upper.witness == "t->inf"


@pytest.mark.parametrize("spec", ["kl", "js", "power:3"])
def test_identical_generators_certify_one(spec):
    f = resolve(spec)
    atlas = sample_atlas(f, f, GridSpec(resolution=16))
    assert certify_lower(f, f, atlas).constant == 1.0
    assert certify_upper(f, f, atlas).constant == 1.0


def test_swapped_d2d3_lower_is_vacuous():
    f, g = gens("power:3", "chi2")
    lower = certify_lower(f, g, atlas_for("power:3", "chi2"))
    assert lower.status == "vacuous-zero" and lower.constant == 0.0


def brute_tv_js_ratio():
    # sup JS / V over a fine two-point grid, with scipy as the JS reference
    g = np.linspace(0, 1, 401)
    best = 0.0
    for p in g:
        for q in g[g > p]:
            P, Q = [1 - p, p], [1 - q, q]
            v = abs(p - q) * 2
            js = jensenshannon(P, Q) ** 2
            best = max(best, js / v)
    return best


def test_js_ceiling_against_brute_force():
    f, g = gens("tv", "js")
    upper = certify_upper(f, g, atlas_for("tv", "js"))
    assert upper.status == "finite"
    assert upper.constant == pytest.approx(LN2 / 2, abs=1e-4)
    assert upper.constant == pytest.approx(brute_tv_js_ratio(), abs=1e-4)


def test_tv_kl_lower_is_vacuous():
    f, g = gens("tv", "kl")
    lower = certify_lower(f, g, atlas_for("tv", "kl"))
    assert lower.status == "vacuous-zero" and lower.constant == 0.0
    assert certify_upper(f, g, atlas_for("tv", "kl")).status == "infinite-per-lemma-11"


def test_tv_over_js_is_unbounded_near_the_diagonal():
    f, g = gens("js", "tv")
    upper = certify_upper(f, g, atlas_for("js", "tv"))
    assert upper.status == "infinite-near-diagonal" and upper.constant == math.inf


@pytest.mark.parametrize("fs, gs", [("chi2", "power:3"), ("hellinger", "lecam"), ("lecam", "hellinger"),
                                    ("js", "tv"), ("tv", "js")])
def test_lower_certificate_is_sound_on_samples(fs, gs):
    f, g = gens(fs, gs)
    atlas = atlas_for(fs, gs)
    beta = certify_lower(f, g, atlas).constant
    fin = atlas.finite
    assert np.all(beta * atlas.x[fin] <= atlas.y[fin] + 1e-9)


@pytest.mark.parametrize("fs, gs", [("hellinger", "lecam"), ("lecam", "hellinger"), ("tv", "js")])
def test_upper_certificate_is_sound_on_samples(fs, gs):
    f, g = gens(fs, gs)
    atlas = atlas_for(fs, gs)
    gamma = certify_upper(f, g, atlas).constant
    fin = atlas.finite
    assert np.all(atlas.y[fin] <= gamma * atlas.x[fin] + 1e-9)


def test_lower_never_exceeds_the_limits():
    for fs, gs in [("chi2", "power:3"), ("hellinger", "lecam"), ("lecam", "hellinger"), ("js", "tv")]:
        f, g = gens(fs, gs)
        res = certify_lower(f, g, atlas_for(fs, gs))
        lims = res.diagnostics
        caps = [lims.liminf_at_zero, lims.liminf_at_infinity]
        if lims.ratio_at_one is not None:
            caps.append(lims.ratio_at_one)
        assert res.constant <= min(caps) + 1e-6


@pytest.mark.parametrize("fs, gs", [("hellinger", "lecam"), ("js", "tv"), ("chi2", "power:3")])
def test_role_swap_consistency(fs, gs):
    f, g = gens(fs, gs)
    lower = certify_lower(f, g, atlas_for(fs, gs))
    upper = certify_upper(g, f, atlas_for(gs, fs))
    if lower.status == "finite" and upper.status == "finite":
        assert lower.constant == pytest.approx(1 / upper.constant, abs=1e-4)
    else:
        # a zero constant one way is an unbounded ratio the other way
        assert (lower.constant == 0) == (upper.constant == math.inf)


@pytest.mark.parametrize("fs, gs", [("chi2", "power:3"), ("hellinger", "lecam"), ("kl", "chi2"), ("js", "lecam")])
def test_ratio_near_the_diagonal_matches_curvatures(fs, gs):
    f, g = gens(fs, gs)
    atlas = atlas_for(fs, gs)
    expected = ratio_limits(f, g).ratio_at_one
    # nearly equal interior pairs, where p / q and (1-p) / (1-q) are close to 1
    near = (atlas.x > 0) & (atlas.x < 1e-4) & (atlas.p > 0.05) & (atlas.q < 0.95)
    assert near.sum() > 100
    r = atlas.y[near] / atlas.x[near]
    assert r.min() == pytest.approx(expected, rel=0.05)
    assert r.max() == pytest.approx(expected, rel=0.05)


def test_certificate_json():
    f, g = gens("tv", "js")
    cert = certify_upper(f, g, atlas_for("tv", "js"))
    data = json.loads(cert.to_json())
    assert set(data) == {"pair", "direction", "constant", "status", "witness", "diagnostics"}
    assert data["pair"] == ["tv", "js"] and data["direction"] == "upper"
    assert data["witness"] == {"p": 0.0, "q": 1.0}
    inf_cert = certify_upper(*gens("chi2", "power:3"), atlas_for("chi2", "power:3"))
    data = json.loads(inf_cert.to_json())
    assert data["constant"] == "inf" and data["witness"] == {"ray": "t->inf"}


def test_empty_atlas_is_an_error():
    f, g = gens("chi2", "power:3")
    atlas = sample_atlas(f, g, GridSpec(resolution=4, refine=False))
    atlas.p = atlas.p[:0]
    with pytest.raises(DivergenceError):
        certify_lower(f, g, atlas)
    with pytest.raises(DivergenceError):
        certify_upper(f, g, atlas)


# ---------------------------------------------------------------------------
# the (D_2, D_3) boundary
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("x, y", [(0.0, 0.0), (0.5, 0.5), (2.0, 4.0)])
def test_boundary_values(x, y):
    assert d2d3_boundary(x) == pytest.approx(y, rel=1e-15)


def test_boundary_matches_point_mass_family():
    # P = (1, 0), Q = (1 - q, q): both divergences in closed form
    f, g = gens("chi2", "power:3")
    for q in np.linspace(0.01, 0.95, 40):
        pair = two_point_pair(f, g, TwoPointParam(0.0, q))
        assert pair.x == pytest.approx(0.5 * (1 / (1 - q) - 1), rel=1e-12)
        assert pair.y == pytest.approx((1 / (1 - q) ** 2 - 1) / 6, rel=1e-12)
        assert pair.y == pytest.approx(d2d3_boundary(pair.x), rel=1e-12)


def test_boundary_via_parametrisation():
    x = 2.0
    q = 1 - 1 / (2 * x + 1)
    assert d2d3_boundary(x) == pytest.approx((1 / (1 - q) ** 2 - 1) / 6, rel=1e-14)


def test_boundary_rejects_negative():
    with pytest.raises(DivergenceError):
        d2d3_boundary(-1.0)


@pytest.mark.parametrize(
    "x, y, label",
    [(0.5, 0.5, "boundary-curve"), (0.0, 1.0, "closure-only"), (1.0, 0.5, "outside"),
     (0.0, 0.0, "origin"), (1.0, 2.0, "interior")],
)
def test_membership(x, y, label):
    assert d2d3_range_membership(x, y) == label


def test_membership_rejects_negative():
    with pytest.raises(DivergenceError):
        d2d3_range_membership(-0.1, 1.0)


def test_membership_agrees_with_atlas():
    atlas = atlas_for("chi2", "power:3")
    rng = np.random.default_rng(1)
    from fdivrange.jointrange import hull_contains

    for x, y in rng.uniform(0.01, 5, size=(200, 2)):
        label = d2d3_range_membership(x, y)
        if abs(y - d2d3_boundary(x)) < 1e-4:
            continue
        assert hull_contains(atlas, (x, y), 1e-9) == (label == "interior")


# ---------------------------------------------------------------------------
# Pinsker floor
# ---------------------------------------------------------------------------


def test_pinsker_floor():
    report = pinsker_floor_check(atlas_for("tv", "kl"))
    assert report.ok and report.violations == 0
    assert report.min_slack >= -1e-9
    assert report.excluded > 0  # disjoint supports: KL infinite


def test_pinsker_slack_zero_on_diagonal():
    atlas = atlas_for("tv", "kl")
    diag = (atlas.p == atlas.q) & atlas.finite
    assert diag.any()
    assert np.all(atlas.y[diag] - 0.5 * atlas.x[diag] ** 2 == 0)


def test_pinsker_needs_tv_kl():
    with pytest.raises(DivergenceError):
        pinsker_floor_check(atlas_for("tv", "js"))
