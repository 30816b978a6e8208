import functools

import numpy as np
import pytest

from fdivrange.generators import resolve
from fdivrange.jointrange import GridSpec, sample_atlas

REGISTERED = ["tv", "js", "lecam", "hellinger", "chi2", "kl", "rkl", "power:-1", "power:3", "power:0.3"]

# acceptance results, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


@functools.lru_cache(maxsize=None)
def cached_atlas(f_spec: str, g_spec: str, clip=(50.0, 50.0), resolution=512):
    f = resolve(f_spec)
    g = f if f_spec == g_spec else resolve(g_spec)
    return sample_atlas(f, g, GridSpec(resolution=resolution, clip=clip))


@pytest.fixture(params=REGISTERED)
def generator(request):
    return resolve(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_pair(rng, k):
    return rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {line}")
