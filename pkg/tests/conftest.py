"""Shared fixtures: expensive operator builds and interval ensembles are
session-scoped so the acceptance tests can share them; build wall times are
recorded for the runtime criteria."""

import time

import pytest

from modloc.laguerre import BasisSpec
from modloc.spectral import build_generators, build_tilde_generators
from modloc.verification import build_interval_fixture

BUILD_TIMES = {}


def _timed(key, thunk):
    start = time.perf_counter()
    out = thunk()
    BUILD_TIMES[key] = time.perf_counter() - start
    return out


@pytest.fixture(scope="session")
def g256():
    return _timed("g256", lambda: build_generators(BasisSpec(k=1.0, beta=1.0,
                                                             M=256)))


@pytest.fixture(scope="session")
def gt256(g256):
    return _timed("gt256", lambda: build_tilde_generators(g256))


@pytest.fixture(scope="session")
def g512():
    return _timed("g512", lambda: build_generators(BasisSpec(k=1.0, beta=1.0,
                                                             M=512)))


@pytest.fixture(scope="session")
def gt512(g512):
    return _timed("gt512", lambda: build_tilde_generators(g512))


@pytest.fixture(scope="session")
def fixtures_by_interval():
    out = {}
    for a, b in ((1.0, 2.0), (0.5, 1.0), (4.0, 8.0)):
        out[(a, b)] = _timed(f"fx[{a},{b}]",
                             lambda a=a, b=b: build_interval_fixture(a, b))
    return out


@pytest.fixture(scope="session")
def fx12(fixtures_by_interval):
    return fixtures_by_interval[(1.0, 2.0)]


@pytest.fixture(scope="session")
def build_times():
    return BUILD_TIMES
