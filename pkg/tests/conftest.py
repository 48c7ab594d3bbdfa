"""Shared fixtures: expensive root scans are computed once per session."""

import pytest

from epibvp.model import BoundaryKind, ProblemSpec
from epibvp.shooting import find_shooting_roots


@pytest.fixture(scope="session")
def root_cache():
    """Memoized find_shooting_roots keyed by (lam, kind) at default settings."""
    cache = {}

    def get(lam: float, kind: BoundaryKind):
        key = (lam, kind)
        if key not in cache:
            cache[key] = find_shooting_roots(ProblemSpec(lam=lam, kind=kind))
        return cache[key]

    return get


@pytest.fixture(scope="session")
def dirichlet_spec():
    return ProblemSpec(lam=100.0, kind=BoundaryKind.DIRICHLET)
