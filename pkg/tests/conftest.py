import pytest

from blockingsets.linearsets import build_family_witness


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="run slow-tier checks (PG(3,49) cone)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def baer():
    """Canonical PG(2,3) subgeometry of PG(2,9): 13 points."""
    return build_family_witness("subgeometry", q=9, p0=3, n=2)


@pytest.fixture(scope="session")
def rank4_27():
    """Seeded rank-4 GF(3)-linear blocking set in PG(2,27): 40 points."""
    return build_family_witness("random_rank_r", q=27, n=2, r=4, seed=1)


@pytest.fixture(scope="session")
def subgeom_49():
    """Canonical PG(2,7) subgeometry of PG(2,49): 57 points."""
    return build_family_witness("subgeometry", q=49, p0=7, n=2)


@pytest.fixture(scope="session")
def subplane_49():
    """PG(2,7) inside a plane of PG(3,49): a planar 1-blocking set."""
    return build_family_witness("subgeometry", q=49, p0=7, n=3, m=2)


@pytest.fixture(scope="session")
def cone_9():
    """Cone over the Baer subplane in PG(3,9): a 2-blocking set."""
    return build_family_witness("cone", q=9, p0=3, n=3, base_m=2)
