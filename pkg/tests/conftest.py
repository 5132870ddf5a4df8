import pytest

from wilsonlab.bernoulli import BernoulliTable


@pytest.fixture(scope="session")
def table():
    """Exact oracle covering every desk-scale test: index 401 reaches
    4(p-1) for p <= 97, the folklore sweep to 400, and S_200."""
    return BernoulliTable.build(401)


@pytest.fixture(scope="session")
def small_table():
    return BernoulliTable.build(60)
