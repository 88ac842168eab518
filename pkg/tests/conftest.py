import pytest

from optdyn import make_context


@pytest.fixture(scope="session")
def ctx64():
    return make_context(64)


@pytest.fixture(scope="session")
def ctx32():
    return make_context(32)


@pytest.fixture()
def active64(ctx64):
    with ctx64.activate():
        yield ctx64
