import warnings

import pytest
from hypothesis import HealthCheck, settings

from hermpade.numerics import get_context
from hermpade.testbed import examples

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ctx():
    return get_context(512)


@pytest.fixture(scope="session")
def catalog(ctx):
    return {ex.id: ex for ex in examples(ctx)}


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LOG
    if LOG:
        terminalreporter.section("acceptance verdicts")
        for line in LOG:
            terminalreporter.write_line(line)
