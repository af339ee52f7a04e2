"""Shared fixtures: the expensive enumeration results are built once."""

import pytest

from ctmlab import enumeration, runner


@pytest.fixture(scope="session")
def raw_reduced2():
    plan = runner.plan_chunks(2, mode="reduced", blank="0")
    return runner.orchestrate(plan, workers=1)


@pytest.fixture(scope="session")
def completed2(raw_reduced2):
    return enumeration.complete(raw_reduced2)


@pytest.fixture(scope="session")
def oracle2():
    return enumeration.full_oracle(2)


@pytest.fixture(scope="session")
def oracle3():
    return enumeration.full_oracle(3)
