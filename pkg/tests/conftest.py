import pytest

from commdeg import groups


@pytest.fixture(scope="session")
def s3():
    return groups.named_group("S", 3)


@pytest.fixture(scope="session")
def s4():
    return groups.named_group("S", 4)


@pytest.fixture(scope="session")
def q8():
    return groups.named_group("Q", 8)


@pytest.fixture(scope="session")
def a3_in_s3(s3):
    return groups.subgroup_closure(s3, [1])
