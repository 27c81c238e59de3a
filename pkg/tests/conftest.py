import pytest

from flexqnet.scenario import load_scenario


@pytest.fixture(scope="session")
def paper_scenario():
    return load_scenario("paper-default")


@pytest.fixture(scope="session")
def paper_network(paper_scenario):
    return paper_scenario.build_network()
