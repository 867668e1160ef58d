import pytest

from drugmcts.domain import load_corpus, load_instances

FIXTURES = __import__("pathlib").Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def search_corpus():
    return load_corpus(
        FIXTURES / "search_molecules.jsonl",
        FIXTURES / "search_proteins.jsonl",
        FIXTURES / "search_interactions.jsonl",
    )


@pytest.fixture(scope="session")
def builder_corpus():
    return load_corpus(
        FIXTURES / "builder_molecules.jsonl",
        FIXTURES / "builder_proteins.jsonl",
        FIXTURES / "builder_interactions.jsonl",
    )


@pytest.fixture(scope="session")
def toy_instance():
    return load_instances(FIXTURES / "instances_toy.jsonl")[0]


@pytest.fixture(scope="session")
def oracle_instances():
    return load_instances(FIXTURES / "instances_oracle.jsonl")


@pytest.fixture()
def fixtures_dir():
    return FIXTURES
