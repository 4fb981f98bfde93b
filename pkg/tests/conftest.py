import pytest

from helpers import FIXTURES

from moralmeter import FileReplayScorer, load_dataset, load_registry


@pytest.fixture(scope="session")
def registry():
    return load_registry(FIXTURES / "channels.jsonl")


@pytest.fixture(scope="session")
def corpus(registry):
    result = load_dataset(FIXTURES / "dataset.jsonl", registry)
    assert not result.rejections
    return result.records


@pytest.fixture(scope="session")
def fixture_scores():
    return FileReplayScorer(FIXTURES / "scores_200.jsonl").all_scores()
