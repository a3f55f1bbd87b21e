import pytest

from homograph.datagen import generate_corpus, load_brands, load_confusables, \
    prune_indistinguishable
from homograph.glyphs import get_renderer

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def renderer():
    return get_renderer()


@pytest.fixture(scope="session")
def table():
    return load_confusables()


@pytest.fixture(scope="session")
def pruned_table(table, renderer):
    return prune_indistinguishable(table, renderer)


@pytest.fixture(scope="session")
def small_corpus(pruned_table):
    """About 330 samples over 12 brands; fast enough for unit tests."""
    return generate_corpus(load_brands()[:12], pruned_table, per_brand=10, seed=5)
