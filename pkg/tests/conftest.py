import itertools
import sys

import pytest

from buchi.numerics import DigitWord


def all_words(base, dim, max_len):
    """Every digit word over the dim-track alphabet with length at most max_len."""
    columns = list(itertools.product(range(base), repeat=dim))
    for n in range(max_len + 1):
        for cols in itertools.product(columns, repeat=n):
            yield DigitWord(base, dim, tuple(cols))


@pytest.fixture
def words():
    return all_words


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
