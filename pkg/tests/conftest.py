import itertools
import random
import sys

import pytest

from stabef.graph import build_graph


def random_graph(n, p, seed):
    rng = random.Random(seed)
    return build_graph([(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p], n)


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = mod.summary_lines() if mod is not None else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
