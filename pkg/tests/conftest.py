import sys

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from dcsbm import Labels, Network

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def networks(draw, n_min=1, n_max=5, max_count=3):
    n = draw(st.integers(n_min, n_max))
    upper = draw(st.lists(st.integers(0, max_count), min_size=n * n, max_size=n * n))
    x = np.triu(np.array(upper, dtype=np.int64).reshape(n, n), 1)
    x = x + x.T
    loops = draw(st.lists(st.integers(0, max_count // 2 + 1), min_size=n, max_size=n))
    x[np.diag_indices(n)] = 2 * np.array(loops, dtype=np.int64)
    return Network(x)


@st.composite
def network_and_labels(draw, n_min=1, n_max=5, k_max=3):
    x = draw(networks(n_min=n_min, n_max=n_max))
    k = draw(st.integers(1, k_max))
    z = draw(st.lists(st.integers(0, k - 1), min_size=x.n, max_size=x.n))
    return x, Labels(np.array(z, dtype=np.int64), k)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_instance(rng, n_range=(1, 6), k_range=(1, 3), max_count=3):
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    k = int(rng.integers(k_range[0], k_range[1] + 1))
    x = np.triu(rng.integers(0, max_count + 1, size=(n, n)), 1)
    x = x + x.T
    x[np.diag_indices(n)] = 2 * rng.integers(0, 2, size=n)
    return Network(x), Labels(rng.integers(0, k, size=n), k)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULT_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
