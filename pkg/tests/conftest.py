import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from irs_crlb.scenario import ChannelRealization, Scenario, generate_channel  # noqa: E402

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def scenario():
    return Scenario()


@pytest.fixture(scope="session")
def channel(scenario):
    return generate_channel(scenario, np.random.default_rng(0))


def random_instance(rng, M, N=None):
    """Random channel, reflector, covariance and angle with unit-scale entries."""
    from oracles import crandn, random_psd, random_unit_modulus

    N = M if N is None else N
    G = crandn(rng, N, M)
    alpha = complex(rng.standard_normal(), rng.standard_normal())
    theta = float(rng.uniform(-1.4, 1.4))
    return ChannelRealization(G, alpha, theta), random_unit_modulus(rng, N), random_psd(rng, M)
