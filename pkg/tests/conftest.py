import numpy as np
import pytest

from phnet.dataset import default_schema
from phnet.synthgen import generate, shipped_profile


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture(scope="session")
def loc1_data(schema):
    return generate(shipped_profile(1), 200, seed=11, schema=schema)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key, desc, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}  {desc}  {detail}")
