import numpy as np
import pytest
from hypothesis import settings

from elastic_esm.elastic_core import Material, PlaneWave
from elastic_esm.forward_mfs import DEFAULT_BC, ShapeSpec, generate_farfield

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def material():
    return Material()


@pytest.fixture(scope="session")
def plane_wave():
    return PlaneWave()


@pytest.fixture(scope="session")
def benchmark_data(material):
    """MFS far fields for the three reference obstacles with their own boundary conditions."""
    return {s: generate_farfield(ShapeSpec(s), DEFAULT_BC[s], material=material)
            for s in ("pear", "peanut", "kite")}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
