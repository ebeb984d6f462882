import numpy as np
import pytest

from photograd import SolverConfig, apply_photorealism

from synth import make_content, make_stylized

TRIPLE_SEEDS = (11, 22, 33)


@pytest.fixture(scope="session")
def content_image():
    return make_content(11)


@pytest.fixture(scope="session")
def stylized_image(content_image):
    return make_stylized(content_image, 1011)


@pytest.fixture(scope="session")
def fixture_triples():
    """(content, stylized, pipeline output at default settings) for several scenes."""
    triples = []
    for seed in TRIPLE_SEEDS:
        content = make_content(seed)
        stylized = make_stylized(content, seed + 1000)
        output, _ = apply_photorealism(content, stylized, SolverConfig())
        triples.append((content, stylized, output))
    return triples


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)


_acceptance_outcomes = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "acceptance" in report.keywords:
        _acceptance_outcomes[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_acceptance_outcomes):
        outcome = _acceptance_outcomes[nodeid]
        label = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{label}  {nodeid.split('::')[-1]}")
