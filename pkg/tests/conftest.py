import numpy as np
import pytest

from threshold_cp.graph_gen import GraphConfig, RegularGraph, complete_graph, sample_simple_regular


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def k5():
    return complete_graph(5)


@pytest.fixture
def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges = [tuple(sorted(e)) for e in outer + spokes + inner]
    return RegularGraph.from_edges(10, 3, edges)


@pytest.fixture(scope="session")
def graph_r4_n50():
    return sample_simple_regular(GraphConfig(50, 4, seed=11))


@pytest.fixture(scope="session")
def graph_r4_n1000():
    return sample_simple_regular(GraphConfig(1000, 4, seed=5))


# ------------------------------------------------------------ acceptance summary

_ACCEPTANCE = {}
_REPORTS = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=_criterion_number):
        status = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
    for title, text in _REPORTS:
        terminalreporter.section(title, sep="-")
        terminalreporter.write(text)


def _criterion_number(name):
    digits = "".join(ch for ch in name.split("_")[2] if ch.isdigit()) if name.count("_") >= 2 else ""
    return (int(digits) if digits else 0, name)


@pytest.fixture
def report():
    """Attach a titled block of text to the end-of-run summary."""

    def add(title, text):
        _REPORTS.append((title, text if text.endswith("\n") else text + "\n"))

    return add


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)
