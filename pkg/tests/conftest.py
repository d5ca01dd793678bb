import pytest

from graphulo.datasets import example_graph
from graphulo.schema import adjacency_from_edges, incidence_from_edges

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "passed": True, "tests": 0, "failed": []})
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry["tests"] += 1
        if report.outcome != "passed":
            entry["passed"] = False
            entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if e["passed"] else "FAIL"
        line = f"{status}  criterion {number}: {e['title']} ({e['tests']} checks)"
        if e["failed"]:
            line += "  failed: " + ", ".join(e["failed"])
        terminalreporter.write_line(line)


@pytest.fixture
def fig2_edges():
    return example_graph()


@pytest.fixture
def fig2_E(fig2_edges):
    return incidence_from_edges(fig2_edges)


@pytest.fixture
def fig2_A(fig2_edges):
    return adjacency_from_edges(fig2_edges)
