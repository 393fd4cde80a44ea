import pytest

import labelgeo as lg


def _space(text):
    return lg.LabelSpace.from_graph(lg.load_edge_list(text))


@pytest.fixture(scope="session")
def p3():
    return _space("0 1\n1 2")


@pytest.fixture(scope="session")
def p5():
    return _space("0 1\n1 2\n2 3\n3 4")


@pytest.fixture(scope="session")
def star():
    # center 4, leaves 0-3
    return _space("4 0\n4 1\n4 2\n4 3")


@pytest.fixture(scope="session")
def k3():
    return lg.LabelSpace.from_graph(lg.make_complete(3))


@pytest.fixture(scope="session")
def grid33():
    return lg.LabelSpace.from_graph(lg.make_grid(3, 3))


@pytest.fixture(scope="session")
def phylo_star():
    # center 3, labeled leaves 0-2
    return _space("0 3\n1 3\n2 3\n#labels: 0,1,2")


_acceptance_reports = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance_reports.append(report)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_reports:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for report in sorted(_acceptance_reports, key=lambda r: r.nodeid):
        status = "PASS" if report.outcome == "passed" else report.outcome.upper()
        name = report.nodeid.split("::")[-1]
        terminalreporter.write_line(f"{status:<6} {name}  ({report.duration:.2f}s)")
