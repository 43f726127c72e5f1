import json

import pytest

from klorth.cli import run_captured

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture(scope="session")
def acceptance_log(pytestconfig):
    return pytestconfig.stash[ACCEPTANCE]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for head, details in sorted(lines):
        terminalreporter.write_line(head[1])
        for d in details:
            terminalreporter.write_line(d)


@pytest.fixture(scope="session")
def mandatory_report(tmp_path_factory):
    """One ``verify --mandatory --json`` run shared by the CLI and acceptance tests."""
    d = tmp_path_factory.mktemp("report")
    path = d / "report.json"
    status, text = run_captured(["verify", "--mandatory", "--json", str(path), "--csv", str(d / "report.csv")])
    return {"status": status, "text": text, "doc": json.loads(path.read_text()),
            "json_path": path, "csv_path": d / "report.csv"}
