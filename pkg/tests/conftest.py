import json
import pathlib
import sys

import pytest

HERE = pathlib.Path(__file__).parent
sys.path.insert(0, str(HERE))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def fixture_data():
    def load(name):
        return json.loads((HERE / "data" / name).read_text())
    return load


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
