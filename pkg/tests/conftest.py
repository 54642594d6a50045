import os
from pathlib import Path

import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def survey_dir() -> Path:
    """Where the X = 10^6 survey lives; reused while the source fingerprint matches."""
    default = Path(__file__).parent / ".cache" / "survey"
    return Path(os.environ.get("RAYSTAT_SURVEY_DIR", default))


@pytest.fixture
def report_line():
    def add(result):
        line = result.line()
        print(line)
        ACCEPTANCE_LINES.append(line)

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
