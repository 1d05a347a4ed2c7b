import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fgdkit import dataset, metrics

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def snapshots():
    return dataset.load_audience(FIXTURES / "audience.csv")


@pytest.fixture(scope="session")
def census():
    return dataset.load_census(FIXTURES / "census.csv")


@pytest.fixture(scope="session")
def indicators():
    return dataset.load_indicators(FIXTURES / "indicators.csv")


@pytest.fixture(scope="session")
def panel_2015(snapshots, census):
    return metrics.build_panel(snapshots, census, "2015-07")


@pytest.fixture(scope="session")
def panel_2016(snapshots, census):
    return metrics.build_panel(snapshots, census, "2016-07")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One line per acceptance criterion at the end of the run."""
    lines = []
    for status in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion" in nodeid:
                reason = ""
                if status == "skipped" and getattr(rep, "longrepr", None):
                    reason = f"  ({rep.longrepr[2]})"
                lines.append((nodeid.split("::")[-1], status.upper(), reason))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, status, reason in sorted(lines):
            terminalreporter.write_line(f"{status:8s} {name}{reason}")
