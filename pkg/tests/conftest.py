import json
import re
from pathlib import Path

import pytest

from spingate.cli import COMMANDS, run

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def scenario_files():
    return sorted(SCENARIOS.glob("*.json"))


def scenario_command(path: Path) -> str:
    data = json.loads(path.read_text())
    (cmd,) = [c for c in COMMANDS if c.replace("-", "_") in data]
    return cmd


@pytest.fixture
def run_cli(tmp_path, monkeypatch):
    """Run the CLI inside a scratch directory; relative outputs land there."""
    monkeypatch.chdir(tmp_path)

    def _run(*argv):
        return run([str(a) for a in argv])

    return _run


# one line per acceptance criterion in the terminal summary
_CRITERION = re.compile(r"test_criterion_(\d+)(\w?)")
_outcomes: dict[str, list[str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(report.nodeid.split("::")[-1], []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    by_criterion: dict[int, list[tuple[str, bool]]] = {}
    for name, outcomes in _outcomes.items():
        ok = all(o == "passed" for o in outcomes)
        by_criterion.setdefault(int(_CRITERION.search(name).group(1)), []).append((name, ok))
    terminalreporter.section("acceptance criteria")
    for num in sorted(by_criterion):
        parts = sorted(by_criterion[num])
        verdict = "PASS" if all(ok for _, ok in parts) else "FAIL"
        failing = [n for n, ok in parts if not ok]
        detail = f"  (failing: {', '.join(failing)})" if failing else ""
        terminalreporter.write_line(f"criterion {num}: {verdict}{detail}")
