from __future__ import annotations

from pathlib import Path

import pytest

from hmknf.kb import load_kb

SAMPLES = Path(__file__).resolve().parent.parent / "samples"

_CRITERIA: dict[str, list[tuple[str, str]]] = {}


@pytest.fixture
def sample():
    def load(name: str):
        return load_kb(SAMPLES / f"{name}.kb")
    return load


@pytest.fixture
def samples_dir() -> Path:
    return SAMPLES


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        number = name.split("_")[2]
        _CRITERIA.setdefault(number, []).append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        runs = _CRITERIA[number]
        verdict = "PASS" if all(outcome == "passed" for _, outcome in runs) else "FAIL"
        names = ", ".join(name for name, _ in runs)
        terminalreporter.write_line(f"criterion {int(number):2d}: {verdict}  {names}")
