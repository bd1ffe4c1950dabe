import json
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from khinlab.psi import normalize, power_psi  # noqa: E402
from khinlab.target import Target  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[int, dict] = {}


@pytest.fixture(scope="session")
def frozen():
    return json.loads((FIXTURES / "frozen_values.json").read_text())


@pytest.fixture(scope="session")
def family():
    """psi(q) = min(q^-1/2 on the 2^-32 grid, 1/2), y = (1/3, 2/3), delta = 1/2."""
    return normalize(power_psi(1, Fraction(1, 2)), 1), Target((Fraction(1, 3), Fraction(2, 3)), Fraction(1, 2))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "status": "PASS", "seconds": 0.0})
    entry["seconds"] += rep.duration
    if rep.skipped:
        entry["status"] = "SKIP"
    elif rep.failed:
        entry["status"] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        terminalreporter.write_line(
            f"criterion {number:2d}  {entry['status']:4s}  {entry['title']}  ({entry['seconds']:.1f}s)"
        )
