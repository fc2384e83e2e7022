import os
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

BIG = os.environ.get("COXHOM_BIG", "") not in ("", "0")


def pytest_collection_modifyitems(config, items):
    if BIG:
        return
    skip = pytest.mark.skip(reason="set COXHOM_BIG=1 to run the large cases")
    for item in items:
        if "big" in item.keywords:
            item.add_marker(skip)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""
    def record(number, title, ok, detail="", seconds=None, limit=None):
        timing = ""
        if seconds is not None:
            timing = f" [{seconds:.2f}s" + (f" / limit {limit:.0f}s]" if limit else "]")
            ok = ok and (limit is None or seconds <= limit)
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}{timing}" + (f" — {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
