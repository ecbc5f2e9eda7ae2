import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

RESULTS: dict = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with the criterion number, then .note() any details."""

    class Rec:
        def __init__(self):
            self.num = None
            self.notes = []
            self.t0 = time.perf_counter()

        def __call__(self, num):
            self.num = num
            return self

        def note(self, msg):
            self.notes.append(str(msg))

    rec = Rec()
    yield rec
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    RESULTS[rec.num] = (ok, time.perf_counter() - rec.t0, "; ".join(rec.notes))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    out = yield
    rep = out.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(RESULTS):
        ok, dt, notes = RESULTS[num]
        line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'} ({dt:.2f}s)"
        tr.write_line(line + (f"  {notes}" if notes else ""))
