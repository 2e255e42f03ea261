import os

import pytest

from ddgalerkin.cache import CACHE_ENV

from _shared import tables


@pytest.fixture(scope="session", autouse=True)
def _isolated_cache(tmp_path_factory):
    old = os.environ.get(CACHE_ENV)
    os.environ[CACHE_ENV] = str(tmp_path_factory.mktemp("table-cache"))
    yield
    if old is None:
        os.environ.pop(CACHE_ENV, None)
    else:
        os.environ[CACHE_ENV] = old


@pytest.fixture(scope="session")
def n4():
    return tables()


# acceptance gate bookkeeping: every test marked criterion(n, title) feeds one
# summary line per criterion, printed after the run
_GATES: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    n, title = mark.args
    gate = _GATES.setdefault(n, {"title": title, "ok": True, "notes": []})
    gate["ok"] &= rep.passed
    if rep.when == "call" or not rep.passed:
        note = dict(item.user_properties).get("detail", "")
        verdict = "ok" if rep.passed else "FAILED"
        gate["notes"].append(f"{item.name.removeprefix('test_')}: {verdict}" + (f" ({note})" if note else ""))


def pytest_terminal_summary(terminalreporter):
    if not _GATES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_GATES):
        g = _GATES[n]
        tr.write_line(f"criterion {n:>2} {'PASS' if g['ok'] else 'FAIL'}  {g['title']}")
        for note in g["notes"]:
            tr.write_line(f"              - {note}")
