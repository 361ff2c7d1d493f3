import pytest

from tlsc.codec import build_cyclic_code, build_leech_code


@pytest.fixture(scope="session")
def code03():
    return build_cyclic_code(0.3)


@pytest.fixture(scope="session")
def code05():
    return build_cyclic_code(0.5)


@pytest.fixture(scope="session")
def leech_code():
    return build_leech_code(0.1)


_verdicts = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None or call.when != "call":
        return
    n, title = mark.args
    ok = call.excinfo is None
    _verdicts[n] = (title, ok and _verdicts.get(n, (title, True))[1])
    print(f"\ncriterion {n} ({title}): {'PASS' if ok else 'FAIL'}")


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_verdicts):
        title, ok = _verdicts[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")
