"""Collects acceptance outcomes and prints one line per criterion at the end."""
import pytest

_outcomes: dict[int, list[tuple[str, str, float]]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes.setdefault(marker.args[0], []).append((item.name, report.outcome, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        runs = _outcomes[n]
        ok = all(o == "passed" for _, o, _ in runs)
        secs = sum(d for _, _, d in runs)
        names = ", ".join(name for name, _, _ in runs)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  ({secs:.1f} s)  {names}")
