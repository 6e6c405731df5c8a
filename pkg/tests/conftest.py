import pytest

_results = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number and summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    notes = [v for k, v in item.user_properties if k == "note"]
    _results.append((mark.args[0], mark.args[1], rep.outcome, notes))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    grouped = {}
    for n, text, outcome, notes in _results:
        entry = grouped.setdefault(n, [text, 0, 0, []])
        entry[1] += 1
        entry[2] += outcome == "passed"
        entry[3].extend(notes)
    terminalreporter.section("acceptance criteria")
    for n in sorted(grouped):
        text, total, passed, notes = grouped[n]
        status = "PASS" if passed == total else "FAIL"
        terminalreporter.write_line(f"[{status}] {n:>2}. {text} ({passed}/{total} cases)")
        for note in notes:
            terminalreporter.write_line(f"         {note}")
