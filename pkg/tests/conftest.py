import pytest

_VERDICTS = pytest.StashKey[list]()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.stash[_CALL] = rep


_CALL = pytest.StashKey[object]()


@pytest.fixture
def verdict(request):
    """Print and record a PASS or FAIL line for the acceptance criterion under test."""
    yield
    item = request.node
    rep = item.stash.get(_CALL, None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    label = item.function.__doc__.strip().splitlines()[0]
    line = f"{status}  {item.name}: {label}"
    print(line)
    item.config.stash.setdefault(_VERDICTS, []).append(line)


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
