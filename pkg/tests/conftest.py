import pytest

from lampi.stack import run_with_deep_stack

# Lines recorded by the acceptance suite, echoed in the terminal summary so that
# they show up without -s.
ACCEPTANCE_LINES: list[str] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_pyfunc_call(pyfuncitem):
    # run every test body on a thread with a large stack, as the CLI does
    original = pyfuncitem.obj
    pyfuncitem.obj = lambda *a, **k: run_with_deep_stack(original, *a, **k)
    try:
        yield
    finally:
        pyfuncitem.obj = original


@pytest.fixture
def criterion():
    def record(name: str, passed: bool, detail: str = "") -> None:
        line = f"{'PASS' if passed else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
