import pytest

from eftddirk.tableau import build_scheme

SCHEME_NAMES = ("2s4a", "2s4a-opt", "2s4b", "2s4b-opt", "2s5", "3s6")


@pytest.fixture(params=SCHEME_NAMES)
def spec(request):
    return build_scheme(request.param)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
