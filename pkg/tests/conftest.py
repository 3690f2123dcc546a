import pytest

from relaycap import ChannelParams, NodeLayout, SearchBox


@pytest.fixture
def line_layout():
    """Source at 0, destination at 1, relay unplaced."""
    return NodeLayout((0.0,), ((1.0,),))


@pytest.fixture
def unit_params():
    return ChannelParams(alpha=2.0, p_s=1.0, p_r=1.0)


@pytest.fixture
def line_box():
    return SearchBox((0.0,), (1.0,))


ACCEPTANCE_LINES = []


@pytest.fixture
def report_criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(number, ok, detail):
        ACCEPTANCE_LINES.append((number, f"criterion {number}: {'PASS' if ok else 'FAIL'} -- {detail}"))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
