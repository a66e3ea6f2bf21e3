"""The ten acceptance criteria at full size.

Each test prints one ``[PASS]``/``[FAIL]`` line; a summary of all lines is
printed again at the end of the session by ``pytest_terminal_summary`` in
``conftest.py``.
"""
import pytest

from nestkit.verify import SUITES

LINES: list[str] = []


@pytest.mark.parametrize("criterion", sorted(SUITES))
def test_criterion(criterion):
    res = SUITES[criterion](seed=0)
    line = res.line()
    LINES.append(line)
    print(line)
    assert res.passed, "\n".join([line] + res.failures)
