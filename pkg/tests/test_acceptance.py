"""Acceptance suite: every criterion at its pinned tolerance.

Each test prints the one-line pass/fail summary of its criterion (visible
with pytest -s or in the CLI selftest, which runs the same functions).
"""

import pytest

from pvarpath import acceptance


@pytest.mark.parametrize(
    "criterion",
    acceptance.ALL_CRITERIA,
    ids=[f"criterion_{i}" for i in range(1, len(acceptance.ALL_CRITERIA) + 1)],
)
def test_acceptance_criterion(criterion):
    result = criterion()
    print(result.line())
    assert result.passed, result.line()
