"""One test per acceptance criterion.

Each test prints a ``[PASS]``/``[FAIL]`` line; the lines are repeated in the
terminal summary so they show up even when output is captured.  Run this file
directly (``python tests/test_acceptance.py``) for the bare report.
"""
import pytest

from structura.acceptance import CRITERIA, run_all

REPORT = []


@pytest.mark.parametrize("number", range(1, len(CRITERIA) + 1), ids=lambda n: f"criterion_{n}")
def test_criterion(number):
    [res] = run_all([number], report=lambda line: None)
    print(res.line())
    REPORT.append(res.line())
    assert res.passed, res.detail


if __name__ == "__main__":
    raise SystemExit(0 if all(r.passed for r in run_all()) else 1)
