"""The acceptance table, one test per row.

Each row prints a single "[PASS]/[FAIL] AC-n ..." line with the measured
value, the expected value and the tolerance it was judged against. Rows are
independent, so a failing row never masks the others. Run directly with
``python3 tests/test_acceptance.py`` to print the table without pytest.
"""
import os
import sys

import pytest

from qpc.validation import acceptance_rows, evaluate, run_rows

SAMPLES = 10  # two (chi, chi_I) pairs per sample: 20 pairs per capability class
JOBS = max(1, min(SAMPLES, os.cpu_count() or 1))

ROWS = acceptance_rows(samples=SAMPLES, jobs=JOBS)


@pytest.mark.parametrize("row", ROWS, ids=[f"{r.criterion}:{r.label}" for r in ROWS])
def test_acceptance_row(row, capsys):
    result = evaluate(row)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.error is None, result.error
    assert result.passed, result.line()


if __name__ == "__main__":
    results = run_rows(ROWS, stream=sys.stdout)
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} rows passed")
    sys.exit(1 if failed else 0)
