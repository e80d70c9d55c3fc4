"""One test per acceptance criterion, each at its stated tolerance and time budget.

Each result line is printed as it completes and repeated in the terminal summary.
"""
import os

import pytest

from rso.acceptance import CRITERIA, run_criterion

RESULTS: list = []
THREADS = int(os.environ.get("RSO_THREADS", "1"))


@pytest.mark.slow
@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(number):
    r = run_criterion(number, threads=THREADS)
    RESULTS.append(r)
    print(r.line())
    assert r.passed, r.line()
