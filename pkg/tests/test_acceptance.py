"""The thirteen acceptance criteria, each at its stated tolerance and time budget."""

import pytest

from nvsc.checks import CHECKS, Config, run_check

CFG = Config()   # shared so the completed diagrams are built once


@pytest.mark.parametrize("cid", [c[0] for c in CHECKS], ids=[f"{c[0]:02d}-{c[1]}" for c in CHECKS])
def test_criterion(cid, capsys):
    r = run_check(cid, CFG)
    with capsys.disabled():
        print("\n" + r.line())
    assert r.passed, r.detail
    assert r.seconds < r.budget, f"took {r.seconds:.2f}s, budget {r.budget}s"
