import pytest

from saddleorder.acceptance import CRITERIA

# wall-clock ceilings in seconds, where a criterion states one
LIMITS = {1: 300, 6: 600, 7: 300}

XFAIL = {
    11: "N2 = N1 - d fails for p = 1 whenever d or 2d mod N1 exceeds N1 - d, e.g. (1,1,7); "
        "a counterexample to the stated identity, analysed in the decisions ledger",
}


def _params():
    for number, fn in enumerate(CRITERIA, 1):
        marks = [pytest.mark.xfail(strict=True, reason=XFAIL[number])] if number in XFAIL else []
        yield pytest.param(number, fn, id=f"criterion_{number}", marks=marks)


@pytest.mark.parametrize("number, fn", list(_params()))
def test_criterion(number, fn, acceptance_log):
    res = fn()
    line = res.line()
    print(line)
    acceptance_log(line)
    assert res.number == number
    assert res.ok, line
    if number in LIMITS:
        assert res.seconds <= LIMITS[number], f"criterion {number} took {res.seconds:.1f}s"
