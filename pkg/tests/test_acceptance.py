import pytest

from spectrafrac.core.acceptance import CHECK_NAMES, CHECKS, run_acceptance
from spectrafrac.exceptions import DomainError

FAST_CHECKS = [name for name, _, slow in CHECKS if not slow]


@pytest.mark.parametrize("name", FAST_CHECKS)
def test_check_passes(name):
    (result,) = run_acceptance(seed=0, only=[name])
    assert result.passed, result.detail
    assert not result.skipped


@pytest.mark.slow
def test_wonderland_check():
    (result,) = run_acceptance(only=["wonderland"])
    assert result.passed, result.detail


def test_skip_slow_marks_results():
    results = run_acceptance(only=["odometer", "wonderland"], skip_slow=True)
    assert [r.name for r in results] == ["odometer", "wonderland"]
    assert results[1].skipped and results[1].slow
    assert results[0].to_dict()["passed"] is True


def test_unknown_check():
    with pytest.raises(DomainError):
        run_acceptance(only=["odometer", "telepathy"])


def test_progress_callback():
    seen = []
    run_acceptance(only=["odometer", "sandwich"], progress=seen.append)
    assert seen == ["sandwich", "odometer"]
    assert set(seen) <= set(CHECK_NAMES)
