import pytest

from movda.ratings_core import MovdaParams
from movda.simulate import SkillSpec, StepChange, simulate_league

TRUE_PARAMS = MovdaParams(alpha=12.0, beta=0.004, gamma=0.0, delta=2.5, sigma2=121.0)


@pytest.fixture(scope="session")
def true_params():
    return TRUE_PARAMS


@pytest.fixture(scope="session")
def small_league():
    """3,000 games between 10 teams, one of which jumps 150 points mid-way."""
    return simulate_league(
        10, 3000, TRUE_PARAMS, SkillSpec(step=StepChange(2, 1500, 150.0)), seed=7, integer_scores=True
    )


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
