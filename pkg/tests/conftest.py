import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cramer_wold.measures import DiscreteMeasure1D, DiscreteMeasureND, moment_matched_pairs, project

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


# -----------------------------------------------------------------------------
# Acceptance summary
# -----------------------------------------------------------------------------
_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, passed, detail)``; lines are printed in the terminal summary."""

    def record(number: int, passed: bool, detail: str) -> None:
        _ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


# -----------------------------------------------------------------------------
# Shared data
# -----------------------------------------------------------------------------
@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_probability(rng, n, d):
    return DiscreteMeasureND(rng.standard_normal((n, d)), rng.dirichlet(np.ones(n)), probability=True)


def line_signed(lam: DiscreteMeasureND) -> DiscreteMeasure1D:
    return project(lam, [1.0])


def admissible_line_measures(seed: int, count: int, p: int, n: int = 8):
    """Signed line measures with vanishing moments below order p."""
    pairs, _ = moment_matched_pairs(seed, count, 1, p, n)
    return [project(mu, [1.0]) - project(nu, [1.0]) for mu, nu in pairs]


@pytest.fixture(scope="session")
def tent():
    """Half atoms at -1 and +1 minus a unit atom at 0."""
    return DiscreteMeasure1D(np.array([-1.0, 0.0, 1.0]), np.array([0.5, -1.0, 0.5]))
