import numpy as np
import pytest

from poincare_dyadic.geometry import Domain, classical_l_shape, l_shape, unit_ball, unit_square


@pytest.fixture
def square():
    return Domain(unit_square())


@pytest.fixture
def disk():
    return Domain(unit_ball())


@pytest.fixture
def lshape():
    return Domain(l_shape())


@pytest.fixture
def classical_lshape():
    return Domain(classical_l_shape())


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when == "teardown":
        return
    if rep.when == "call" or rep.failed or rep.skipped:
        number, title = mark.args
        verdict = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        # parametrized criteria: any failing case fails the criterion
        if _ACCEPTANCE.get(number, "").startswith("FAIL"):
            return
        _ACCEPTANCE[number] = f"{verdict} criterion {number:2d}: {title}"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
