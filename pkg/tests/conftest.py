import numpy as np
import pytest

from zerohopf import lyapschmidt as ls
from zerohopf.averaging import AveragedSet
from zerohopf.findings import fig1_family, fig2_family
from zerohopf.systems import case_a_standard_form, case_b_standard_form


@pytest.fixture(scope="session")
def fig1():
    return fig1_family()


@pytest.fixture(scope="session")
def fig1_avg(fig1):
    return AveragedSet(case_b_standard_form(fig1))


@pytest.fixture(scope="session")
def fig1_zero(fig1_avg):
    chart = ls.axis_chart()
    rep = ls.find_simple_zero(fig1_avg, chart, 2)
    return chart, rep, ls.z_series(fig1_avg, chart, rep)


@pytest.fixture(scope="session")
def fig2_avg():
    return AveragedSet(case_a_standard_form(fig2_family()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
