import re
from collections import defaultdict

import pytest

from sdkgates import builtin_species, build_square_lattice, crystal_modes, solve_design
from sdkgates.pulses import build_pulse_sequence

_criteria = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    m = re.search(r"test_criterion(\d+)_", report.nodeid)
    if m:
        _criteria[int(m.group(1))].append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        failed = [name for name, outcome in results if outcome != "passed"]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {n}: {status} ({len(results) - len(failed)}/{len(results)} checks)"
        if failed:
            line += " failing: " + ", ".join(failed)
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def yb():
    return builtin_species("Yb171")


@pytest.fixture(scope="session")
def yb50(yb):
    return solve_design(yb, 50e-6)


@pytest.fixture(scope="session")
def yb50_seq(yb50):
    M = yb50.kicks_per_arm
    return build_pulse_sequence((M, -M), yb50.species.repetition_rate,
                                yb50.species.delta_k)


@pytest.fixture(scope="session")
def yb50_pair_modes(yb50):
    return crystal_modes(build_square_lattice(1, 2, 50e-6), yb50.species.mass, yb50.omega_z)
