"""Shared fixtures.

One Workspace/TCEngine pair is shared across the whole session so that
resolutions, diagonal approximations, and cohomology groups are computed
once.  The two end-to-end bound reports are session-scoped for the same
reason: several tests read different parts of the same report.
"""

import pytest

from cohomtc.tc import TCEngine
from cohomtc.workspace import Workspace


@pytest.fixture(scope="session")
def ws():
    return Workspace()


@pytest.fixture(scope="session")
def engine(ws):
    return TCEngine(ws)


@pytest.fixture(scope="session")
def report_m1(engine):
    from cohomtc.spaces import tc_bounds_report

    return tc_bounds_report(engine, 1)


@pytest.fixture(scope="session")
def report_m2(engine):
    from cohomtc.spaces import tc_bounds_report

    return tc_bounds_report(engine, 2)
