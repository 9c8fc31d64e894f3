import math

import numpy as np
import pytest

from regpoly.geometry import Tolerances

SQUARE = np.array([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


def regular(k, center=(0.0, 0.0), radius=1.0, phase=0.0):
    a = phase + 2 * math.pi * np.arange(k) / k
    return np.column_stack((center[0] + radius * np.cos(a), center[1] + radius * np.sin(a)))


def tri_lattice(m):
    return np.array([(x + 0.5 * y, y * math.sqrt(3) / 2) for x in range(m) for y in range(m)])


def int_lattice(m):
    return np.array([(x, y) for x in range(m) for y in range(m)], dtype=float)


def tol_for(xy, **kw):
    return Tolerances.for_points(xy, **kw)


def keys(polys):
    return {g.key for g in polys}


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Record one pass/fail line per acceptance criterion; printed at the end."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def emit(number, name, ok, detail):
        line = "criterion %d %-28s %s  %s" % (number, name, "PASS" if ok else "FAIL", detail)
        lines.append(line)
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def square():
    return SQUARE.copy()


@pytest.fixture
def pentagon():
    return regular(5)
