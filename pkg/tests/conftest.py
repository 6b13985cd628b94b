from __future__ import annotations

import pathlib
import sys

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

from ptmetric.metric import closed_form_metric_2x2  # noqa: E402
from ptmetric.models import h2  # noqa: E402

CRITERIA = {
    1: "H^A EP at 1.000 +- 0.005 via kappa bisection, spectral cross-check, < 5 s",
    2: "H^B EP at 0.48 +- 0.05 for N in {8, 10, 12}, < 10 s",
    3: "kappa <= 1e-10 below each EP and > 1e-3 above it (H^A, H^B)",
    4: "Dirac sigma_x/sigma_z: eta >= 1 - 1e-9, 6 and 5 MUS lines with classes",
    5: "sigma_x/sigma_z under G^s(0.2), G^b(1.2): min eta < 1 and kappa > 0.1",
    6: "good pairs under G: eta >= 1 - 1e-9, MUS lines and classes",
    7: "det-normalized build_metric equals closed-form G within 1e-10 (18 gammas)",
    8: "p=1 line: mus_test flags exactly the sqrt(1-g^2) = -+lambdaG sin(theta) set",
    9: "kappa(H, G(H)) <= 1e-10 on 50 symmetric and > 1e-3 on 50 broken instances",
    10: "general_eig matches characteristic-polynomial roots on 500 matrices",
    11: "10^4 random states: good pairs never violate, non-good pairs do",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): acceptance criterion number n")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            item.user_properties.append(("acceptance", int(mark.args[0])))


def pytest_terminal_summary(terminalreporter):
    results: dict[int, list[bool]] = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            crit = dict(getattr(rep, "user_properties", ())).get("acceptance")
            if crit is None:
                continue
            if rep.when == "call" or rep.outcome != "passed":
                results.setdefault(crit, []).append(rep.outcome == "passed")
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(CRITERIA):
        if crit not in results:
            continue
        ok = all(results[crit])
        n_ok = sum(results[crit])
        terminalreporter.write_line(
            f"criterion {crit:2d}: {'PASS' if ok else 'FAIL'} "
            f"({n_ok}/{len(results[crit])} checks)  {CRITERIA[crit]}"
        )


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def Gs02():
    return closed_form_metric_2x2(0.2, "symmetric")


@pytest.fixture
def H02():
    return h2(0.2)
