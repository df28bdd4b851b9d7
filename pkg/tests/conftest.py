import numpy as np
import pytest

from seqweak import _kernels_py, kernels

try:
    from seqweak import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = ["python"] + (["cython"] if _compiled is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per available kernel backend."""
    impl = _kernels_py if request.param == "python" else _compiled
    monkeypatch.setattr(kernels, "couple_axis", impl.couple_axis)
    monkeypatch.setattr(kernels, "joint_moment", impl.joint_moment)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20181016)


# acceptance report: one line per criterion at the end of the run

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number and title")


def pytest_runtest_logreport(report):
    if report.when == "setup" and report.outcome != "passed" or report.when == "call":
        for key, value in report.user_properties:
            if key == "criterion":
                prev = _acceptance.get(value, "PASS")
                ok = report.outcome == "passed" and prev == "PASS"
                _acceptance[value] = "PASS" if ok else "FAIL"


def pytest_runtest_setup(item):
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        n, text = marker.args
        item.user_properties.append(("criterion", f"{n:>2}. {text}"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance, key=lambda s: int(s.split(".")[0])):
        terminalreporter.write_line(f"[{_acceptance[name]}] {name}")
