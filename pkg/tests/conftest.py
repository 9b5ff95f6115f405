import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ucadmn.ucamodel import CmsArray, SymmetricArrayModel, UcaGeometry, overlap_matrix

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

F0 = 3.6e9


def random_passive_reciprocal(rng, n, kind="Y"):
    """Random symmetric matrix with positive definite real part."""
    m = rng.normal(size=(n, n))
    re = m @ m.T + 0.1 * np.eye(n)
    im = rng.normal(size=(n, n))
    return (re + 1j * (im + im.T)) * (0.01 if kind == "Y" else 50.0)


def ring_y(alpha, beta):
    y = np.full((3, 3), beta, dtype=complex)
    np.fill_diagonal(y, alpha)
    return y


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def cms3():
    geom = UcaGeometry(3, 0.1)
    return geom, SymmetricArrayModel.cms(geom), overlap_matrix(geom)


@pytest.fixture(scope="session")
def cms_array_136():
    return CmsArray(UcaGeometry(3, 0.136), F0)


# acceptance criteria report --------------------------------------------

_ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when == "teardown" or (rep.when == "setup" and rep.passed):
        return
    number, title = mark.args
    prev_ok = _ACCEPTANCE.get(number, (title, True))[1]
    _ACCEPTANCE[number] = (title, prev_ok and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {title}")
