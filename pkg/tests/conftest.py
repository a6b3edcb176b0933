import numpy as np
import pytest

from qfpe.grid import amplitude_encode, build_grid, gaussian_density, vectorize


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_grid():
    # asymmetric velocity range so v_min and the affine offset both matter
    return build_grid(2, 2, 0.8, 0.3, -1.3, 2.2)


def encoded_gaussian(grid, mu_x=None, sigma_x=1.2, mu_v=0.2, sigma_v=0.6):
    mu_x = grid.x0 + grid.delta_x * grid.N_x / 2 if mu_x is None else mu_x
    p = vectorize(gaussian_density(grid, mu_x, sigma_x, mu_v, sigma_v))
    return p, amplitude_encode(p, grid)


def random_unit_vectors(rng, dim, count):
    z = rng.normal(size=(dim, count)) + 1j * rng.normal(size=(dim, count))
    return z / np.linalg.norm(z, axis=0)


_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = next((m for m in report.user_properties if m[0] == "criterion"), None)
    if marker:
        number, title = marker[1]
        prev = _CRITERIA.get(number, (title, True))
        _CRITERIA[number] = (title, prev[1] and report.passed)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            item.user_properties.append(("criterion", m.args))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
