import numpy as np
import pytest

from sphqi.geometry import product_quadrature, random_points


@pytest.fixture(scope="session")
def rule20():
    return product_quadrature(20)


@pytest.fixture(scope="session")
def rule60():
    return product_quadrature(60)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def probe_points():
    return random_points(200, 2, 314159).points


_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(label: str, ok: bool, detail: str = "") -> bool:
        _CRITERIA[label] = (bool(ok), detail)
        print(f"{label}: {'PASS' if ok else 'FAIL'} {detail}")
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: (int(s.split()[1]), s)):
        ok, detail = _CRITERIA[label]
        terminalreporter.write_line(f"{label:<28} {'PASS' if ok else 'FAIL'}  {detail}")
