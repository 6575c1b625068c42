import pytest

from linniksieve.lfunc import dirichlet_spec, scan_zeros, zeta_spec

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def zeta_zeros_50():
    return scan_zeros(zeta_spec(), 50.0)


@pytest.fixture(scope="session")
def chi7_zeros_50():
    return scan_zeros(dirichlet_spec(7), 50.0)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("LINNIKSIEVE_CACHE", str(tmp_path / "cache"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
