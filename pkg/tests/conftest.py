import pytest

from gridguard import KeyMaterial, new_grid
from gridguard.hashstore import (
    build_boundary_store,
    build_layer_sieve,
    build_quad_store,
    build_sift_store,
)

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def mac_key():
    return KeyMaterial.mac(b"test-secret-key")


@pytest.fixture(scope="session")
def sig_key():
    return KeyMaterial.signature(bytes(range(32)))


@pytest.fixture(scope="session")
def grid64():
    return new_grid(64, seed=11)


@pytest.fixture(scope="session")
def stores64(grid64, mac_key):
    return {
        "quad": build_quad_store(grid64, mac_key),
        "boundary": build_boundary_store(grid64, mac_key),
        "sift": build_sift_store(grid64, mac_key),
        "sieve": build_layer_sieve(grid64, mac_key),
    }
