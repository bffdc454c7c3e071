"""Pytest fixtures for coxeter_walls tests."""

import pytest
from coxeter_walls import VerificationEngine, VerifyConfig, build_realization, load_system


@pytest.fixture
def config():
    return VerifyConfig()


@pytest.fixture(scope="session")
def a2():
    return load_system("a2")


@pytest.fixture(scope="session")
def a2t():
    return load_system("a2t")


@pytest.fixture(scope="session")
def c2t():
    return load_system("c2t")


@pytest.fixture(scope="session")
def a1t_a1t():
    return load_system("a1t_a1t")


@pytest.fixture(scope="session")
def dihedral():
    return load_system("dihedral_inf")


@pytest.fixture(scope="session")
def real_a2t(a2t):
    return build_realization(a2t)


@pytest.fixture(scope="session")
def real_c2t(c2t):
    return build_realization(c2t)


@pytest.fixture(scope="session")
def real_a1t_a1t(a1t_a1t):
    return build_realization(a1t_a1t)


@pytest.fixture(scope="session")
def real_dihedral(dihedral):
    return build_realization(dihedral)


@pytest.fixture
def engine(config):
    """Single-process verification engine."""
    engine = VerificationEngine(config)
    yield engine
    engine.close()
