import numpy as np
import pytest

from micromorph import build_box_mesh, build_fe_system, isotropic_material


@pytest.fixture(scope="session")
def unit_mesh_1():
    return build_box_mesh((1.0, 1.0, 1.0), (1, 1, 1))


@pytest.fixture(scope="session")
def unit_mesh_2():
    return build_box_mesh((1.0, 1.0, 1.0), (2, 2, 2))


@pytest.fixture(scope="session")
def unit_mesh_3():
    return build_box_mesh((1.0, 1.0, 1.0), (3, 3, 3))


@pytest.fixture(scope="session")
def sys_1(unit_mesh_1):
    return build_fe_system(unit_mesh_1)


@pytest.fixture(scope="session")
def sys_2(unit_mesh_2):
    return build_fe_system(unit_mesh_2)


@pytest.fixture(scope="session")
def sys_3(unit_mesh_3):
    return build_fe_system(unit_mesh_3)


@pytest.fixture(scope="session")
def demo_material():
    """Documented demo material: indefinite potential elastic tensor,
    identity-like rate tensors."""
    return isotropic_material(elastic=(1.0, -1.0))


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
