import sys
import warnings
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

warnings.filterwarnings("ignore", message=".*TBB.*")

from orbitfit.geometry import TriangleMesh  # noqa: E402
from orbitfit.synthetic import make_icosphere, write_demo_case  # noqa: E402


@pytest.fixture
def tetra():
    """Asymmetric tetrahedron with outward winding."""
    vertices = np.array(
        [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.5, 0.0], [0.3, 0.2, 1.1]]
    )
    triangles = np.array([[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]])
    return TriangleMesh(vertices, triangles)


@pytest.fixture(scope="session")
def sphere():
    """Watertight sphere, 1280 triangles."""
    return make_icosphere(subdivisions=3, radius=10.0)


@pytest.fixture(scope="session")
def demo_case_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("demo_case")
    write_demo_case(d, n_plates=2)
    return d


@pytest.fixture(scope="session")
def demo_case_dir4(tmp_path_factory):
    d = tmp_path_factory.mktemp("demo_case4")
    write_demo_case(d, n_plates=4)
    return d
