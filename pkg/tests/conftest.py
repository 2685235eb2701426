import numpy as np
import pytest

from cropopt.mesh import DomainSpec, benchmark_domain, generate_mesh
from cropopt.model import ProblemParams

BENCH_H = 0.05


@pytest.fixture(scope="session")
def benchmark_meshes():
    """The four benchmark fields at the acceptance resolution, keyed 1..4."""
    return {i: generate_mesh(benchmark_domain(i, BENCH_H)) for i in range(1, 5)}


@pytest.fixture(scope="session")
def disk_mesh(benchmark_meshes):
    return benchmark_meshes[3]


@pytest.fixture(scope="session")
def coarse_disk():
    return generate_mesh(benchmark_domain(3, 0.1))


@pytest.fixture(scope="session")
def coarse_rect():
    return generate_mesh(benchmark_domain(4, 0.1))


@pytest.fixture(scope="session")
def unit_square():
    return generate_mesh(DomainSpec("rectangle", h=0.125, extent=(0.0, 1.0, 0.0, 1.0)))


@pytest.fixture
def params():
    return ProblemParams(D=0.01, alpha=1.0, T=1.0, L=0.4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
