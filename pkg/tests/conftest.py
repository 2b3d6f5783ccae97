import hashlib
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import floqlind  # noqa: E402
from floqlind import dataset as ds  # noqa: E402

_PIPELINE = ("qdyn.py", "propagator.py", "choi.py", "spectral.py", "markov.py", "dataset.py")
ACCEPTANCE_LINES: list[str] = []
# test function name -> passed?, filled for the acceptance property suites
PROPERTY_OUTCOMES: dict[str, bool] = {}


def _pipeline_digest(grid) -> str:
    h = hashlib.sha256(repr(grid).encode())
    src = Path(floqlind.__file__).parent
    for name in _PIPELINE:
        h.update((src / name).read_bytes())
    return h.hexdigest()[:16]


@pytest.fixture(scope="session")
def protocol_points(request):
    """Integrated and labeled maps of the full mixed-problem protocol grid.

    The sweep takes several minutes, so it is cached in the pytest cache
    directory, keyed by the grid and the source of the labeling pipeline.
    """
    grid = ds.Protocol().grid()
    cache = Path(request.config.cache.mkdir("floqlind"))
    path = cache / f"protocol-{_pipeline_digest(grid)}.npz"
    if path.exists():
        return ds.load_points(path)
    points = ds.sweep_points(grid)
    ds.save_points(points, path)
    return points


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_property_"):
        return
    if report.when == "call" or report.failed:
        PROPERTY_OUTCOMES[name] = PROPERTY_OUTCOMES.get(name, True) and report.passed
