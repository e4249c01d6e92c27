import pytest

from hashgraph.eventlog import events_from_records, fixture_path, read_records
from hashgraph.kernel import CKernel, PyKernel
from hashgraph.world import World

KERNELS = [pytest.param(PyKernel, id="python")]
if CKernel is not None:
    KERNELS.append(pytest.param(CKernel, id="cython"))


def fig1_world(kernel=None):
    """Figure-1 world on the given kernel, plus a label -> id map."""
    events, labels = events_from_records(read_records(fixture_path().read_text().splitlines()))
    world = World(4, kernel)
    world.labels.update(labels)
    for e in events:
        world.insert(e)
    return world, {label: eid for eid, label in labels.items()}


@pytest.fixture(params=KERNELS)
def kernel(request):
    return request.param


@pytest.fixture
def fig1(kernel):
    return fig1_world(kernel)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
