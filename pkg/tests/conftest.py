import hypothesis
import numpy as np
import pytest

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("ci")

_CRITERIA = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion(request):
    """Record one acceptance line; marked failed unless the test reaches ``ok()``."""

    class Line:
        def __init__(self):
            self.detail = ""
            self.passed = False

        def ok(self, detail=""):
            self.detail = detail
            self.passed = True

    line = Line()
    yield line
    name = request.node.name
    status = "PASS" if line.passed else "FAIL"
    _CRITERIA.append(f"{status}  {name}  {line.detail}".rstrip())
    print(_CRITERIA[-1])


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
