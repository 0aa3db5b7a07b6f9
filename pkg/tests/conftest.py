import os
import tempfile

import pytest

# keep the persistent cache out of the user's home during tests
os.environ.setdefault("SHIMLAB_CACHE", tempfile.mkdtemp(prefix="shimlab-cache-"))


@pytest.fixture(scope="session")
def delta_newform():
    from shimlab import modforms, qseries
    return modforms.newform_from_qexp(qseries.delta(2000), 12, 1, label="Delta")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
