import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from tores.frontend.driver import corpus_dir, corpus_files, load_file  # noqa: E402

# Property tests stay light by default; the bulk randomized runs live in
# test_acceptance with seeded generators. HYPOTHESIS_PROFILE=thorough widens them.
settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=1000, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def corpus():
    """Every corpus file, loaded and checked once per session."""
    return {p.stem: load_file(p) for p in corpus_files()}


@pytest.fixture(scope="session")
def corpus_path():
    return corpus_dir()


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[key])
