import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_configure(config):
    config._criterion_lines = []


@pytest.fixture(scope="session")
def criterion_log(request):
    """Collects one ``criterion N: PASS/FAIL`` line per acceptance criterion."""
    lines = request.config._criterion_lines

    def log(number: int, title: str, ok: bool, detail: str) -> bool:
        lines.append(f"criterion {number:2d} [{title}]: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return log


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_criterion_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
