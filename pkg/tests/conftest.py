import pytest
from hypothesis import HealthCheck, settings

from gradlie import catalog

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def table_reports():
    """Verification reports per table, computed once per session."""
    cache = {}

    def get(table_id):
        if table_id not in cache:
            cache[table_id] = catalog.verify_table(table_id)
        return cache[table_id]

    return get


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
