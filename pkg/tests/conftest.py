import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "charlab", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("charlab")


@pytest.fixture(scope="session")
def caps_path(tmp_path_factory):
    """A freshly calibrated caps file shared by the calibrated suites."""
    from charlab import suites

    path = tmp_path_factory.mktemp("caps") / "charlab_caps.json"
    suites.write_caps(suites.calibrate(), path)
    return path


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion; the lines are echoed in the summary."""

    def record(number: int, ok: bool, text: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {text}"
        print(line)
        _ACCEPTANCE.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
