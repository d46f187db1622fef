from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES: dict = {}


def record_acceptance(criterion: int, passed: bool, detail: str) -> None:
    """Store one pass/fail line per criterion; sub-checks AND together."""
    prev = ACCEPTANCE_LINES.get(criterion)
    if prev is not None:
        passed = passed and prev[0]
        detail = prev[1] + "; " + detail
    ACCEPTANCE_LINES[criterion] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE_LINES):
        passed, detail = ACCEPTANCE_LINES[crit]
        terminalreporter.write_line(f"criterion {crit}: {'PASS' if passed else 'FAIL'} | {detail}")
