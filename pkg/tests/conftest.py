from hypothesis import HealthCheck, settings

# numerical solves are slow and deliberately deterministic, so wall-clock
# deadlines and the too-slow health check only produce flaky noise here
settings.register_profile(
    "numeric",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")


# acceptance tests register their one-line verdicts here so the lines show
# up in the terminal summary even when capture hides passing-test output
_verdict_lines: list[str] = []


def record_verdict(line: str) -> None:
    _verdict_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _verdict_lines:
        terminalreporter.section("acceptance verdicts")
        for line in _verdict_lines:
            terminalreporter.write_line(line)
