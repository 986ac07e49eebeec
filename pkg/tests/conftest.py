"""Shared test plumbing: a visible pass/fail line for every top-level check."""

CHECK_LINES: list[str] = []


def record_check(name: str, ok: bool, detail: str, elapsed: float) -> str:
    """Store and return one human-readable result line for the final summary."""
    status = "PASS" if ok else "FAIL"
    line = f"{status} {name}: {detail} [{elapsed:.2f}s]"
    CHECK_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CHECK_LINES:
        return
    terminalreporter.section("acceptance checks")
    for line in CHECK_LINES:
        terminalreporter.write_line(line)
