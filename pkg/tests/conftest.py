import acceptance_log


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 13):
        if n in acceptance_log.RESULTS:
            terminalreporter.write_line(acceptance_log.line(n))
        else:
            terminalreporter.write_line(f"criterion {n:2d}: NOT RUN")
