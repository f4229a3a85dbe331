import os
import sys

sys.path.insert(0, os.path.dirname(__file__))


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(test_acceptance.RESULTS):
        title, passed, detail = test_acceptance.RESULTS[num]
        terminalreporter.write_line(
            f"criterion {num} ({title}): {'PASS' if passed else 'FAIL'}  {detail}")
