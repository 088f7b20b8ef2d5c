import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# filled in by test_acceptance as each criterion runs
CRITERIA = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        ok, note = CRITERIA[num]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {num}: {note}")
