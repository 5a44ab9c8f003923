import pytest

# Filled by tests/test_acceptance.py, one (criterion, passed, detail) per check.
ACCEPTANCE: list[tuple[int, bool, str]] = []


@pytest.fixture
def acceptance_record():
    def record(criterion: int, passed: bool, detail: str) -> None:
        line = f"CRITERION {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        ACCEPTANCE.append((criterion, passed, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"CRITERION {crit}: {'PASS' if ok else 'FAIL'}  {detail}")
