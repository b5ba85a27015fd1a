import pytest

_LINES: list = []


class _Criterion:
    def __init__(self, number: int, title: str):
        self.number, self.title = number, title

    def record(self, ok: bool, detail: str = ""):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {self.number:>2}  {self.title}"
        if detail:
            line += f"  [{detail}]"
        _LINES.append((self.number, line))
        print(line)
        assert ok, line


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_LINES):
        terminalreporter.write_line(line)
