import pytest

# criterion number -> (status, detail), filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {status}  {detail}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240607)
