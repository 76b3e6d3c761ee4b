import pytest

from cubekappa import gen_ball_times_segment, gen_example42, gen_grid, gen_tree_ball

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {msg}")


@pytest.fixture(scope="session")
def grid2():
    return gen_grid(2)


@pytest.fixture(scope="session")
def grid8():
    return gen_grid(8)


@pytest.fixture(scope="session")
def f2ball2():
    return gen_tree_ball(4, 2)


@pytest.fixture(scope="session")
def ex42_3():
    return gen_example42(3)


@pytest.fixture(scope="session")
def bts12():
    return gen_ball_times_segment(1, 2)
