import functools

import pytest

from transiso.surface import preset

ACCEPTANCE_LINES = []

PRESET_NAMES = ("eggbox", "smooth-eggbox", "miura", "curved-crease-miura", "morph")


@functools.lru_cache(maxsize=None)
def cached_preset(name, theta=None):
    return preset(name, theta=theta)


@pytest.fixture(params=PRESET_NAMES)
def any_preset(request):
    return cached_preset(request.param)


def record(criterion: str, ok: bool, detail: str) -> None:
    line = f"{criterion}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
