import numpy as np
import pytest

from denoisebench.image import GrayImage


def random_image(rng, width=16, height=16):
    return GrayImage(rng.integers(0, 256, size=(height, width)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260118)


@pytest.fixture
def mid_gray():
    return GrayImage(np.full((128, 128), 128))


ACCEPTANCE_VERDICTS = {}


def record_verdict(number, ok, detail):
    ACCEPTANCE_VERDICTS[number] = (ok, detail)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_VERDICTS):
        ok, detail = ACCEPTANCE_VERDICTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
