import sys
import math

import numpy as np
import pytest

from tmafh import ArrayGeometry, FrequencyPlan

THETA0 = math.radians(30.0)


def fft_coefficients(x):
    """Fourier-series coefficients of a piecewise-constant period.

    ``x[i]`` holds the value on cell ``[i, i+1) T/n``; integrating
    ``exp(-j 2 pi q t / T)`` exactly over each cell turns the FFT bin into
    the continuous-time coefficient for every ``|q| < n/2``.
    """
    n = x.size
    X = np.fft.fft(x) / n

    def coef(q):
        return X[q % n] * np.exp(-1j * np.pi * q / n) * np.sinc(q / n)

    return coef


def stair_period(samples_per_segment, shift_cells=0):
    """One sampled period built directly from the phase-step definition."""
    phases = np.repeat(np.arange(6), samples_per_segment)
    x = np.exp(2j * np.pi * phases / 6)
    return np.roll(x, shift_cells)


@pytest.fixture
def plan():
    return FrequencyPlan()


@pytest.fixture
def halfwave():
    return ArrayGeometry.uniform(4, 0.5, "zero_based")


@pytest.fixture
def quarterwave():
    return ArrayGeometry.uniform(4, 0.25, "one_based")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
