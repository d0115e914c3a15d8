import numpy as np
import pytest

from fracfilm.entropy import MobilitySpec
from fracfilm.spectral import SpectralField
from fracfilm.stepper import ModelParams


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def smooth_positive(n_modes, level=1.0, a1=0.2, a2=-0.05, a3=0.02):
    c = np.zeros(n_modes)
    c[:4] = [level, a1, a2, a3]
    return SpectralField(c)


def make_params(alpha=1.0, n=3.0, eps=1e-4, n_modes=16, **kw):
    return ModelParams(alpha=alpha, mobility=MobilitySpec(n, eps), n_modes=n_modes, **kw)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
