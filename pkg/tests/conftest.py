import numpy as np
import pytest

from gkdv4 import approx, profiles
from gkdv4.grids import Grid
from gkdv4.rigidity import SolitonTrain


@pytest.fixture(scope="session")
def vgrid() -> Grid:
    """Default verification grid [-40, 40], h = 0.005."""
    return profiles.default_grid()


@pytest.fixture(scope="session")
def model_two_soliton():
    """Approximate-solution model for the canonical train (1, 0.8).

    The shifts (10, 0) start the solitons separated so that the fixed
    measurement window t in [10, 30] sits in the asymptotic regime (with
    zero shifts the interaction amplitudes ~70 keep the expansion out of
    regime until t ~ 50).
    """
    train = SolitonTrain((1.0, 0.8), (10.0, 0.0))
    return approx.build_model(train, k0=20.0)


@pytest.fixture(scope="session")
def model_three_soliton():
    train = SolitonTrain((1.0, 0.9, 0.85), (20.0, 10.0, 0.0))
    return approx.build_model(train)


def richardson_trapezoid(fn, lo: float, hi: float, h: float) -> tuple:
    """Independent quadrature oracle: trapezoid values at h and h/2 and
    their Richardson combination."""
    def trap(step):
        n = int(round((hi - lo) / step)) + 1
        x = np.linspace(lo, hi, n)
        return float(np.trapezoid(fn(x), dx=x[1] - x[0]))

    coarse, fine = trap(h), trap(h / 2)
    return coarse, fine, (4.0 * fine - coarse) / 3.0
