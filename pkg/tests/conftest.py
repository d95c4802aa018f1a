import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from refugia.model import SECTION4_PARAMS, SECTION4_PHI, interior_equilibrium
from refugia.stability import char_coefficients


@pytest.fixture(scope="session")
def params4():
    return SECTION4_PARAMS


@pytest.fixture(scope="session")
def phi4():
    return SECTION4_PHI


@pytest.fixture(scope="session")
def eq4(params4):
    return interior_equilibrium(params4)


@pytest.fixture(scope="session")
def coeffs4(params4, eq4):
    return char_coefficients(params4, eq4)


def draw_feasible(rng: np.random.Generator, with_delays: bool = True):
    """One random feasible parameter set inside solver-friendly ecology ranges.

    Ranges are chosen so the default step 0.005 resolves the dynamics (each
    nonzero delay spans >= 4 steps, predator bursts stay inside the explicit
    scheme's stability region); within them positivity holds numerically as
    the theory demands.
    """
    from refugia.model import ModelParams
    while True:
        r = rng.uniform(0.5, 3.0)
        k = rng.uniform(100.0, 1200.0)
        alpha = rng.uniform(0.02, 0.06)
        h = rng.uniform(0.03, 0.3)
        d = rng.uniform(0.3, 1.2)
        theta = min(h * d + d / (alpha * k) + rng.uniform(0.05, 0.35), 0.5)
        m_hi = 1 - d / (alpha * k * (theta - h * d))
        if m_hi <= 0.01:
            continue
        m = rng.uniform(0.0, min(0.9, 0.9 * m_hi))
        if with_delays:
            tau1 = 0.0 if rng.random() < 0.25 else rng.uniform(0.02, 1.0)
            tau2 = 0.0 if rng.random() < 0.25 else rng.uniform(0.02, 1.0)
        else:
            tau1 = tau2 = 0.0
        try:
            return ModelParams(r=r, k=k, alpha=alpha, m=m, h=h, theta=theta, d=d,
                               tau1=tau1, tau2=tau2)
        except ValueError:
            continue
