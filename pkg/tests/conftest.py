import numpy as np
import pytest
from hypothesis import strategies as st

from su2limits.fockstate import make_from_amplitudes
from su2limits.su2rot import EulerAngles


def random_state(rng, n):
    raw = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return make_from_amplitudes(n, raw)


def random_euler(rng):
    a, b, c = rng.uniform(-np.pi, np.pi, size=3)
    return EulerAngles(a, b, c)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
angles = st.floats(-np.pi, np.pi, allow_nan=False, allow_infinity=False)


@st.composite
def states(draw, n_min=1, n_max=8):
    n = draw(st.integers(n_min, n_max))
    re = draw(st.lists(finite, min_size=n + 1, max_size=n + 1))
    im = draw(st.lists(finite, min_size=n + 1, max_size=n + 1))
    raw = np.array(re) + 1j * np.array(im)
    if np.linalg.norm(raw) < 1e-3:
        raw[0] = 1.0
    return make_from_amplitudes(n, raw)


@st.composite
def eulers(draw):
    return EulerAngles(draw(angles), draw(angles), draw(angles))
