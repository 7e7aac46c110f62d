import numpy as np
import pytest

from edgeocc import DirectionSpec


def deg(a):
    return DirectionSpec.from_degrees(a)


def brute_oracle(values, direction, radius=0.5, t_disp=0.5):
    """Pixel-by-pixel loop version of the dense occlusion definition.

    Deliberately naive (plain Python, full line across the image) so it can
    check the vectorised oracle on small maps.
    """
    h, w = values.shape
    ux, uy = direction.displacement_unit

    def rnd(t):
        return int(np.sign(t) * np.floor(abs(t) + 0.5))

    out = np.zeros((h, w), dtype=bool)
    reach = h + w
    for y in range(h):
        for x in range(w):
            for g in range(-reach, reach + 1):
                qx, qy = x + rnd(g * ux), y + rnd(g * uy)
                if g == 0 or not (0 <= qx < w and 0 <= qy < h):
                    continue
                diff = values[qy, qx] - values[y, x]
                if abs(g + diff) <= radius and diff > t_disp:
                    out[y, x] = True
                    break
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
