import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from lureosc import systems
from lureosc.poly import Poly
from lureosc.realization import closed_loop, realize, validate

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def _roots_in_annulus(rng, count, rmin, rmax):
    """``count`` roots closed under conjugation with moduli in [rmin, rmax]."""
    out = []
    while len(out) < count:
        r = rng.uniform(rmin, rmax)
        if count - len(out) >= 2 and rng.random() < 0.6:
            th = rng.uniform(0.2, np.pi - 0.2)
            out += [r * np.exp(1j * th), r * np.exp(-1j * th)]
        else:
            out.append(r * rng.choice([-1.0, 1.0]))
    return out


def random_system(rng, n_range=(2, 5)):
    """A random transfer function that satisfies every standing hypothesis."""
    while True:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        m = int(rng.integers(1, n))
        den_roots = _roots_in_annulus(rng, n, 0.05, 0.9)
        num_roots = [1.0]
        extra = m - 1
        if extra:
            # non-minimum-phase zeros on some draws
            lo, hi = (1.15, 1.7) if rng.random() < 0.3 else (0.1, 0.85)
            num_roots += _roots_in_annulus(rng, extra, lo, hi)
        gaps = [abs(a - b) for a in num_roots for b in den_roots]
        if min(gaps) < 0.08:
            continue
        lead = rng.uniform(0.5, 2.0) * rng.choice([-1.0, 1.0])
        num = Poly.from_roots(num_roots, lead)
        den = Poly.from_roots(den_roots)
        try:
            G = validate(num, den)
        except Exception:
            continue
        return G, realize(G)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def second_order():
    G = validate(*systems.second_order())
    return G, realize(G)


@pytest.fixture(scope="session")
def break_in():
    return validate(*systems.break_in_example())


@pytest.fixture(scope="session")
def pocket():
    return validate(*systems.stable_pocket_example())


@pytest.fixture(scope="session")
def random_systems():
    rng = np.random.default_rng(7)
    return [random_system(rng) for _ in range(50)]


SQRT41 = np.sqrt(41.0)
LAMBDA_UNSTABLE = -0.75 - 0.25 * SQRT41
LAMBDA_STABLE = -0.75 + 0.25 * SQRT41


def acl_second_order(ss, alpha=-2.5):
    return closed_loop(ss, alpha)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
