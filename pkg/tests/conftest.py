import numpy as np
import pytest
import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

from tds import GltiModel, cases

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def random_glti(rng, n=None, p=None, m=None, q=None, stable=True, d22=0.0, tau_range=(0.2, 3.0)):
    """Random GLTI model; ``stable`` shifts A so its spectrum sits left of -0.1."""
    n = rng.integers(0, 4) if n is None else n
    p = rng.integers(1, 3) if p is None else p
    m = rng.integers(1, 3) if m is None else m
    q = rng.integers(0, 3) if q is None else q
    A = rng.normal(size=(n, n))
    if stable and n:
        A -= (np.max(np.linalg.eigvals(A).real) + 0.1 + rng.uniform(0, 1)) * np.eye(n)
    tau = rng.uniform(*tau_range, size=q)
    return GltiModel(A, rng.normal(size=(n, m)), 0.3 * rng.normal(size=(n, q)),
                     rng.normal(size=(p, n)), 0.3 * rng.normal(size=(q, n)),
                     rng.normal(size=(p, m)), rng.normal(size=(p, q)),
                     rng.normal(size=(q, m)), d22 * rng.normal(size=(q, q)), tau)


seeds = st.integers(0, 2**32 - 1)


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


@pytest.fixture(scope="session")
def tank():
    return cases.tank_plant()


@pytest.fixture(scope="session")
def smith_array():
    return cases.smith_loop(cases.perturbed_plants())


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
