import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from heisqc.holomorphic import builtin_biholomorphism
from heisqc.lift_builder import LiftProblem, solve_lift

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def oracles():
    return json.loads((DATA / "oracles.json").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def cylinder_problem(a=1.0, b=1.0, ap=1.0, bp=2.0):
    ident = builtin_biholomorphism("identity")
    return LiftProblem(a, b, ap, bp, ident, ident)


def annuli_problem(A=2.0, k=0.5):
    ex = builtin_biholomorphism("exp")
    return LiftProblem(2 * np.log(A), np.pi, 2 * k * np.log(A), np.pi, ex, ex)


@pytest.fixture(scope="session")
def cylinder_lift():
    prob = cylinder_problem()
    return prob, solve_lift(prob)


@pytest.fixture(scope="session")
def annuli_lift():
    prob = annuli_problem()
    return prob, solve_lift(prob)


def cylinder_samples(rng, n, a=1.0, b=1.0, margin=0.02):
    r = np.sqrt(b * rng.uniform(margin, 1 - margin, n))
    z = r * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    return z, a * rng.uniform(margin, 1 - margin, n)


def annulus_samples(rng, n, A=2.0, margin=0.02):
    s = 2 * np.log(A) * rng.uniform(margin, 1 - margin, n)
    x = np.pi * rng.uniform(margin, 1 - margin, n)
    w = np.exp(s + 1j * x)
    return np.sqrt(w.imag) * np.exp(1j * rng.uniform(0, 2 * np.pi, n)), w.real


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE = {}


def record_criterion(number, title, ok, detail):
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
