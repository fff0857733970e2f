import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from tangentflow.exp_log import Diffeo
from tangentflow.series import Series, compositions
from tangentflow.vector_field import VectorField


def random_rational(rng, num=9, den=9):
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_series(rng, m, trunc, lo=0, density=0.3, max_terms=None):
    terms = {}
    for q in range(lo, trunc + 1):
        for alpha in compositions(q, m):
            if rng.random() < density:
                c = random_rational(rng)
                if c:
                    terms[alpha] = c
    if max_terms is not None and len(terms) > max_terms:
        keep = rng.sample(sorted(terms), max_terms)
        terms = {a: terms[a] for a in keep}
    return Series(m, trunc, terms)


def random_field(rng, m, n, N, density=0.25, max_terms=12):
    return VectorField([random_series(rng, m, N, lo=n, density=density, max_terms=max_terms)
                        for _ in range(m)], n)


def random_diffeo(rng, m, n, N, density=0.25, max_terms=12):
    return Diffeo([random_series(rng, m, N, lo=n, density=density, max_terms=max_terms)
                   for _ in range(m)], n - 1)


@pytest.fixture
def rng():
    return random.Random(20261015)


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def small_series(draw, m=2, trunc=5, lo=0):
    terms = {}
    for q in range(lo, trunc + 1):
        for alpha in compositions(q, m):
            if draw(st.booleans()) and draw(st.booleans()):
                terms[alpha] = draw(rationals)
    return Series(m, trunc, terms)


# -- acceptance summary -------------------------------------------------------

_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _ACCEPTANCE.append((marker.args[0], item.name, "PASS" if rep.passed else "FAIL"))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion id")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, name, verdict in sorted(_ACCEPTANCE, key=lambda r: (_key(r[0]), r[1])):
        terminalreporter.write_line(f"[{verdict}] criterion {label}: {name}")


def _key(label):
    digits = "".join(ch for ch in label if ch.isdigit())
    return (int(digits) if digits else 0, label)
