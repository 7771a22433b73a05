import pytest
from hypothesis import HealthCheck, settings, strategies as st

from skewcat.bundles import Bundle
from skewcat.constructions import GeneratorConfig, primitive_left, random_bundle, random_lhsd_algebra
from skewcat.order import FinitePoset

settings.register_profile(
    "repo",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def lhsd_algebras(draw, max_points=3, max_stalk=2, max_generators=4, max_closure=40):
    cfg = GeneratorConfig(draw(seeds), max_points, max_stalk, max_generators, max_closure)
    return random_lhsd_algebra(cfg)


@st.composite
def bundles(draw, max_points=3, max_stalk=3):
    cfg = GeneratorConfig(draw(seeds), max_points, max_stalk)
    return random_bundle(cfg)


@st.composite
def posets(draw, max_points=5):
    m = draw(st.integers(0, max_points))
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    covers = [p for p in pairs if draw(st.booleans())]
    return FinitePoset.from_covers(m, covers)


@pytest.fixture
def P2():
    return primitive_left(2)


@pytest.fixture
def chain2_bundle():
    return Bundle(FinitePoset.chain(2), (2, 1))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import REPORT

    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(REPORT, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
