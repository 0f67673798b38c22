import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from effkan import kan, salg  # noqa: E402
from effkan.delta import MonotoneMap  # noqa: E402


@st.composite
def monotone_maps(draw, max_dom=6, max_cod=6):
    a = draw(st.integers(0, max_dom))
    b = draw(st.integers(0, max_cod))
    vals = sorted(draw(st.lists(st.integers(0, b), min_size=a + 1, max_size=a + 1)))
    return MonotoneMap(a, b, tuple(vals))


@st.composite
def composable_pairs(draw, max_obj=5):
    a, b, c = (draw(st.integers(0, max_obj)) for _ in range(3))
    f = MonotoneMap(a, b, tuple(sorted(draw(st.lists(st.integers(0, b), min_size=a + 1, max_size=a + 1)))))
    g = MonotoneMap(b, c, tuple(sorted(draw(st.lists(st.integers(0, c), min_size=b + 1, max_size=b + 1)))))
    return g, f


class KanInstance:
    def __init__(self, X):
        self.X = X
        self.beta = salg.section_from_point(X)
        self.alpha = self.beta.alpha
        self.lift = kan.malcev_assignment(self.alpha, self.beta)


@pytest.fixture(scope="session")
def nerve_z2():
    return KanInstance(salg.nerve_abelian(salg.cyclic_group(2), 4))


@pytest.fixture(scope="session")
def constant_z2():
    return KanInstance(salg.constant_algebra(salg.cyclic_group(2).as_malcev(), 4))


@pytest.fixture(scope="session")
def cocycles():
    from instances import z2_two_cocycles
    return KanInstance(z2_two_cocycles(4))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
