from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lcskt import sampling
from lcskt.almost_abelian import build_almost_abelian
from lcskt.complexgeo import build_family
from lcskt.scalar import Scalar

settings.register_profile(
    "lcskt",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("lcskt")

rationals = st.fractions(min_value=-8, max_value=8, max_denominator=6)
nonzero_rationals = rationals.filter(lambda q: q != 0)
scalars = st.builds(Scalar, rationals, rationals)


@lru_cache(maxsize=None)
def sample_algebra(seed: int):
    """A Lie algebra with an integrable J from one of the sampled families, by seed."""
    rng = sampling.make_rng("tests", "algebra", seed)
    kind = seed % 4
    if kind == 0:
        return build_family(sampling.nonnilpotent_params(rng))
    if kind == 1:
        return build_family(sampling.nilpotent_params(rng, 0))
    if kind == 2:
        return build_family(sampling.nilpotent_params(rng, 1))
    g, J, _ = build_almost_abelian(sampling.almost_abelian(rng))
    return g, J


def random_form(rng, dim: int, degree: int, density: float = 0.4, complex_coeffs: bool = False, frame: str = "e"):
    from itertools import combinations

    from lcskt.exterior import KForm

    terms = {}
    for idx in combinations(range(1, dim + 1), degree):
        if rng.random() < density:
            im = sampling.small_rational(rng) if complex_coeffs else Fraction(0)
            terms[idx] = Scalar(sampling.small_rational(rng), im)
    return KForm(dim, degree, terms, frame)


ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict; the lines are repeated in the terminal summary."""
    results = request.config.stash.setdefault(ACCEPTANCE_KEY, {})

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        results[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
