from fractions import Fraction

import oracles
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcskt import linalg, sampling
from lcskt.complexgeo import (
    ComplexStructure,
    NilpotentFamilyParams,
    complex_structure_equations,
    to_complex_frame,
)
from lcskt.exterior import KForm, LieAlgebra
from lcskt.hermitian import (
    Classification,
    HermitianStructure,
    NilpotentMetricParams,
    NotCompatible,
    NotIntegrable,
    NotPositiveDefinite,
    alpha_closed_form,
    classify_metric,
    dH_closed_form_check,
    family_hermitian,
    h8_params,
    h16_params,
    lcskt_solve,
    torsion_by_formula,
)
from lcskt.scalar import Scalar

seeds = st.integers(0, 10_000)


def _rng(*tags):
    return sampling.make_rng("tests", "hermitian", *tags)


def _family_draw(seed):
    rng = _rng(seed)
    kind = seed % 3
    if kind == 0:
        params = sampling.nonnilpotent_params(rng)
    else:
        params = sampling.nilpotent_params(rng, kind - 1)
    return params, sampling.nilpotent_metric(rng)


def test_metric_validation():
    g = LieAlgebra.abelian(4)
    J = ComplexStructure.standard(4)
    with pytest.raises(NotCompatible):
        HermitianStructure(g, J, [[1, 1, 0, 0], [1, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(NotPositiveDefinite):
        HermitianStructure(g, J, [[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(NotPositiveDefinite):
        NilpotentMetricParams(1, 1, 1, u=2)


def test_non_integrable_rejected():
    g = LieAlgebra(6, {(1, 2): {5: -1}, (1, 3): {6: -1}})
    with pytest.raises(NotIntegrable):
        HermitianStructure(g, ComplexStructure.standard(6))


@given(seeds)
def test_sampled_metrics_positive_and_compatible(seed):
    metric = sampling.nilpotent_metric(_rng(seed, "metric"))
    G = metric.metric()
    assert all(m.re > 0 for m in linalg.leading_minors(G))
    assert ComplexStructure.standard(6).is_compatible(G)


@settings(max_examples=25)
@given(seeds)
def test_fundamental_form_definition(seed):
    params, metric = _family_draw(seed)
    h = family_hermitian(params, metric)
    e = [h.algebra.basis_vector(k) for k in range(1, 7)]
    for a in range(6):
        for b in range(6):
            assert h.omega.evaluate(e[a], e[b]) == h.inner(h.J.apply(e[a]), e[b])
    assert h.omega == metric.omega()


@settings(max_examples=15)
@given(seeds)
def test_torsion_is_bismut_connection_torsion(seed):
    """The connection LC + 1/2 H is Hermitian; with -H it is not (unless H = 0)."""
    params, metric = _family_draw(seed)
    h = family_hermitian(params, metric)
    herm = oracles.from_package(h)
    H = oracles.real_terms(h.torsion)
    assert herm.parallel_J(oracles.bismut_connection(herm, H))
    if H:
        assert not herm.parallel_J(oracles.bismut_connection(herm, {k: -v for k, v in H.items()}))


@settings(max_examples=25)
@given(seeds)
def test_torsion_matches_complex_frame_dc(seed):
    """H = -dc(Omega), with dc computed from the complex structure equations alone."""
    params, metric = _family_draw(seed)
    h = family_hermitian(params, metric)
    frame = oracles.ComplexFrame(complex_structure_equations(params))
    assert to_complex_frame(h.torsion) == -frame.dc(metric.omega_complex())
    assert to_complex_frame(h.torsion) == to_complex_frame(torsion_by_formula(h))


@settings(max_examples=25)
@given(seeds)
def test_lee_form_defining_identity(seed):
    """d(Omega^2) = 2 theta ^ Omega^2, evaluated with the plain shuffle/Koszul oracle."""
    params, metric = _family_draw(seed)
    h = family_hermitian(params, metric)
    alg = oracles.RealAlgebra(h.algebra)
    om = oracles.real_terms(h.omega)
    om2 = oracles.wedge(6, om, 2, om, 2)
    lhs = oracles.clean(oracles.d(alg, om2, 4))
    rhs = oracles.wedge(6, oracles.real_terms(h.lee), 1, om2, 4)
    assert lhs == oracles.clean({k: 2 * v for k, v in rhs.items()})


@settings(max_examples=30)
@given(seeds)
def test_solver_solutions_satisfy_oracle(seed):
    params, metric = _family_draw(seed)
    h = family_hermitian(params, metric)
    sol = lcskt_solve(h)
    alg = oracles.RealAlgebra(h.algebra)
    H = oracles.real_terms(h.torsion)
    dH = oracles.clean(oracles.d(alg, H, 3))
    candidates = [] if sol.particular is None else [sol.particular, sol.element([1] * len(sol.homogeneous_basis))]
    for alpha in candidates:
        a = oracles.real_terms(alpha)
        assert not oracles.clean(oracles.d(alg, a, 1))
        assert oracles.clean(oracles.wedge(6, a, 1, H, 3)) == dH


@settings(max_examples=30)
@given(seeds)
def test_solver_matches_complex_frame_solution_space(seed):
    params, metric = _family_draw(seed)
    h = family_hermitian(params, metric)
    sol = lcskt_solve(h)
    frame = oracles.ComplexFrame(complex_structure_equations(params))
    particular, hom = frame.lcskt_alphas(-frame.dc(metric.omega_complex()))
    assert (particular is None) == (sol.particular is None)
    if particular is None:
        return
    assert to_complex_frame(sol.particular) - particular in _span(hom)
    assert len(sol.homogeneous_basis) == _rank(hom)


def _rank(forms):
    rows = [[f.coefficient((k,)) for k in range(1, 7)] for f in forms]
    return linalg.rank(rows) if rows else 0


class _span:
    def __init__(self, forms):
        self.forms = forms

    def __contains__(self, f):
        return _rank(self.forms + [f]) == _rank(self.forms)


@settings(max_examples=25)
@given(seeds)
def test_dH_closed_forms(seed):
    params, metric = _family_draw(seed)
    assert dH_closed_form_check(params, metric)


def test_unreduced_epsilon_zero_has_no_closed_form():
    from lcskt.hermitian import dH_closed_form

    with pytest.raises(ValueError):
        dH_closed_form(NilpotentFamilyParams(0, 1, A=2), NilpotentMetricParams.diagonal())


def test_h16_alpha_is_negative_of_printed_formula():
    metric = NilpotentMetricParams(2, 3, Fraction(5, 2), Scalar(Fraction(1, 2), Fraction(1, 3)),
                                   Scalar(1, -1), Scalar(0, Fraction(1, 2)))
    sol = lcskt_solve(family_hermitian(h16_params(), metric))
    assert sol.classification == Classification.NONTRIVIAL_LCSKT
    assert sol.dimension == 0
    assert sol.particular == -alpha_closed_form(metric)


def test_h16_alpha_at_diagonal_metric():
    sol = lcskt_solve(family_hermitian(h16_params(), NilpotentMetricParams.diagonal()))
    assert str(sol.particular) == "4*3"


def test_h8_is_trivial_lcskt():
    sol = lcskt_solve(family_hermitian(h8_params(), NilpotentMetricParams.diagonal()))
    assert sol.classification == Classification.TRIVIAL_LCSKT
    assert sol.dH.is_zero() and sol.dimension == 2
    assert sol.contains(KForm.one_form([3, -1, 0, 0, 0, 0]))
    assert not sol.contains(KForm.one_form([0, 0, 1, 0, 0, 0]))


def test_abelian_is_kahler_like():
    h = HermitianStructure(LieAlgebra.abelian(6), ComplexStructure.standard(6))
    assert lcskt_solve(h).classification == Classification.KAHLER_LIKE
    flags = classify_metric(h)
    assert flags.kahler and flags.skt and flags.balanced and flags.lcb and flags.lck


def test_scaling_metric_scales_torsion():
    h = family_hermitian(h16_params(), NilpotentMetricParams.diagonal())
    assert h.scaled(3).torsion == h.torsion.scale(3)
    assert h.scaled(3).lee == h.lee
