from fractions import Fraction

import pytest
from conftest import random_form, sample_algebra
from hypothesis import given, settings
from hypothesis import strategies as st

from lcskt import linalg, sampling
from lcskt.complexgeo import (
    ComplexStructure,
    InvalidParams,
    NilpotentFamilyParams,
    NonNilpotentFamilyParams,
    NotComplexStructure,
    RouteMismatch,
    _dc_bidegree,
    _dc_pullback,
    apply_basis_change,
    bidegree_split,
    build_family,
    classify_complex_structure,
    complex_structure_equations,
    dc,
    is_integrable,
    realify,
    to_complex_frame,
    to_real_frame,
)
from lcskt.exterior import KForm, LieAlgebra, lower_central_series
from lcskt.scalar import I, QSqrt2, Scalar

seeds = st.integers(0, 10_000)


def _rng(*tags):
    return sampling.make_rng("tests", "complexgeo", *tags)


def test_standard_J_convention():
    J = ComplexStructure.standard(4)
    assert J.apply([1, 0, 0, 0]) == [0, 1, 0, 0]
    # (1,0)-forms satisfy w(JX) = i w(X)
    w = KForm.one_form([1, I, 0, 0])
    for k in range(1, 5):
        x = [int(i == k) for i in range(1, 5)]
        assert w.evaluate(J.apply(x)) == I * w.evaluate(x)


def test_J_on_one_forms():
    J = ComplexStructure.standard(2)
    assert J.on_one_form(KForm.one_form([1, 0])) == KForm.one_form([0, 1])


def test_invalid_complex_structures():
    with pytest.raises(NotComplexStructure):
        ComplexStructure([[1, 0], [0, 1]])
    with pytest.raises(NotComplexStructure):
        ComplexStructure.standard(3)
    with pytest.raises(NotComplexStructure):
        ComplexStructure.from_pairs(4, [(1, 2), (2, 3)])


@given(seeds)
def test_sampled_structures_are_integrable(seed):
    g, J = sample_algebra(seed % 40)
    assert is_integrable(g, J)


def test_non_integrable_J_detected():
    # (0,0,0,0,12,13) with J e1 = e2, J e3 = e4, J e5 = e6
    g = LieAlgebra(6, {(1, 2): {5: -1}, (1, 3): {6: -1}})
    assert not is_integrable(g, ComplexStructure.standard(6))
    with pytest.raises(RouteMismatch):
        dc(g, KForm.monomial(6, (1, 2)) + KForm.monomial(6, (3, 4)) + KForm.monomial(6, (5, 6)),
           ComplexStructure.standard(6))


@given(seeds, st.integers(0, 4))
def test_bidegree_split_reassembles(seed, k):
    g, J = sample_algebra(seed % 40)
    beta = random_form(_rng(seed, k), 6, k)
    parts = bidegree_split(beta, J)
    total = KForm.zero(6, k)
    for (p, q), comp in parts.items():
        assert p + q == k
        total = total + comp
        # a (p,q)-form pulled back by J picks up i^(p-q)
        assert J.pullback(comp) == comp.scale(I ** (p - q))
        # real forms have conjugate-symmetric components
        assert parts.get((q, p), KForm.zero(6, k)) == comp.conjugate()
    assert total == beta


@given(seeds, st.integers(0, 4))
def test_dc_two_routes_agree(seed, k):
    g, J = sample_algebra(seed % 40)
    beta = random_form(_rng(seed, "dc", k), 6, k)
    assert _dc_pullback(g, beta, J) == _dc_bidegree(g, beta, J)


@given(seeds, st.integers(0, 3))
def test_ddc_identity(seed, k):
    # d dc = -dc d on an integrable structure (both equal 2i d dbar up to sign)
    g, J = sample_algebra(seed % 40)
    beta = random_form(_rng(seed, "ddc", k), 6, k)
    assert g.d(dc(g, beta, J)) == -dc(g, g.d(beta), J)


@given(seeds, st.integers(0, 6))
def test_frame_round_trip(seed, k):
    beta = random_form(_rng(seed, "frame", k), 6, k, complex_coeffs=True)
    assert to_real_frame(to_complex_frame(beta)) == beta
    w = random_form(_rng(seed, "wframe", k), 6, k, complex_coeffs=True, frame="w")
    assert to_complex_frame(to_real_frame(w)) == w


def test_realify_heisenberg_type():
    dw = [KForm.zero(4, 2, "w"), KForm.monomial(4, (1, 3), 1, "w")]
    g, J = realify(dw)
    # d(f3 + i f4) = w11' = -2i f12
    assert g.d_basis(3).is_zero()
    assert g.d_basis(4) == KForm.monomial(4, (1, 2), -2)
    assert is_integrable(g, J)


def test_family_parameter_validation():
    with pytest.raises(InvalidParams):
        NonNilpotentFamilyParams(1, 2, 1)
    with pytest.raises(InvalidParams):
        NonNilpotentFamilyParams(1, 1, Scalar(0, 1))
    with pytest.raises(InvalidParams):
        NonNilpotentFamilyParams(1, 1, 0)
    with pytest.raises(InvalidParams):
        NilpotentFamilyParams(2, 0)


def test_normal_form_equations():
    h16 = complex_structure_equations(NilpotentFamilyParams(1, 1, B=-1))
    assert str(h16[1]) == "11'" and str(h16[2]) == "12-12'"
    h8 = complex_structure_equations(NilpotentFamilyParams.reduced(0))
    assert h8[1].is_zero() and str(h8[2]) == "11'"


@given(seeds)
def test_nilpotent_family_is_nilpotent(seed):
    rng = _rng(seed, "nil")
    g, _ = build_family(sampling.nilpotent_params(rng, rng.randint(0, 1)))
    assert lower_central_series(g)[1] is not None


@settings(max_examples=15)
@given(seeds)
def test_non_nilpotent_J_lives_on_nilpotent_algebra(seed):
    g, _ = build_family(sampling.nonnilpotent_params(_rng(seed, "nonnil")))
    assert lower_central_series(g)[1] is not None


def test_classify_complex_structure():
    g, J = build_family(NilpotentFamilyParams(0, 1))
    assert classify_complex_structure(g, J).bi_invariant
    g, J = build_family(NilpotentFamilyParams.reduced(0))
    assert classify_complex_structure(g, J).abelian


@given(seeds)
def test_basis_change_composes_with_inverse(seed):
    g, _ = sample_algebra(seed % 40)
    rng = _rng(seed, "change")
    P = sampling.rational_orthogonal(rng, 6)
    P = [[x * (k + 1) for k, x in enumerate(row)] for row in P]
    there = apply_basis_change(g, P)
    assert apply_basis_change(there, linalg.inverse(P)) == g


def test_basis_change_over_sqrt2():
    heis = LieAlgebra(3, {(1, 2): {3: 1}})
    r = QSqrt2(0, Fraction(1, 2))
    rotation = [[r, r, 0], [-r, r, 0], [0, 0, 1]]
    assert apply_basis_change(heis, rotation, field=QSqrt2) == heis
    with pytest.raises(ValueError):
        apply_basis_change(heis, [[QSqrt2(0, 1), 0, 0], [0, 1, 0], [0, 0, 1]], field=QSqrt2)
