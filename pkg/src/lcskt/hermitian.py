"""Hermitian structures, Bismut torsion, Lee form and the LCSKT solver."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import linalg
from .complexgeo import (
    ComplexStructure,
    NilpotentFamilyParams,
    NonNilpotentFamilyParams,
    RouteMismatch,
    build_family,
    dc,
    is_integrable,
    to_complex_frame,
    to_real_frame,
)
from .exterior import KForm, LieAlgebra, all_indices
from .scalar import I, ONE, ZERO, Scalar

__all__ = [
    "Classification",
    "HermitianStructure",
    "LcsktSolution",
    "MetricClass",
    "NilpotentMetricParams",
    "NotCompatible",
    "NotIntegrable",
    "NotPositiveDefinite",
    "bismut_torsion",
    "classify_metric",
    "alpha_closed_form",
    "dH_closed_form",
    "dH_closed_form_check",
    "family_hermitian",
    "h16_params",
    "h8_params",
    "fundamental_form",
    "lcskt_solve",
    "lee_form",
    "torsion_by_formula",
]


class NotPositiveDefinite(ValueError):
    pass


class NotCompatible(ValueError):
    pass


class NotIntegrable(ValueError):
    pass


class HermitianStructure:
    """A metric ``g`` (Gram matrix in the algebra's basis) compatible with ``J``."""

    def __init__(self, algebra: LieAlgebra, J: ComplexStructure, g: Sequence[Sequence] | None = None,
                 check_integrable: bool = True):
        n = algebra.dim
        if J.dim != n:
            raise ValueError("J and the algebra have different dimensions")
        gm = linalg.identity(n, ONE, ZERO) if g is None else [[Scalar.coerce(x) for x in row] for row in g]
        if len(gm) != n or any(len(row) != n for row in gm):
            raise ValueError("metric must be a dim x dim matrix")
        if any(not x.is_real() for row in gm for x in row):
            raise NotCompatible("metric entries must be real")
        if any(gm[i][j] != gm[j][i] for i in range(n) for j in range(i)):
            raise NotCompatible("metric is not symmetric")
        if not J.is_compatible(gm):
            raise NotCompatible("g(JX, JY) != g(X, Y)")
        minors = linalg.leading_minors(gm)
        if any(m.re <= 0 for m in minors):
            raise NotPositiveDefinite("a leading principal minor is not positive")
        if check_integrable and not is_integrable(algebra, J):
            raise NotIntegrable("J has non-vanishing Nijenhuis tensor")
        self.algebra = algebra
        self.J = J
        self.g = gm

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def inner(self, x: Sequence, y: Sequence) -> Scalar:
        acc = ZERO
        for a in range(self.dim):
            if x[a] == 0:
                continue
            for b in range(self.dim):
                if y[b] != 0 and self.g[a][b] != 0:
                    acc = acc + x[a] * self.g[a][b] * y[b]
        return acc

    def scaled(self, c) -> HermitianStructure:
        return HermitianStructure(self.algebra, self.J, linalg.mscale(Scalar.coerce(c), self.g), False)

    @cached_property
    def omega(self) -> KForm:
        n = self.dim
        t = {}
        for a in range(n):
            ja = self.J.apply(self.algebra.basis_vector(a + 1))
            for b in range(a + 1, n):
                t[(a + 1, b + 1)] = self.inner(ja, self.algebra.basis_vector(b + 1))
        return KForm(n, 2, t)

    @cached_property
    def torsion(self) -> KForm:
        return bismut_torsion(self)

    @cached_property
    def dH(self) -> KForm:
        return self.algebra.d(self.torsion)

    @cached_property
    def lee(self) -> KForm:
        return lee_form(self)


def fundamental_form(h: HermitianStructure) -> KForm:
    """``Omega(X, Y) = g(JX, Y)``."""
    return h.omega


def torsion_by_formula(h: HermitianStructure) -> KForm:
    """``H(X,Y,Z) = -g([JX,JY],Z) - g([JY,JZ],X) - g([JZ,JX],Y)`` on basis triples."""
    alg, J = h.algebra, h.J
    e = [alg.basis_vector(k) for k in range(1, h.dim + 1)]
    je = [J.apply(v) for v in e]
    t = {}
    for i, j, k in all_indices(h.dim, 3):
        a, b, c = i - 1, j - 1, k - 1
        t[(i, j, k)] = -(h.inner(alg.bracket(je[a], je[b]), e[c])
                         + h.inner(alg.bracket(je[b], je[c]), e[a])
                         + h.inner(alg.bracket(je[c], je[a]), e[b]))
    return KForm(h.dim, 3, t)


def bismut_torsion(h: HermitianStructure) -> KForm:
    """Bismut torsion 3-form; the bracket formula is cross-checked against ``-dc(Omega)``."""
    H = torsion_by_formula(h)
    other = -dc(h.algebra, h.omega, h.J)
    if H != other:
        raise RouteMismatch(f"torsion routes disagree: {H} vs {other}")
    return H


def _solve_linear_in_one_forms(dim: int, build, rhs: KForm) -> tuple[list | None, list[list]]:
    """Solve ``sum_k x_k build(e^k) = rhs`` for real ``x``."""
    cols = [build(KForm.monomial(dim, (k,))) for k in range(1, dim + 1)]
    keys = sorted({key for c in cols for key in c.terms} | set(rhs.terms))
    m = [[c.coefficient(key) for c in cols] for key in keys]
    b = [rhs.coefficient(key) for key in keys]
    if not keys:
        return [ZERO] * dim, linalg.identity(dim, ONE, ZERO)
    return linalg.solve_affine(m, b, n_cols=dim)


def lee_form(h: HermitianStructure) -> KForm:
    """The 1-form with ``d Omega^{n-1} = (n-1) theta ^ Omega^{n-1}``."""
    n = h.dim // 2
    if n < 2:
        raise ValueError("the Lee form needs real dimension at least 4")
    pw = h.omega
    for _ in range(n - 2):
        pw = pw ^ h.omega
    lhs = h.algebra.d(pw)
    sol, _ = _solve_linear_in_one_forms(h.dim, lambda e: (e ^ pw).scale(n - 1), lhs)
    if sol is None:
        raise RouteMismatch("Lee form equation has no solution")
    return KForm.one_form(sol)


@dataclass(frozen=True)
class MetricClass:
    kahler: bool
    skt: bool
    balanced: bool
    lcb: bool
    lck: bool


def classify_metric(h: HermitianStructure) -> MetricClass:
    d_omega = h.algebra.d(h.omega)
    theta = h.lee
    closed = h.algebra.d(theta).is_zero()
    return MetricClass(
        kahler=d_omega.is_zero(),
        skt=h.dH.is_zero(),
        balanced=theta.is_zero(),
        lcb=closed,
        lck=closed and d_omega == (theta ^ h.omega),
    )


class Classification(str, Enum):
    NOT_LCSKT = "NOT_LCSKT"
    TRIVIAL_LCSKT = "TRIVIAL_LCSKT"
    NONTRIVIAL_LCSKT = "NONTRIVIAL_LCSKT"
    KAHLER_LIKE = "KAHLER_LIKE"


@dataclass(frozen=True)
class LcsktSolution:
    """All closed 1-forms ``alpha`` with ``dH = alpha ^ H``: ``particular + span(homogeneous_basis)``."""

    particular: KForm | None
    homogeneous_basis: tuple[KForm, ...]
    classification: Classification
    H: KForm
    dH: KForm
    skt_but_not_lcskt: bool = False

    @property
    def dimension(self) -> int:
        """Dimension of the affine solution set (-1 when empty)."""
        return -1 if self.particular is None else len(self.homogeneous_basis)

    def element(self, coeffs: Sequence = ()) -> KForm:
        if self.particular is None:
            raise ValueError("empty solution set")
        out = self.particular
        for c, b in zip(coeffs, self.homogeneous_basis):
            out = out + b.scale(c)
        return out

    def contains(self, alpha: KForm) -> bool:
        if self.particular is None:
            return False
        dim = alpha.dim
        rows = [[b.coefficient((k,)) for k in range(1, dim + 1)] for b in self.homogeneous_basis]
        diff = alpha - self.particular
        target = [diff.coefficient((k,)) for k in range(1, dim + 1)]
        if all(x == 0 for x in target):
            return True
        return bool(rows) and linalg.rank(rows + [target]) == len(rows)

    @property
    def has_nonzero(self) -> bool:
        return self.classification != Classification.NOT_LCSKT


def lcskt_solve(h: HermitianStructure) -> LcsktSolution:
    """Solve ``d alpha = 0, alpha ^ H = dH`` as one exact linear system."""
    alg, H, dH = h.algebra, h.torsion, h.dH
    dim = h.dim

    closed = [alg.d(KForm.monomial(dim, (k,))) for k in range(1, dim + 1)]
    wedged = [KForm.monomial(dim, (k,)) ^ H for k in range(1, dim + 1)]
    keys2 = sorted({key for c in closed for key in c.terms})
    keys4 = sorted({key for c in wedged for key in c.terms} | set(dH.terms))
    m = [[c.coefficient(key) for c in closed] for key in keys2]
    m += [[c.coefficient(key) for c in wedged] for key in keys4]
    b = [ZERO] * len(keys2) + [dH.coefficient(key) for key in keys4]
    if m:
        part, hom = linalg.solve_affine(m, b, n_cols=dim)
    else:
        part, hom = [ZERO] * dim, linalg.identity(dim, ONE, ZERO)
    particular = KForm.one_form(part) if part is not None else None
    basis = tuple(KForm.one_form(v) for v in hom) if part is not None else ()
    skt_only = False
    if H.is_zero():
        cls = Classification.KAHLER_LIKE
    elif not dH.is_zero():
        cls = Classification.NONTRIVIAL_LCSKT if particular is not None else Classification.NOT_LCSKT
    elif basis:
        cls = Classification.TRIVIAL_LCSKT
    else:
        cls = Classification.NOT_LCSKT
        skt_only = True
    sol = LcsktSolution(particular, basis, cls, H, dH, skt_only)
    _verify(alg, sol)
    return sol


def _verify(alg: LieAlgebra, sol: LcsktSolution) -> None:
    if sol.particular is None:
        return
    for alpha in (sol.particular, *(sol.particular + b for b in sol.homogeneous_basis)):
        if not alg.d(alpha).is_zero() or sol.dH != (alpha ^ sol.H):
            raise RouteMismatch(f"solver returned alpha = {alpha} which fails dH = alpha ^ H")


# -- generic metric on the six-dimensional normal forms ----------------------

@dataclass(frozen=True)
class NilpotentMetricParams:
    """Coefficients of the generic fundamental form on a 6-dimensional (J, g).

    ``Omega = i(r w11' + s w22' + t w33') + u w12' - conj(u) w21' + v w23'
    - conj(v) w32' + z w13' - conj(z) w31'``.
    """

    r: Scalar
    s: Scalar
    t: Scalar
    u: Scalar = ZERO
    v: Scalar = ZERO
    z: Scalar = ZERO

    def __post_init__(self):
        for name in ("r", "s", "t", "u", "v", "z"):
            object.__setattr__(self, name, Scalar.coerce(getattr(self, name)))
        r, s, t, u, v, z = self.r, self.s, self.t, self.u, self.v, self.z
        if not (r.is_real() and s.is_real() and t.is_real()):
            raise NotPositiveDefinite("r, s, t must be real")
        mixed = (I * u.conjugate() * v.conjugate() * z).re
        checks = [
            r.re > 0, s.re > 0, t.re > 0,
            r.re * s.re - u.norm2() > 0,
            s.re * t.re - v.norm2() > 0,
            r.re * t.re - z.norm2() > 0,
            r.re * s.re * t.re + 2 * mixed - t.re * u.norm2() - r.re * v.norm2() - s.re * z.norm2() > 0,
        ]
        if not all(checks):
            raise NotPositiveDefinite("metric parameters violate the positivity inequalities")

    @classmethod
    def diagonal(cls, r=Fraction(1, 2), s=Fraction(1, 2), t=Fraction(1, 2)) -> NilpotentMetricParams:
        return cls(r, s, t)

    def omega_complex(self) -> KForm:
        def w(a, b, c):
            return KForm.monomial(6, (a, b), c, "w")

        r, s, t, u, v, z = self.r, self.s, self.t, self.u, self.v, self.z
        return (w(1, 4, I * r) + w(2, 5, I * s) + w(3, 6, I * t)
                + w(1, 5, u) - w(2, 4, u.conjugate())
                + w(2, 6, v) - w(3, 5, v.conjugate())
                + w(1, 6, z) - w(3, 4, z.conjugate()))

    def omega(self) -> KForm:
        return to_real_frame(self.omega_complex())

    def metric(self, J: ComplexStructure | None = None) -> list[list[Scalar]]:
        """Gram matrix ``g(X, Y) = Omega(X, JY)``."""
        J = J or ComplexStructure.standard(6)
        om = self.omega()
        e = [[ONE if i == k else ZERO for i in range(6)] for k in range(6)]
        return [[om.evaluate(e[a], J.apply(e[b])) for b in range(6)] for a in range(6)]


def family_hermitian(params, metric: NilpotentMetricParams) -> HermitianStructure:
    alg, J = build_family(params)  # checks integrability
    return HermitianStructure(alg, J, metric.metric(J), check_integrable=False)


def dH_closed_form(params, metric: NilpotentMetricParams) -> KForm:
    """Closed-form ``dH`` on the complex coframe for the normal forms."""
    def w(idx, c):
        return KForm.monomial(6, idx, c, "w")

    s, t = metric.s, metric.t
    if isinstance(params, NonNilpotentFamilyParams):
        b = params.b
        return w((1, 2, 4, 5), -4 * b * b * t) + w((1, 3, 4, 6), -4 * s)
    if isinstance(params, NilpotentFamilyParams):
        if params.epsilon == 1:
            c = params.rho + params.B.norm2() + params.C.norm2()
        elif params.is_reduced:
            c = params.rho + params.B.norm2() - 2 * params.D.re
        else:
            raise ValueError("no closed form for the unreduced epsilon = 0 family")
        return w((1, 2, 4, 5), -2 * t * c)
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


def dH_closed_form_check(params, metric: NilpotentMetricParams, h: HermitianStructure | None = None) -> bool:
    h = h or family_hermitian(params, metric)
    return to_complex_frame(h.dH) == dH_closed_form(params, metric)


def alpha_closed_form(metric: NilpotentMetricParams) -> KForm:
    """The printed 1-form ``alpha`` for ``d w2 = w11', d w3 = w12 - w12'``.

    Note: the LCSKT solver returns the negative of this form.
    """
    s, t, v = metric.s, metric.t, metric.v
    den = t * s - v.norm2()
    lam = 2 * I * t * v.conjugate() / den
    re_w2 = KForm.monomial(6, (2,), Fraction(1, 2), "w") + KForm.monomial(6, (5,), Fraction(1, 2), "w")
    out = KForm.monomial(6, (1,), lam, "w") + KForm.monomial(6, (4,), lam.conjugate(), "w")
    return to_real_frame(out - re_w2 * (4 * t * t / den))


def h16_params() -> NilpotentFamilyParams:
    """Normal form with ``d w2 = w11'`` and ``d w3 = w12 - w12'``."""
    return NilpotentFamilyParams(1, 1, B=-1)


def h8_params() -> NilpotentFamilyParams:
    """Normal form with ``d w3 = w11'``."""
    return NilpotentFamilyParams.reduced(0)
