"""Hermitian almost abelian Lie algebras ``g(a, v, A)``.

Adapted basis ``e_1, ..., e_{2n}``: ``n_1 = span(e_2, ..., e_{2n-1})``,
``J e_1 = e_{2n}``, ``J|n_1 = J1`` and the metric is the identity. The
brackets are ``[e_{2n}, e_1] = a e_1 + v`` and ``[e_{2n}, X] = A X`` for
``X`` in ``n_1``. Vectors of ``n_1`` and matrices on it use coordinates
with respect to ``e_2, ..., e_{2n-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from . import linalg
from .complexgeo import ComplexStructure
from .exterior import KForm, LieAlgebra, closed_one_forms
from .hermitian import Classification, HermitianStructure, lcskt_solve
from .scalar import ONE, ZERO, Scalar

__all__ = [
    "AlmostAbelianData",
    "DegenerateA",
    "IncompatibleJ1",
    "NondegenerateVerdict",
    "RicciForms",
    "balanced_lcskt_excludes_nonkahler",
    "build_almost_abelian",
    "eigen_diagnostic",
    "generic_lcskt_check",
    "lattice_screen",
    "lcskt_decide_nondegenerate",
    "lee_form_almost_abelian",
    "oracle_comparison",
    "prop45_check",
    "prop45_conditions",
    "ricci_forms",
    "skt_check_almost_abelian",
]


class IncompatibleJ1(ValueError):
    pass


class DegenerateA(ValueError):
    pass


def _mat(m) -> list[list[Scalar]]:
    return [[Scalar.coerce(x) for x in row] for row in m]


def _sym(m):
    t = linalg.transpose(m)
    return [[(m[i][j] + t[i][j]) * Fraction(1, 2) for j in range(len(m))] for i in range(len(m))]


@dataclass(frozen=True)
class AlmostAbelianData:
    n: int
    a: Scalar
    v: tuple
    A: tuple
    J1: tuple

    def __init__(self, n: int, a, v: Sequence, A: Sequence[Sequence], J1: Sequence[Sequence] | None = None):
        m = 2 * n - 2
        if n < 2:
            raise ValueError("half-dimension must be at least 2")
        if J1 is None:
            J1 = ComplexStructure.standard(m).matrix
        a = Scalar.coerce(a)
        v = tuple(Scalar.coerce(x) for x in v)
        Am = _mat(A)
        Jm = _mat(J1)
        if len(v) != m or len(Am) != m or len(Jm) != m or any(len(r) != m for r in Am + Jm):
            raise ValueError(f"v, A, J1 must have size {m}")
        if not a.is_real() or any(not x.is_real() for x in v) or any(not x.is_real() for r in Am for x in r):
            raise ValueError("a, v and A must be real")
        ComplexStructure(Jm)
        if not linalg.is_zero_matrix(linalg.commutator(Am, Jm)):
            raise IncompatibleJ1("[A, J1] != 0")
        jt = linalg.transpose(Jm)
        if linalg.matmul(jt, Jm) != linalg.identity(m, ONE, ZERO):
            raise IncompatibleJ1("J1 must be orthogonal for the adapted basis to be unitary")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "A", tuple(tuple(r) for r in Am))
        object.__setattr__(self, "J1", tuple(tuple(r) for r in Jm))

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def A_matrix(self) -> list[list[Scalar]]:
        return [list(r) for r in self.A]

    @property
    def J1_matrix(self) -> list[list[Scalar]]:
        return [list(r) for r in self.J1]

    @property
    def trace_A(self) -> Scalar:
        return linalg.trace(self.A_matrix)

    @property
    def det_A(self) -> Scalar:
        return linalg.det(self.A_matrix)

    @property
    def is_normal(self) -> bool:
        return linalg.is_zero_matrix(linalg.commutator(self.A_matrix, linalg.transpose(self.A_matrix)))

    def block_matrix(self) -> list[list[Scalar]]:
        """``B = ad_{e_{2n}}`` on ``n`` in the basis ``e_1, ..., e_{2n-1}``."""
        m = 2 * self.n - 2
        B = linalg.zeros(m + 1, m + 1, ZERO)
        B[0][0] = self.a
        for i in range(m):
            B[i + 1][0] = self.v[i]
            for j in range(m):
                B[i + 1][j + 1] = self.A[i][j]
        return B


def build_almost_abelian(d: AlmostAbelianData) -> tuple[LieAlgebra, ComplexStructure, HermitianStructure]:
    dim, m = d.dim, d.dim - 2
    br: dict = {}
    row = {1: d.a} if d.a != 0 else {}
    for k in range(m):
        if d.v[k] != 0:
            row[k + 2] = d.v[k]
    if row:
        br[(dim, 1)] = row
    for j in range(m):
        col = {i + 2: d.A[i][j] for i in range(m) if d.A[i][j] != 0}
        if col:
            br[(dim, j + 2)] = col
    g = LieAlgebra(dim, br)
    J = linalg.zeros(dim, dim, ZERO)
    J[dim - 1][0] = ONE
    J[0][dim - 1] = -ONE
    for i in range(m):
        for j in range(m):
            J[i + 1][j + 1] = d.J1[i][j]
    Js = ComplexStructure(J)
    return g, Js, HermitianStructure(g, Js)


def _coords(alpha: KForm) -> list[Scalar]:
    return [alpha.coefficient((k,)) for k in range(1, alpha.dim + 1)]


@dataclass(frozen=True)
class Prop45Conditions:
    c1: bool
    c2: bool
    c3: bool

    @property
    def ok(self) -> bool:
        return self.c1 and self.c2 and self.c3


def prop45_conditions(d: AlmostAbelianData, alpha: KForm) -> Prop45Conditions:
    """The three algebraic conditions on ``(a, v, A)`` and ``alpha``.

    Identity metric, so ``g(X, Y)`` is the dot product of coordinates.
    """
    lam = _coords(alpha)
    m = d.dim - 2
    A, J1 = d.A_matrix, d.J1_matrix
    an = lam[1:-1]
    lam1, lam2n = lam[0], lam[-1]
    dot = lambda x, y: sum((p * q for p, q in zip(x, y)), ZERO)  # noqa: E731

    c1 = (d.a * lam1 + dot(an, d.v)).is_zero() and all(
        x == 0 for x in linalg.matvec(linalg.transpose(A), an))

    sj = linalg.matmul(_sym(A), J1)  # columns: S(A) J1 e_k
    # g(S J1 e_y, e_z) = sj[z][y]
    c2 = all(
        an[x] * sj[z][y] - an[y] * sj[z][x] + an[z] * sj[x][y] == 0
        for x in range(m) for y in range(m) for z in range(m)
    )

    inner = linalg.madd(linalg.mscale(d.a + lam2n, A),
                        linalg.madd(linalg.matmul(A, A), linalg.matmul(linalg.transpose(A), A)))
    lhs = linalg.matmul(_sym(inner), J1)
    half = Fraction(1, 2)
    c3 = all(
        lhs[z][y] == (d.v[y] * an[z] - d.v[z] * an[y]) * half
        for y in range(m) for z in range(m)
    )
    return Prop45Conditions(c1, c2, c3)


def prop45_check(d: AlmostAbelianData, alpha: KForm) -> bool:
    return prop45_conditions(d, alpha).ok


def generic_lcskt_check(h: HermitianStructure, alpha: KForm) -> bool:
    """``d alpha = 0`` and ``dH = alpha ^ H`` computed directly."""
    return h.algebra.d(alpha).is_zero() and h.dH == (alpha ^ h.torsion)


@dataclass(frozen=True)
class OracleComparison:
    """Outcome of comparing the closed-form conditions with the generic check."""

    checked: int
    agreed: int
    decision_agrees: bool | None

    @property
    def ok(self) -> bool:
        return self.checked == self.agreed and self.decision_agrees is not False


def oracle_comparison(d: AlmostAbelianData, rng) -> OracleComparison:
    """Random closed ``alpha`` (plus a solver solution when one exists) through both routes.

    For ``det A != 0`` also compares :func:`lcskt_decide_nondegenerate`
    with the existence of a non-zero solution from the generic solver.
    """
    g, _, h = build_almost_abelian(d)
    basis = closed_one_forms(g)
    zero = KForm.zero(d.dim, 1)
    alphas = [sum((b.scale(Fraction(rng.randint(-4, 4), rng.randint(1, 4))) for b in basis), zero)]
    sol = lcskt_solve(h)
    if sol.particular is not None:
        alphas.append(sol.element([Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in sol.homogeneous_basis]))
    agreed = sum(prop45_check(d, a) == generic_lcskt_check(h, a) for a in alphas)
    decision = None
    if d.det_A != 0:
        exists = sol.classification != Classification.NOT_LCSKT and sol.has_nonzero
        decision = lcskt_decide_nondegenerate(d).lcskt == exists
    return OracleComparison(len(alphas), agreed, decision)


@dataclass(frozen=True)
class NondegenerateVerdict:
    """Admissible ``lambda = alpha(e_{2n})`` values and the resulting verdict.

    ``lambda_value`` is the unique admissible value, or ``None`` when
    ``any_lambda`` (every value works) or when no value works.
    """

    lambda_value: Scalar | None
    any_lambda: bool
    lambda1_free: bool
    lcskt: bool
    normal: bool

    @property
    def admissible(self) -> bool:
        return self.any_lambda or self.lambda_value is not None


def lcskt_decide_nondegenerate(d: AlmostAbelianData) -> NondegenerateVerdict:
    """Exact LCSKT decision for ``det A != 0`` via the skew-symmetry condition."""
    if d.det_A == 0:
        raise DegenerateA("det A = 0; use lcskt_solve on the built structure instead")
    A = d.A_matrix
    At = linalg.transpose(A)
    s_a = _sym(A)
    rest = _sym(linalg.madd(linalg.mscale(d.a, A), linalg.madd(linalg.matmul(A, A), linalg.matmul(At, A))))
    # lambda * S(A) + rest = 0, entrywise
    lam: Scalar | None = None
    consistent = True
    for i in range(len(A)):
        for j in range(len(A)):
            coef, rhs = s_a[i][j], -rest[i][j]
            if coef == 0:
                if rhs != 0:
                    consistent = False
                continue
            val = rhs / coef
            if lam is None:
                lam = val
            elif lam != val:
                consistent = False
    any_lambda = consistent and lam is None
    value = lam if consistent else None
    lambda1_free = d.a == 0
    if not consistent:
        lcskt = False
    elif lambda1_free or any_lambda:
        lcskt = True
    else:
        lcskt = value != 0
    return NondegenerateVerdict(value, any_lambda, lambda1_free, lcskt, d.is_normal)


@dataclass(frozen=True)
class EigenReport:
    eigenvalues: tuple[complex, ...]
    target: float | None
    bins: tuple[str, ...]

    @property
    def all_binned(self) -> bool:
        return "other" not in self.bins


def eigen_diagnostic(d: AlmostAbelianData, lam=None, tol: float = 1e-9) -> EigenReport:
    """Floating-point eigenvalues of ``A`` binned against ``{0, -(a + lambda)/2}``.

    Display only. ``lam`` defaults to the admissible value from the exact
    decision when that is unique.
    """
    if lam is None and d.det_A != 0:
        lam = lcskt_decide_nondegenerate(d).lambda_value
    ev = np.linalg.eigvals(np.array([[float(x) for x in r] for r in d.A], dtype=float))
    ev = sorted((complex(x) for x in ev), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    target = None if lam is None else -(float(d.a) + float(Scalar.coerce(lam))) / 2
    bins = []
    for z in ev:
        if abs(z.real) <= tol:
            bins.append("zero")
        elif target is not None and abs(z.real - target) <= tol:
            bins.append("half")
        else:
            bins.append("other")
    return EigenReport(tuple(ev), target, tuple(bins))


@dataclass(frozen=True)
class RicciForms:
    chern: KForm
    bismut: KForm


def _flat_n1(d: AlmostAbelianData, x: Sequence) -> KForm:
    return KForm.one_form([ZERO, *x, ZERO])


def ricci_forms(d: AlmostAbelianData) -> RicciForms:
    """Chern and Bismut Ricci forms by the closed formulas in ``(a, v, A)``."""
    dim = d.dim
    a, tr = d.a, d.trace_A
    e1n = KForm.monomial(dim, (1, dim))
    en = KForm.monomial(dim, (dim,))
    v2 = sum((x * x for x in d.v), ZERO)
    half = Fraction(1, 2)
    chern = e1n.scale(-(a * a + half * a * tr))
    atv = linalg.matvec(linalg.transpose(d.A_matrix), list(d.v))
    bismut = e1n.scale(-(a * a - half * a * tr + v2)) - (_flat_n1(d, atv) ^ en)
    return RicciForms(chern, bismut)


def lee_form_almost_abelian(d: AlmostAbelianData) -> KForm:
    """``-(tr A) e^{2n} + (J v)^flat``."""
    jv = linalg.matvec(d.J1_matrix, list(d.v))
    return KForm.monomial(d.dim, (d.dim,), -d.trace_A) + _flat_n1(d, jv)


def skt_check_almost_abelian(d: AlmostAbelianData) -> bool:
    A = d.A_matrix
    m = linalg.madd(linalg.mscale(d.a, A), linalg.madd(linalg.matmul(A, A), linalg.matmul(linalg.transpose(A), A)))
    return linalg.is_zero_matrix(_sym(m))


def is_kahler_data(d: AlmostAbelianData) -> bool:
    return all(x == 0 for x in d.v) and linalg.is_zero_matrix(_sym(d.A_matrix))


@dataclass(frozen=True)
class BalancedWitness:
    balanced: bool
    lcskt: bool
    kahler: bool

    @property
    def holds(self) -> bool:
        return not (self.balanced and self.lcskt) or self.kahler


def balanced_lcskt_excludes_nonkahler(d: AlmostAbelianData) -> BalancedWitness:
    balanced = all(x == 0 for x in d.v) and d.trace_A == 0
    _, _, h = build_almost_abelian(d)
    lcskt = lcskt_solve(h).classification != Classification.NOT_LCSKT
    if d.det_A != 0 and lcskt != lcskt_decide_nondegenerate(d).lcskt:
        raise AssertionError("exact decision and generic solver disagree")
    return BalancedWitness(balanced, lcskt, is_kahler_data(d))


@dataclass(frozen=True)
class LatticeScreen:
    t0: float
    coefficients: tuple[float, ...]
    integral: bool
    tolerance: float


def lattice_screen(d: AlmostAbelianData, t0: float, tolerance: float = 1e-9) -> LatticeScreen:
    """Characteristic polynomial of ``exp(t0 B)`` and whether it is integral.

    A necessary condition for a lattice only.
    """
    if t0 == 0:
        raise ValueError("t0 must be nonzero")
    B = np.array([[float(x) for x in r] for r in d.block_matrix()], dtype=float)
    coeffs = np.real_if_close(np.poly(expm(float(t0) * B)), tol=1e6)
    coeffs = tuple(float(np.real(c)) for c in coeffs)
    integral = all(abs(c - round(c)) <= tolerance for c in coeffs)
    return LatticeScreen(float(t0), coeffs, integral, tolerance)
