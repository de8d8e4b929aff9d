"""Complex structures on Lie algebras.

Conventions (used everywhere downstream):

* a 1-form ``w`` is of type (1,0) when ``w(JX) = i w(X)``;
* the standard coframe is ``omega^j = f^{2j-1} + i f^{2j}``, so on vectors
  ``J f_{2j-1} = f_{2j}``;
* ``dc = i(dbar - d)``, which on real forms equals ``P^{-1} d P`` with
  ``P beta = beta(J., ..., J.)``. For a (1,1)-form this is
  ``-d beta(J., J., J.)``.

Complex-coframe forms use the frame tag ``"w"`` with indices
``1..n`` for ``omega^j`` and ``n+1..2n`` for their conjugates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import linalg
from .exterior import KForm, LieAlgebra, lie_algebra_validate
from .scalar import I, ONE, ZERO, Scalar

__all__ = [
    "ComplexStructure",
    "InvalidParams",
    "NilpotentFamilyParams",
    "NonNilpotentFamilyParams",
    "NotComplexStructure",
    "RouteMismatch",
    "apply_basis_change",
    "bidegree_split",
    "build_family",
    "classify_complex_structure",
    "complex_structure_equations",
    "dc",
    "is_integrable",
    "nijenhuis",
    "realify",
    "to_complex_frame",
    "to_real_frame",
]


class NotComplexStructure(ValueError):
    pass


class InvalidParams(ValueError):
    pass


class RouteMismatch(RuntimeError):
    """Two independent computations of the same object disagree."""


class ComplexStructure:
    """An endomorphism ``J`` with ``J^2 = -Id``.

    ``J`` is given as a matrix whose column ``j`` is the image of ``e_{j+1}``.
    """

    def __init__(self, matrix: Sequence[Sequence]):
        m = [[Scalar.coerce(x) for x in row] for row in matrix]
        n = len(m)
        if n == 0 or any(len(row) != n for row in m):
            raise NotComplexStructure("J must be a non-empty square matrix")
        if n % 2:
            raise NotComplexStructure("J needs even dimension")
        if any(not x.is_real() for row in m for x in row):
            raise NotComplexStructure("J must be real")
        sq = linalg.matmul(m, m)
        if not all(sq[i][j] == (-1 if i == j else 0) for i in range(n) for j in range(n)):
            raise NotComplexStructure("J^2 != -Id")
        self.matrix = m
        self.dim = n

    @classmethod
    def standard(cls, dim: int) -> ComplexStructure:
        """``J f_{2j-1} = f_{2j}``."""
        return cls.from_pairs(dim, [(2 * j - 1, 2 * j) for j in range(1, dim // 2 + 1)])

    @classmethod
    def from_pairs(cls, dim: int, pairs: Sequence[tuple[int, int]]) -> ComplexStructure:
        """``J e_a = e_b`` and ``J e_b = -e_a`` for each ``(a, b)``."""
        m = linalg.zeros(dim, dim, ZERO)
        seen = set()
        for a, b in pairs:
            if a in seen or b in seen or a == b:
                raise NotComplexStructure(f"pair ({a}, {b}) overlaps another pair")
            seen.update((a, b))
            m[b - 1][a - 1] = ONE
            m[a - 1][b - 1] = -ONE
        if len(seen) != dim:
            raise NotComplexStructure("pairs must cover every basis vector")
        return cls(m)

    def apply(self, x: Sequence) -> list[Scalar]:
        return [Scalar.coerce(c) for c in linalg.matvec(self.matrix, [Scalar.coerce(c) for c in x])]

    def __eq__(self, other):
        return isinstance(other, ComplexStructure) and self.matrix == other.matrix

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.matrix))

    def pullback_one_form(self, alpha: KForm) -> KForm:
        """``alpha o J``."""
        row = [alpha.coefficient((i,)) for i in range(1, self.dim + 1)]
        return KForm.one_form([sum((row[i] * self.matrix[i][j] for i in range(self.dim)), ZERO)
                               for j in range(self.dim)])

    def on_one_form(self, alpha: KForm) -> KForm:
        """``J alpha := alpha o J^{-1} = -alpha o J``."""
        return -self.pullback_one_form(alpha)

    @cached_property
    def _pullback_images(self) -> list[KForm]:
        return [KForm.one_form(list(self.matrix[a])) for a in range(self.dim)]

    def pullback(self, beta: KForm) -> KForm:
        """``beta(J., ..., J.)``."""
        return beta.substitute(self._pullback_images)

    @cached_property
    def _projections(self) -> tuple[list[KForm], list[KForm]]:
        p10, p01 = [], []
        half = Fraction(1, 2)
        for a in range(self.dim):
            ea = [ONE if k == a else ZERO for k in range(self.dim)]
            row = self.matrix[a]
            p10.append(KForm.one_form([half * (ea[k] - I * row[k]) for k in range(self.dim)]))
            p01.append(KForm.one_form([half * (ea[k] + I * row[k]) for k in range(self.dim)]))
        return p10, p01

    @cached_property
    def coframe10(self) -> list[KForm]:
        """A basis of (1,0)-forms (complex coefficients on the real coframe)."""
        p10 = self._projections[0]
        rows = [[f.coefficient((k,)) for k in range(1, self.dim + 1)] for f in p10]
        r, piv = linalg.rref(rows)
        return [KForm.one_form(r[k]) for k in range(len(piv))]

    def is_compatible(self, g: Sequence[Sequence]) -> bool:
        jt = linalg.transpose(self.matrix)
        return linalg.matmul(linalg.matmul(jt, g), self.matrix) == [[Scalar.coerce(x) for x in r] for r in g]


def nijenhuis(g: LieAlgebra, J: ComplexStructure) -> dict[tuple[int, int], list[Scalar]]:
    """``N(e_i, e_j)`` for all ``i < j``."""
    if g.dim != J.dim:
        raise ValueError("dimension mismatch between algebra and J")
    out = {}
    for i in range(1, g.dim + 1):
        x = g.basis_vector(i)
        jx = J.apply(x)
        for j in range(i + 1, g.dim + 1):
            y = g.basis_vector(j)
            jy = J.apply(y)
            t1 = g.bracket(jx, jy)
            t2 = J.apply(g.bracket(jx, y))
            t3 = J.apply(g.bracket(x, jy))
            t4 = g.bracket(x, y)
            out[(i, j)] = [a - b - c - d for a, b, c, d in zip(t1, t2, t3, t4)]
    return out


def is_integrable(g: LieAlgebra, J: ComplexStructure) -> bool:
    return all(all(c.is_zero() for c in v) for v in nijenhuis(g, J).values())


@dataclass(frozen=True)
class ComplexClass:
    abelian: bool
    bi_invariant: bool


def classify_complex_structure(g: LieAlgebra, J: ComplexStructure) -> ComplexClass:
    abelian = bi_inv = True
    for i in range(1, g.dim + 1):
        x = g.basis_vector(i)
        jx = J.apply(x)
        for j in range(1, g.dim + 1):
            y = g.basis_vector(j)
            xy = g.bracket(x, y)
            if abelian and j > i and g.bracket(jx, J.apply(y)) != xy:
                abelian = False
            if bi_inv and J.apply(xy) != g.bracket(jx, y):
                bi_inv = False
    return ComplexClass(abelian, bi_inv)


def bidegree_split(beta: KForm, J: ComplexStructure) -> dict[tuple[int, int], KForm]:
    """Split ``beta`` into (p,q) components (zero components omitted).

    Each basis 1-form is written as its (1,0) plus (0,1) projection and
    the wedge monomials are expanded, keeping track of how many (1,0)
    factors each product carries.
    """
    if beta.frame != "e" or beta.dim != J.dim:
        raise ValueError("beta must be a form on the real coframe of J's algebra")
    p10, p01 = J._projections
    k = beta.degree
    acc: dict[int, KForm] = {}
    for idx, c in beta.items():
        parts = {0: KForm.constant(beta.dim, c)}
        for a in idx:
            nxt: dict[int, KForm] = {}
            for p, f in parts.items():
                for dp, piece in ((1, p10[a - 1]), (0, p01[a - 1])):
                    w = f ^ piece
                    if w.is_zero():
                        continue
                    nxt[p + dp] = nxt[p + dp] + w if p + dp in nxt else w
            parts = nxt
        for p, f in parts.items():
            acc[p] = acc[p] + f if p in acc else f
    return {(p, k - p): f for p, f in sorted(acc.items()) if not f.is_zero()}


def _dc_pullback(g: LieAlgebra, beta: KForm, J: ComplexStructure) -> KForm:
    # P^{-1} on (k+1)-forms is pullback by -J, i.e. (-1)^(k+1) times pullback by J
    out = J.pullback(g.d(J.pullback(beta)))
    return out if beta.degree % 2 == 1 else -out


def _dc_bidegree(g: LieAlgebra, beta: KForm, J: ComplexStructure) -> KForm:
    out = KForm.zero(g.dim, beta.degree + 1)
    for (p, q), comp in bidegree_split(beta, J).items():
        pieces = bidegree_split(g.d(comp), J)
        for (pp, qq), piece in pieces.items():
            if (pp, qq) == (p, q + 1):
                out = out + piece.scale(I)
            elif (pp, qq) == (p + 1, q):
                out = out - piece.scale(I)
            else:
                raise RouteMismatch(f"d of a ({p},{q})-form has a ({pp},{qq}) part; J is not integrable")
    return out


def dc(g: LieAlgebra, beta: KForm, J: ComplexStructure, check: bool = True) -> KForm:
    """``d^c beta = i(dbar - d) beta``.

    Computed as ``J^{-1} d J beta`` on real pullbacks and, when ``check``
    is set, independently from the bidegree decomposition.
    """
    a = _dc_pullback(g, beta, J)
    if check:
        b = _dc_bidegree(g, beta, J)
        if a != b:
            raise RouteMismatch(f"dc routes disagree: {a} vs {b}")
    return a


# -- standard complex coframe ------------------------------------------------

def to_real_frame(form: KForm) -> KForm:
    """Rewrite a ``"w"``-frame form in the real coframe ``f``."""
    if form.frame != "w":
        raise ValueError("expected a form on the complex coframe")
    dim = form.dim
    n = dim // 2
    images = []
    for j in range(1, n + 1):
        images.append(KForm(dim, 1, {(2 * j - 1,): 1, (2 * j,): I}))
    for j in range(1, n + 1):
        images.append(KForm(dim, 1, {(2 * j - 1,): 1, (2 * j,): -I}))
    return form.substitute(images)


def to_complex_frame(form: KForm) -> KForm:
    """Rewrite a real-coframe form in ``omega^j, conj(omega^j)``."""
    if form.frame != "e":
        raise ValueError("expected a form on the real coframe")
    dim = form.dim
    n = dim // 2
    half = Fraction(1, 2)
    images = []
    for j in range(1, n + 1):
        images.append(KForm(dim, 1, {(j,): half, (j + n,): half}, "w"))
        images.append(KForm(dim, 1, {(j,): Scalar(0, -half), (j + n,): Scalar(0, half)}, "w"))
    return form.substitute(images)


def realify(dws: Sequence[KForm], validate: bool = True) -> tuple[LieAlgebra, ComplexStructure]:
    """Real structure constants and ``J`` from ``d omega^j`` on the ``"w"`` frame."""
    n = len(dws)
    diffs = []
    for k, dw in enumerate(dws, start=1):
        if dw.frame != "w" or dw.dim != 2 * n or (dw.degree != 2 and not dw.is_zero()):
            raise ValueError(f"d omega^{k} must be a 2-form on the complex coframe of dimension {2 * n}")
        f = to_real_frame(dw) if not dw.is_zero() else KForm.zero(2 * n, 2)
        diffs += [f.real_part(), f.imag_part()]
    g = LieAlgebra.from_differentials(diffs)
    if validate:
        lie_algebra_validate(g, raise_on_error=True)
    return g, ComplexStructure.standard(2 * n)


def _w(n: int, a: int, b: int, c=1) -> KForm:
    return KForm.monomial(2 * n, (a, b), c, "w")


@dataclass(frozen=True)
class NonNilpotentFamilyParams:
    """Coefficients of the non-nilpotent normal form (``|E| = 1``, real ``b != 0``)."""

    A: Scalar
    E: Scalar
    b: Scalar

    def __post_init__(self):
        for name in ("A", "E", "b"):
            object.__setattr__(self, name, Scalar.coerce(getattr(self, name)))
        if self.E.norm2() != 1:
            raise InvalidParams(f"|E|^2 = {self.E.norm2()} but must be 1")
        if not self.b.is_real() or self.b.is_zero():
            raise InvalidParams("b must be a nonzero real number")


@dataclass(frozen=True)
class NilpotentFamilyParams:
    """Coefficients of the nilpotent normal form; ``epsilon, rho`` in {0, 1}."""

    epsilon: int
    rho: int
    A: Scalar = ZERO
    B: Scalar = ZERO
    C: Scalar = ZERO
    D: Scalar = ZERO

    def __post_init__(self):
        if self.epsilon not in (0, 1) or self.rho not in (0, 1):
            raise InvalidParams("epsilon and rho must be 0 or 1")
        for name in ("A", "B", "C", "D"):
            object.__setattr__(self, name, Scalar.coerce(getattr(self, name)))

    @classmethod
    def reduced(cls, rho: int, B=ZERO, D=ZERO) -> NilpotentFamilyParams:
        """The 2-step reduction ``d omega^3 = rho w12 + w11' + B w12' + D w22'``."""
        return cls(0, rho, ONE, B, ZERO, D)

    @property
    def is_reduced(self) -> bool:
        return self.epsilon == 0 and self.A == 1 and self.C == 0


def complex_structure_equations(params) -> list[KForm]:
    """``[d omega^1, d omega^2, d omega^3]`` on the ``"w"`` frame."""
    n = 3
    zero = KForm.zero(6, 2, "w")
    if isinstance(params, NonNilpotentFamilyParams):
        A, E, b = params.A, params.E, params.b
        d2 = _w(n, 1, 3, E) + _w(n, 1, 6)
        d3 = _w(n, 1, 4, A) + _w(n, 1, 5, I * b) - _w(n, 2, 4, I * b * E.conjugate())
        return [zero, d2, d3]
    if isinstance(params, NilpotentFamilyParams):
        eps, rho = params.epsilon, params.rho
        d2 = _w(n, 1, 4, eps)
        d3 = (_w(n, 1, 2, rho) + _w(n, 1, 4, (1 - eps) * params.A) + _w(n, 1, 5, params.B)
              + _w(n, 2, 4, params.C) + _w(n, 2, 5, (1 - eps) * params.D))
        return [zero, d2, d3]
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


def build_family(params) -> tuple[LieAlgebra, ComplexStructure]:
    g, J = realify(complex_structure_equations(params))
    if not is_integrable(g, J):
        raise RouteMismatch("realified normal form is not integrable")
    return g, J


def apply_basis_change(g: LieAlgebra, P: Sequence[Sequence], field=Scalar) -> LieAlgebra:
    """Structure constants in the coframe ``new^i = sum_j P[i][j] old^j``.

    Arithmetic is carried out in ``field`` (e.g. :class:`QSqrt2`); the
    transformed constants must land back in the rationals.
    """
    n = g.dim
    Pm = [[field.coerce(x) for x in row] for row in P]
    if len(Pm) != n or any(len(r) != n for r in Pm):
        raise ValueError("P must be a dim x dim matrix")
    Q = linalg.inverse(Pm)  # raises SingularMatrix
    zero = field.coerce(0)
    # new basis vectors: e'_a = sum_c Q[c][a] e_c
    consts = {(i, j): {k: field.coerce(c) for k, c in row.items()} for (i, j), row in g.brackets.items()}
    br = {}
    for a in range(n):
        for b in range(a + 1, n):
            vec = [zero] * n
            for (i, j), row in consts.items():
                coef = Q[i - 1][a] * Q[j - 1][b] - Q[j - 1][a] * Q[i - 1][b]
                if coef == 0:
                    continue
                for m, c in row.items():
                    vec[m - 1] = vec[m - 1] + coef * c
            out = {}
            for k in range(n):
                val = zero
                for m in range(n):
                    if vec[m] != 0 and Pm[k][m] != 0:
                        val = val + Pm[k][m] * vec[m]
                if val != 0:
                    out[k + 1] = _to_rational(val)
            if out:
                br[(a + 1, b + 1)] = out
    return LieAlgebra(n, br)


def _to_rational(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if getattr(x, "b", 0) != 0:
        raise ValueError(f"structure constant {x!r} is not rational")
    return Scalar(x.a)
