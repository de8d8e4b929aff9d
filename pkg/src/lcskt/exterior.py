"""Exterior algebra over a Lie algebra given by exact structure constants.

Forms are stored sparsely: a map from strictly increasing 1-based index
tuples to :class:`~lcskt.scalar.Scalar` coefficients. Vectors are plain
lists of length ``dim`` (position ``k - 1`` holds the ``e_k`` component).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import linalg
from .scalar import ONE, ZERO, Scalar, format_scalar

__all__ = [
    "AmbientMismatch",
    "JacobiViolation",
    "KForm",
    "LieAlgebra",
    "Subspace",
    "ValidationReport",
    "ce_differential",
    "closed_one_forms",
    "interior_product",
    "is_unimodular",
    "kernel_of_form",
    "lie_algebra_validate",
    "lower_central_series",
    "wedge",
]


class AmbientMismatch(ValueError):
    pass


class JacobiViolation(ValueError):
    def __init__(self, triple, message=None):
        self.triple = triple
        super().__init__(message or f"Jacobi identity fails on e_{triple[0]}, e_{triple[1]}, e_{triple[2]}")


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``idx``; 0 if an index repeats."""
    if len(set(idx)) != len(idx):
        return 0, ()
    inv = 0
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            if idx[a] > idx[b]:
                inv += 1
    return (-1 if inv & 1 else 1), tuple(sorted(idx))


class KForm:
    """An alternating k-form with exact Gaussian-rational coefficients.

    ``frame`` tags the coframe the indices refer to (``"e"`` for the real
    coframe of an algebra, ``"w"`` for the complex coframe
    omega^1..omega^n, conj(omega^1)..conj(omega^n)). Forms on different
    frames or dimensions never mix.
    """

    __slots__ = ("dim", "degree", "_terms", "frame")

    def __init__(self, dim: int, degree: int, terms: Mapping | None = None, frame: str = "e"):
        self.dim = dim
        self.degree = degree
        self.frame = frame
        clean = {}
        for idx, c in (terms or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} does not have length {degree}")
            if any(i < 1 or i > dim for i in idx):
                raise ValueError(f"index {idx} outside 1..{dim}")
            sign, key = _sort_sign(idx)
            if sign == 0:
                continue
            c = Scalar.coerce(c)
            val = clean.get(key, ZERO) + (c if sign > 0 else -c)
            if val.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = val
        self._terms = clean

    # construction helpers
    @classmethod
    def zero(cls, dim: int, degree: int, frame: str = "e") -> KForm:
        return cls(dim, degree, {}, frame)

    @classmethod
    def monomial(cls, dim: int, idx: Iterable[int], coeff=1, frame: str = "e") -> KForm:
        idx = tuple(idx)
        return cls(dim, len(idx), {idx: coeff}, frame)

    @classmethod
    def constant(cls, dim: int, c, frame: str = "e") -> KForm:
        return cls(dim, 0, {(): c}, frame)

    @classmethod
    def one_form(cls, coeffs: Sequence, frame: str = "e") -> KForm:
        return cls(len(coeffs), 1, {(k + 1,): c for k, c in enumerate(coeffs)}, frame)

    @property
    def terms(self) -> dict[tuple[int, ...], Scalar]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def coefficient(self, idx: Iterable[int]) -> Scalar:
        sign, key = _sort_sign(tuple(idx))
        if sign == 0:
            return ZERO
        c = self._terms.get(key, ZERO)
        return c if sign > 0 else -c

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _check(self, other: KForm):
        if not isinstance(other, KForm):
            raise TypeError(f"expected KForm, got {type(other).__name__}")
        if other.dim != self.dim or other.frame != self.frame:
            raise AmbientMismatch(
                f"forms live on different ambients ({self.frame}{self.dim} vs {other.frame}{other.dim})")

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        if other.dim != self.dim or other.frame != self.frame:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self):
        return hash((self.dim, self.frame, self.degree, frozenset(self._terms.items())))

    def __add__(self, other: KForm) -> KForm:
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        t = dict(self._terms)
        for k, c in other._terms.items():
            t[k] = t.get(k, ZERO) + c
        return KForm(self.dim, self.degree, t, self.frame)

    def __neg__(self) -> KForm:
        return KForm(self.dim, self.degree, {k: -c for k, c in self._terms.items()}, self.frame)

    def __sub__(self, other: KForm) -> KForm:
        return self + (-other)

    def scale(self, c) -> KForm:
        c = Scalar.coerce(c)
        if c.is_zero():
            return KForm.zero(self.dim, self.degree, self.frame)
        return KForm(self.dim, self.degree, {k: c * v for k, v in self._terms.items()}, self.frame)

    def __mul__(self, c) -> KForm:
        if isinstance(c, KForm):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __xor__(self, other: KForm) -> KForm:
        return wedge(self, other)

    def conjugate(self) -> KForm:
        """Complex conjugate of the coefficients (meaningful on the real frame)."""
        return KForm(self.dim, self.degree, {k: c.conjugate() for k, c in self._terms.items()}, self.frame)

    def real_part(self) -> KForm:
        return KForm(self.dim, self.degree, {k: Scalar(c.re) for k, c in self._terms.items()}, self.frame)

    def imag_part(self) -> KForm:
        return KForm(self.dim, self.degree, {k: Scalar(c.im) for k, c in self._terms.items()}, self.frame)

    def is_real(self) -> bool:
        return all(c.im == 0 for c in self._terms.values())

    def evaluate(self, *vectors: Sequence) -> Scalar:
        """Value on ``degree`` vectors (determinant convention)."""
        if len(vectors) != self.degree:
            raise ValueError(f"a {self.degree}-form takes {self.degree} vectors")
        acc = ZERO
        for idx, c in self._terms.items():
            m = [[Scalar.coerce(v[i - 1]) for v in vectors] for i in idx]
            acc = acc + c * linalg.det(m) if m else acc + c
        return acc

    def substitute(self, images: Sequence[KForm]) -> KForm:
        """Rewrite in another coframe given the image of each basis 1-form.

        ``images[k - 1]`` expresses the k-th basis 1-form in the target frame.
        """
        if len(images) != self.dim:
            raise ValueError("need one image per basis 1-form")
        target = images[0]
        out = KForm.zero(target.dim, self.degree, target.frame)
        if self.degree == 0:
            return KForm(target.dim, 0, dict(self._terms), target.frame)
        for idx, c in self._terms.items():
            term = images[idx[0] - 1]
            for i in idx[1:]:
                term = wedge(term, images[i - 1])
            out = out + term.scale(c)
        return out

    def __repr__(self):
        return f"KForm({self.frame}{self.dim}, deg={self.degree}, {format_form(self)!r})"

    def __str__(self):
        return format_form(self)


def _index_text(idx: tuple[int, ...], frame: str, dim: int) -> str:
    if frame == "w":
        n = dim // 2
        return "".join(str(i) if i <= n else f"{i - n}'" for i in idx)
    return "".join(str(i) for i in idx)


def format_form(form: KForm) -> str:
    """Canonical text: ``2*125``, ``123-145-246``, ``(1,2)*12'`` ..."""
    if form.is_zero():
        return "0"
    parts = []
    for idx, c in form.items():
        body = _index_text(idx, form.frame, form.dim) if idx else ""
        if not body:
            parts.append(format_scalar(c) if c.im == 0 or c.re == 0 else format_scalar(c))
            continue
        if c == ONE:
            parts.append(body)
        elif c == -ONE:
            parts.append("-" + body)
        else:
            parts.append(f"{format_scalar(c)}*{body}")
    out = parts[0]
    for p in parts[1:]:
        out += p if p.startswith("-") else "+" + p
    return out


def wedge(a: KForm, b: KForm) -> KForm:
    a._check(b)
    if a.degree + b.degree > a.dim:
        return KForm.zero(a.dim, a.degree + b.degree, a.frame)
    out: dict = {}
    for ia, ca in a._terms.items():
        for ib, cb in b._terms.items():
            sign, key = _sort_sign(ia + ib)
            if sign == 0:
                continue
            v = ca * cb
            out[key] = out.get(key, ZERO) + (v if sign > 0 else -v)
    return KForm(a.dim, a.degree + b.degree, out, a.frame)


@dataclass(frozen=True)
class Subspace:
    basis_vectors: tuple[tuple[Scalar, ...], ...]
    ambient_dim: int

    @property
    def dim(self) -> int:
        return len(self.basis_vectors)

    def contains(self, v: Sequence) -> bool:
        rows = [list(b) for b in self.basis_vectors]
        return linalg.rank(rows + [list(v)]) == len(rows) if rows else all(Scalar.coerce(x) == 0 for x in v)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    triple: tuple[int, int, int] | None = None


class LieAlgebra:
    """A real Lie algebra ``[e_i, e_j] = sum_k c[i][j][k] e_k``.

    Constants are stored for ``i < j`` only (1-based), the rest follows by
    antisymmetry. The Chevalley-Eilenberg differential is
    ``de^k = -sum_{i<j} c[i][j][k] e^{ij}``, so the Salamon string
    ``(0,0,0,0,0,12)`` means ``de^6 = e^12`` and ``[e_1, e_2] = -e_6``.
    """

    def __init__(self, dim: int, brackets: Mapping | None = None, labels: Sequence[str] | None = None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self.labels = tuple(labels) if labels else tuple(f"e{k}" for k in range(1, dim + 1))
        c: dict[tuple[int, int], dict[int, Scalar]] = {}
        for (i, j), vec in (brackets or {}).items():
            if i == j:
                if any(Scalar.coerce(x) != 0 for x in vec.values()):
                    raise ValueError("[e_i, e_i] must vanish")
                continue
            sign = 1
            if i > j:
                i, j, sign = j, i, -1
            for k, x in vec.items():
                x = Scalar.coerce(x)
                if x.im != 0:
                    raise ValueError("structure constants must be real")
                if not 1 <= k <= dim or not 1 <= i <= dim or not 1 <= j <= dim:
                    raise ValueError("bracket index out of range")
                row = c.setdefault((i, j), {})
                row[k] = row.get(k, ZERO) + (x if sign > 0 else -x)
        self._c = {key: {k: x for k, x in row.items() if x != 0} for key, row in c.items()}
        self._c = {key: row for key, row in self._c.items() if row}
        self._d1 = tuple(self._basis_differential(k) for k in range(1, dim + 1))
        self._dcache: dict[tuple[int, ...], KForm] = {}

    @classmethod
    def from_differentials(cls, diffs: Sequence[KForm], labels=None) -> LieAlgebra:
        """Build from the structure equations ``de^k = diffs[k-1]``."""
        dim = len(diffs)
        br: dict = {}
        for k, f in enumerate(diffs, start=1):
            if f.is_zero():
                continue
            if f.degree != 2 or f.dim != dim:
                raise ValueError(f"de^{k} must be a 2-form on dimension {dim}")
            if not f.is_real():
                raise ValueError(f"de^{k} has non-real coefficients")
            for (i, j), x in f.items():
                br.setdefault((i, j), {})[k] = -x
        return cls(dim, br, labels)

    @classmethod
    def abelian(cls, dim: int) -> LieAlgebra:
        return cls(dim, {})

    def structure_constant(self, i: int, j: int, k: int) -> Scalar:
        if i == j:
            return ZERO
        if i < j:
            return self._c.get((i, j), {}).get(k, ZERO)
        return -self._c.get((j, i), {}).get(k, ZERO)

    @property
    def brackets(self) -> dict[tuple[int, int], dict[int, Scalar]]:
        return {key: dict(row) for key, row in self._c.items()}

    def bracket(self, x: Sequence, y: Sequence) -> list[Scalar]:
        out = [ZERO] * self.dim
        for (i, j), row in self._c.items():
            coef = Scalar.coerce(x[i - 1]) * Scalar.coerce(y[j - 1]) - Scalar.coerce(x[j - 1]) * Scalar.coerce(y[i - 1])
            if coef.is_zero():
                continue
            for k, c in row.items():
                out[k - 1] = out[k - 1] + coef * c
        return out

    def basis_vector(self, k: int) -> list[Scalar]:
        v = [ZERO] * self.dim
        v[k - 1] = ONE
        return v

    def ad_matrix(self, x: Sequence) -> list[list[Scalar]]:
        """Matrix of ``ad_x`` (columns are images of the basis vectors)."""
        cols = [self.bracket(x, self.basis_vector(j)) for j in range(1, self.dim + 1)]
        return linalg.transpose(cols)

    def _basis_differential(self, k: int) -> KForm:
        t = {}
        for (i, j), row in self._c.items():
            if k in row:
                t[(i, j)] = -row[k]
        return KForm(self.dim, 2, t)

    def d_basis(self, k: int) -> KForm:
        return self._d1[k - 1]

    def d(self, form: KForm) -> KForm:
        return ce_differential(self, form)

    def structure_equations(self) -> list[KForm]:
        return list(self._d1)

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.dim == other.dim and self._c == other._c

    def __hash__(self):
        return hash((self.dim, frozenset((k, frozenset(v.items())) for k, v in self._c.items())))

    def __repr__(self):
        return f"LieAlgebra({salamon_string(self)})"


def salamon_string(g: LieAlgebra) -> str:
    return "(" + ",".join(format_form(f) for f in g.structure_equations()) + ")"


def _d_monomial(g: LieAlgebra, idx: tuple[int, ...]) -> KForm:
    hit = g._dcache.get(idx)
    if hit is not None:
        return hit
    out = KForm.zero(g.dim, len(idx) + 1)
    for m, i in enumerate(idx):
        di = g._d1[i - 1]
        if di.is_zero():
            continue
        left = KForm.monomial(g.dim, idx[:m]) if m else KForm.constant(g.dim, 1)
        right = KForm.monomial(g.dim, idx[m + 1:]) if m + 1 < len(idx) else KForm.constant(g.dim, 1)
        term = wedge(wedge(left, di), right)
        out = out - term if m & 1 else out + term
    g._dcache[idx] = out
    return out


def ce_differential(g: LieAlgebra, form: KForm) -> KForm:
    """Chevalley-Eilenberg differential of ``form``."""
    if form.dim != g.dim or form.frame != "e":
        raise AmbientMismatch("form does not live on this algebra")
    out = KForm.zero(g.dim, form.degree + 1)
    for idx, c in form.items():
        if not idx:
            continue
        out = out + _d_monomial(g, idx).scale(c)
    return out


def interior_product(x: Sequence, form: KForm) -> KForm:
    """Contraction ``iota_x form`` (insertion into the first slot)."""
    if len(x) != form.dim:
        raise AmbientMismatch("vector and form have different dimensions")
    if form.degree == 0:
        return KForm.zero(form.dim, 0, form.frame)
    out: dict = {}
    for idx, c in form.items():
        for m, i in enumerate(idx):
            xi = Scalar.coerce(x[i - 1])
            if xi.is_zero():
                continue
            key = idx[:m] + idx[m + 1:]
            v = c * xi
            out[key] = out.get(key, ZERO) + (-v if m & 1 else v)
    return KForm(form.dim, form.degree - 1, out, form.frame)


def kernel_of_form(form: KForm) -> Subspace:
    """``{X : iota_X form = 0}`` as an exact subspace."""
    n = form.dim
    if form.degree == 0 or form.is_zero():
        basis = [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
        return Subspace(tuple(tuple(b) for b in basis), n)
    images = []
    for k in range(n):
        e = [ZERO] * n
        e[k] = ONE
        images.append(interior_product(e, form))
    keys = sorted({key for im in images for key in im.terms})
    mat = [[im.coefficient(key) for im in images] for key in keys]
    basis = linalg.nullspace(mat)
    return Subspace(tuple(tuple(Scalar.coerce(x) for x in b) for b in basis), n)


def lie_algebra_validate(g: LieAlgebra, raise_on_error: bool = False) -> ValidationReport:
    """Check the Jacobi identity through ``d(de^k) = 0``."""
    for k in range(1, g.dim + 1):
        dd = ce_differential(g, g.d_basis(k))
        if not dd.is_zero():
            triple = dd.items()[0][0]
            if raise_on_error:
                raise JacobiViolation(triple)
            return ValidationReport(False, triple)
    return ValidationReport(True)


def _span_basis(vectors: list[list]) -> list[list]:
    if not vectors:
        return []
    r, piv = linalg.rref(vectors)
    return [row for row in r[: len(piv)]]


def lower_central_series(g: LieAlgebra) -> tuple[list[int], int | None]:
    """Dimensions of ``g^0, g^1, ...`` until the series stabilises.

    Returns ``(dims, step)`` where ``step`` is the nilpotency step (the
    first ``k`` with ``g^k = 0``) or ``None`` if the algebra is not
    nilpotent.
    """
    current = [g.basis_vector(k) for k in range(1, g.dim + 1)]
    dims = [g.dim]
    while True:
        brs = [g.bracket(x, g.basis_vector(k)) for x in current for k in range(1, g.dim + 1)]
        nxt = _span_basis([b for b in brs if any(not c.is_zero() for c in b)])
        dims.append(len(nxt))
        if len(nxt) == 0:
            return dims, len(dims) - 1
        if len(nxt) == len(current):
            return dims, None
        current = nxt


def closed_one_forms(g: LieAlgebra) -> list[KForm]:
    """Basis of the closed 1-forms, i.e. the annihilator of ``[g, g]``."""
    cols = [g.d_basis(k) for k in range(1, g.dim + 1)]
    keys = sorted({key for c in cols for key in c.terms})
    mat = [[c.coefficient(key) for c in cols] for key in keys]
    return [KForm.one_form(b) for b in linalg.nullspace(mat, n_cols=g.dim)]


def is_unimodular(g: LieAlgebra) -> bool:
    for i in range(1, g.dim + 1):
        tr = ZERO
        for k in range(1, g.dim + 1):
            tr = tr + g.structure_constant(i, k, k)
        if not tr.is_zero():
            return False
    return True


def all_indices(dim: int, degree: int):
    return combinations(range(1, dim + 1), degree)
