"""Text formats for structure equations.

Real algebras use Salamon notation, one entry per ``de^k``::

    # l8 with free parameters
    param p = 4
    param q = -1
    (p*16, q*26, q*36, s*46+56, s*56-46, 0)

Complex coframes use one line per ``d omega^k`` with an apostrophe marking
conjugates (``12'`` is ``omega^1 ^ conj(omega^2)``)::

    d2 = 11'
    d3 = 12 - 12'

Coefficients are rationals (``3/2``), imaginary rationals (``2i``, ``i``),
pairs ``(re,im)``, bound parameter names, ``conj(NAME)`` and ``*``-products
of these. Both formats print back in the form they parse.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .complexgeo import ComplexStructure, InvalidParams, realify
from .exterior import KForm, LieAlgebra, format_form, lie_algebra_validate, salamon_string
from .scalar import I, ONE, Scalar

__all__ = [
    "ComplexEquations",
    "ParseError",
    "UnboundParam",
    "format_complex_dsl",
    "format_real_dsl",
    "parse_complex_dsl",
    "parse_form",
    "parse_real_dsl",
    "parse_scalar",
]

MAX_INDEX = 9

# qualifiers implied by the names used in the non-nilpotent normal form
DEFAULT_QUALIFIERS = {"E": ("unit",), "b": ("real", "nonzero")}
QUALIFIERS = ("unit", "real", "nonzero")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"\d+(?:/\d+)?")


class ParseError(ValueError):
    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        self.line, self.col, self.expected, self.found = line, col, expected, found
        where = f"line {line}, column {col}"
        got = f", found {found!r}" if found else ", found end of input"
        super().__init__(f"{where}: expected {expected}{got}")


class UnboundParam(ValueError):
    def __init__(self, name: str, line: int = 0, col: int = 0):
        self.name, self.line, self.col = name, line, col
        super().__init__(f"line {line}, column {col}: parameter {name!r} is not bound")


class _Cursor:
    def __init__(self, text: str):
        # the unicode minus has the same width, so positions survive
        self.text = text.replace("−", "-")
        self.pos = 0

    def location(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, expected: str, pos: int | None = None):
        pos = self.pos if pos is None else pos
        found = self.text[pos:pos + 1]
        raise ParseError(*self.location(pos), expected, found)

    def skip(self, newlines: bool = True):
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "#":
                end = self.text.find("\n", self.pos)
                self.pos = len(self.text) if end < 0 else end
            elif ch in " \t\r" or (newlines and ch == "\n"):
                self.pos += 1
            else:
                break

    def peek(self, newlines: bool = True) -> str:
        self.skip(newlines)
        return self.text[self.pos:self.pos + 1]

    def accept(self, s: str, newlines: bool = True) -> bool:
        self.skip(newlines)
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str, newlines: bool = True):
        if not self.accept(s, newlines):
            self.fail(repr(s))

    def match(self, pattern: re.Pattern) -> str | None:
        m = pattern.match(self.text, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return m.group(0)

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)


class _Grammar:
    """Recursive descent shared by both formats.

    ``complex_frame`` switches the index syntax to ``j``/``j'`` on ``2n``
    coframe slots; otherwise each digit is one real index.
    """

    def __init__(self, cur: _Cursor, params: Mapping[str, Scalar], complex_frame: bool, newlines: bool):
        self.cur = cur
        self.params = params
        self.complex_frame = complex_frame
        self.nl = newlines
        self.run = re.compile(r"[0-9']+") if complex_frame else re.compile(r"\d+")

    # coefficients
    def signed_rational(self) -> Fraction:
        cur = self.cur
        neg = cur.accept("-", self.nl)
        cur.skip(self.nl)
        tok = cur.match(_NUMBER)
        if tok is None:
            cur.fail("rational")
        return -Fraction(tok) if neg else Fraction(tok)

    def lookup(self, name: str, pos: int) -> Scalar:
        if name not in self.params:
            raise UnboundParam(name, *self.cur.location(pos))
        return self.params[name]

    def finish_number(self, digits: str) -> Scalar:
        """Complete a coefficient whose leading digits were consumed."""
        cur = self.cur
        text = digits
        if cur.text.startswith("/", cur.pos):
            cur.pos += 1
            den = cur.match(re.compile(r"\d+"))
            if den is None:
                cur.fail("denominator")
            text += "/" + den
        q = Fraction(text)
        if _imag_suffix(cur):
            cur.pos += 1
            return Scalar(0, q)
        return Scalar(q)

    def factor(self) -> Scalar:
        cur = self.cur
        cur.skip(self.nl)
        start = cur.pos
        ch = cur.text[start:start + 1]
        if ch == "(":
            cur.pos += 1
            re_part = self.signed_rational()
            cur.expect(",", self.nl)
            im_part = self.signed_rational()
            cur.expect(")", self.nl)
            return Scalar(re_part, im_part)
        if ch.isdigit():
            return self.finish_number(cur.match(re.compile(r"\d+")))
        name = cur.match(_IDENT)
        if name is None:
            cur.fail("coefficient")
        if name == "i":
            return I
        if name == "conj":
            cur.expect("(", self.nl)
            cur.skip(self.nl)
            inner = cur.pos
            arg = cur.match(_IDENT)
            if arg is None:
                cur.fail("parameter name")
            cur.expect(")", self.nl)
            return self.lookup(arg, inner).conjugate()
        return self.lookup(name, start)

    # monomials
    def slots(self, digits: str, start: int, dim: int) -> tuple[int, ...]:
        """``12'`` style text to coframe slots (1-based)."""
        cur = self.cur
        out = []
        if self.complex_frame:
            n = dim // 2
            k = 0
            while k < len(digits):
                if digits[k] == "'":
                    cur.fail("index digit", start + k)
                j = int(digits[k])
                conj = digits[k + 1:k + 2] == "'"
                if not 1 <= j <= n:
                    cur.fail(f"index in 1..{n}", start + k)
                out.append(j + n if conj else j)
                k += 2 if conj else 1
        else:
            for k, ch in enumerate(digits):
                if not 1 <= int(ch) <= dim:
                    cur.fail(f"index in 1..{dim}", start + k)
                out.append(int(ch))
        if len(set(out)) != len(out):
            cur.fail("distinct indices", start)
        return tuple(out)

    def term(self, dim: int) -> tuple[tuple[int, ...], Scalar, int] | None:
        """``[coeff '*']* index``; ``None`` for a bare ``0``."""
        cur = self.cur
        coeff, bare = ONE, True
        while True:
            cur.skip(self.nl)
            start = cur.pos
            if cur.text[start:start + 1].isdigit():
                digits = cur.match(self.run)
                after = cur.pos
                is_coeff = "'" not in digits and (
                    cur.text[after:after + 1] == "/" or _imag_suffix(cur) or cur.peek(self.nl) == "*")
                cur.pos = after
                if not is_coeff:
                    if bare and digits == "0":
                        return None
                    return self.slots(digits, start, dim), coeff, start
                cur.pos = start
                coeff = coeff * self.finish_number(cur.match(re.compile(r"\d+")))
            else:
                coeff = coeff * self.factor()
            bare = False
            if not cur.accept("*", self.nl):
                cur.fail("'*' followed by an index")

    def form(self, dim: int, degree: int | None) -> KForm:
        """``sum := term (('+'|'-') term)*``; a bare ``0`` is the zero form."""
        cur = self.cur
        frame = "w" if self.complex_frame else "e"
        out = None
        sign = -1 if cur.accept("-", self.nl) else 1
        while True:
            got = self.term(dim)
            if got is not None:
                idx, c, start = got
                if degree is None:
                    degree = len(idx)
                elif len(idx) != degree:
                    cur.fail(f"{degree} indices", start)
                mono = KForm.monomial(dim, idx, c if sign > 0 else -c, frame)
                out = mono if out is None else out + mono
            nxt = cur.peek(self.nl)
            if nxt not in ("+", "-"):
                break
            cur.pos += 1
            sign = 1 if nxt == "+" else -1
        return out if out is not None else KForm.zero(dim, degree or 0, frame)


def _imag_suffix(cur: _Cursor) -> bool:
    """An ``i`` right after a number (``2i``) that does not start a name."""
    p = cur.pos
    return cur.text[p:p + 1] == "i" and not (cur.text[p + 1:p + 2].isalnum() or cur.text[p + 1:p + 2] == "_")


# -- parameters ------------------------------------------------------------------

def _check_qualifiers(name: str, value: Scalar, quals) -> None:
    for q in quals:
        if q == "unit" and value.norm2() != 1:
            raise InvalidParams(f"{name} must have modulus 1, got |{name}|^2 = {value.norm2()}")
        if q == "real" and value.im != 0:
            raise InvalidParams(f"{name} must be real")
        if q == "nonzero" and value.is_zero():
            raise InvalidParams(f"{name} must be nonzero")


def _coerce_params(params: Mapping | None) -> dict[str, Scalar]:
    out = {}
    for k, v in (params or {}).items():
        out[k] = parse_scalar(v) if isinstance(v, str) else Scalar.coerce(v)
    return out


class _Bindings:
    """``param`` lines seen so far; explicit overrides always win."""

    def __init__(self, overrides: Mapping | None):
        self.overrides = _coerce_params(overrides)
        self.values = dict(self.overrides)
        self.qualifiers: dict[str, tuple] = {}

    def read_line(self, cur: _Cursor):
        """``param NAME = VALUE [qualifier...]`` after the keyword."""
        cur.skip(False)
        start = cur.pos
        name = cur.match(_IDENT)
        if name is None or name in ("i", "conj", "param"):
            cur.fail("parameter name", start)
        cur.expect("=", False)
        g = _Grammar(cur, self.values, complex_frame=False, newlines=False)
        neg = cur.accept("-", False)
        value = g.factor()
        while cur.accept("*", False):
            value = value * g.factor()
        quals = []
        while cur.peek(False).isalpha():
            at = cur.pos
            word = cur.match(_IDENT)
            if word not in QUALIFIERS:
                cur.fail("qualifier (unit, real, nonzero)", at)
            quals.append(word)
        if cur.peek(False) not in ("", "\n", ";"):
            cur.fail("end of line")
        cur.accept(";", False)
        if quals:
            self.qualifiers[name] = tuple(quals)
        self.values[name] = self.overrides.get(name, -value if neg else value)

    def check(self, defaults: Mapping = {}):
        for name, quals in {**defaults, **self.qualifiers}.items():
            if name in self.values:
                _check_qualifiers(name, self.values[name], quals)


def _at_keyword(cur: _Cursor, word: str) -> bool:
    m = _IDENT.match(cur.text, cur.pos)
    return m is not None and m.group(0) == word


def parse_scalar(text: str, params: Mapping | None = None) -> Scalar:
    """A single coefficient such as ``-3/2``, ``(1,-2)``, ``2i`` or ``i*b``."""
    cur = _Cursor(text)
    g = _Grammar(cur, _coerce_params(params), complex_frame=False, newlines=True)
    neg = cur.accept("-")
    value = g.factor()
    while cur.accept("*"):
        value = value * g.factor()
    if not cur.at_end():
        cur.fail("end of input")
    return -value if neg else value


def parse_form(text: str, dim: int, frame: str = "e", params: Mapping | None = None) -> KForm:
    """A form of positive degree in the output notation (``2*125``, ``-4*3``, ``(1,2)*12'``).

    On the ``"w"`` frame ``dim`` is the real dimension ``2n``.
    """
    if frame not in ("e", "w"):
        raise ValueError(f"unknown frame {frame!r}")
    cur = _Cursor(text)
    g = _Grammar(cur, _coerce_params(params), complex_frame=frame == "w", newlines=True)
    out = g.form(dim, None)
    if not cur.at_end():
        cur.fail("'+', '-' or end of input")
    return out


# -- real algebras -----------------------------------------------------------------

def _count_entries(cur: _Cursor) -> int:
    """Top-level entries of the parenthesised algebra starting at ``cur.pos``."""
    depth, count, k, text = 0, 1, cur.pos, cur.text
    while k < len(text):
        ch = text[k]
        if ch == "#":
            nl = text.find("\n", k)
            k = len(text) if nl < 0 else nl
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                break
        elif ch == "," and depth == 1:
            count += 1
        k += 1
    return count


def parse_real_dsl(text: str, params: Mapping | None = None, validate: bool = True) -> LieAlgebra:
    """Parse a Salamon-notation file; ``params`` override ``param`` lines.

    Raises :class:`ParseError`, :class:`UnboundParam` and, when
    ``validate`` is set, :class:`JacobiViolation`.
    """
    cur = _Cursor(text)
    binds = _Bindings(params)
    alg = None
    while not cur.at_end():
        if alg is not None:
            cur.fail("end of input")
        if _at_keyword(cur, "param"):
            cur.pos += len("param")
            binds.read_line(cur)
            continue
        if cur.peek() != "(":
            cur.fail("'(' or 'param'")
        dim = _count_entries(cur)
        if dim > MAX_INDEX:
            cur.fail(f"at most {MAX_INDEX} entries")
        cur.pos += 1
        g = _Grammar(cur, binds.values, complex_frame=False, newlines=True)
        diffs = []
        for k in range(dim):
            cur.skip()
            entry = cur.pos
            form = g.form(dim, 2)
            if not form.is_real():
                cur.fail("real coefficients", entry)
            diffs.append(form if form.degree == 2 else KForm.zero(dim, 2))
            cur.expect("," if k < dim - 1 else ")")
        alg = LieAlgebra.from_differentials(diffs)
    if alg is None:
        cur.fail("'(' starting an algebra")
    binds.check()
    if validate:
        lie_algebra_validate(alg, raise_on_error=True)
    return alg


def format_real_dsl(g: LieAlgebra) -> str:
    return salamon_string(g)


# -- complex coframes --------------------------------------------------------------

@dataclass
class ComplexEquations:
    """``d omega^k`` for ``k = 1..n`` on the ``"w"`` frame, plus the bindings used."""

    n: int
    differentials: list[KForm]
    params: dict[str, Scalar] = field(default_factory=dict)

    def realify(self, validate: bool = True) -> tuple[LieAlgebra, ComplexStructure]:
        return realify(self.differentials, validate=validate)

    def __str__(self):
        return format_complex_dsl(self.differentials)


def _parse_complex(text: str, params, n: int) -> ComplexEquations:
    cur = _Cursor(text)
    binds = _Bindings(params)
    dim = 2 * n
    diffs: dict[int, KForm] = {}
    while not cur.at_end():
        start = cur.pos
        word = cur.match(_IDENT)
        if word == "param":
            binds.read_line(cur)
            continue
        m = re.fullmatch(r"d(\d+)", word or "")
        if m is None:
            cur.fail("'dK =' or 'param'", start)
        k = int(m.group(1))
        if not 1 <= k <= n:
            cur.fail(f"index in 1..{n}", start + 1)
        if k in diffs:
            cur.fail(f"a single equation for d{k}", start)
        cur.expect("=", False)
        g = _Grammar(cur, binds.values, complex_frame=True, newlines=False)
        form = g.form(dim, 2)
        diffs[k] = form if form.degree == 2 else KForm.zero(dim, 2, "w")
        if cur.peek(False) not in ("", "\n", ";"):
            cur.fail("'+', '-' or end of line")
        cur.accept(";", False)
    binds.check(DEFAULT_QUALIFIERS)
    out = [diffs.get(k, KForm.zero(dim, 2, "w")) for k in range(1, n + 1)]
    return ComplexEquations(n, out, binds.values)


def _needed_n(eqs: ComplexEquations) -> int:
    n = eqs.n
    used = [k for k, f in enumerate(eqs.differentials, start=1) if not f.is_zero()]
    for f in eqs.differentials:
        for idx, _ in f.items():
            used += [i if i <= n else i - n for i in idx]
    return max(used, default=1)


def parse_complex_dsl(text: str, params: Mapping | None = None, n: int | None = None) -> ComplexEquations:
    """Parse ``dK = ...`` lines; equations not given are zero.

    ``n`` defaults to the largest index mentioned (as a label or inside a
    monomial). ``E`` must have modulus one and ``b`` must be real and
    nonzero when bound, matching the non-nilpotent normal form; other
    names accept explicit ``unit``/``real``/``nonzero`` qualifiers.
    """
    if n is not None:
        return _parse_complex(text, params, n)
    wide = _parse_complex(text, params, MAX_INDEX)
    labels = [int(m) for m in re.findall(r"(?m)^\s*d(\d+)\s*=", _Cursor(text).text)]
    return _parse_complex(text, params, max([_needed_n(wide), *labels]))


def format_complex_dsl(differentials) -> str:
    return "\n".join(f"d{k} = {format_form(f)}" for k, f in enumerate(differentials, start=1))
