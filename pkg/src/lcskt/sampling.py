"""Seeded random draws of small-height exact parameters."""

from __future__ import annotations

import random
from fractions import Fraction

from . import linalg
from .scalar import ZERO, Scalar, rational_circle_point

HEIGHT = 20


def make_rng(seed, *tags) -> random.Random:
    """Independent deterministic stream for ``(seed, tags...)``."""
    return random.Random(":".join(str(x) for x in (seed, *tags)))


def rational(rng: random.Random, height: int = HEIGHT, nonzero: bool = False, positive: bool = False) -> Fraction:
    while True:
        num = rng.randint(1 if positive else -height, height)
        q = Fraction(num, rng.randint(1, height))
        if (q != 0 or not nonzero) and (q > 0 or not positive):
            return q


def small_rational(rng: random.Random, nonzero: bool = False) -> Fraction:
    return rational(rng, 4, nonzero)


def gaussian(rng: random.Random, height: int = HEIGHT) -> Scalar:
    return Scalar(rational(rng, height), rational(rng, height))


def unit_gaussian(rng: random.Random) -> Scalar:
    return rational_circle_point(rational(rng))


def nilpotent_metric(rng: random.Random):
    """Positive definite generic metric parameters (rejection sampling)."""
    from .hermitian import NilpotentMetricParams, NotPositiveDefinite

    while True:
        r, s, t = (rational(rng, positive=True) for _ in range(3))
        u, v, z = (gaussian(rng, 6) if rng.random() < 0.8 else ZERO for _ in range(3))
        try:
            return NilpotentMetricParams(r, s, t, u, v, z)
        except NotPositiveDefinite:
            continue


def nonnilpotent_params(rng: random.Random):
    from .complexgeo import NonNilpotentFamilyParams

    return NonNilpotentFamilyParams(gaussian(rng), unit_gaussian(rng), rational(rng, nonzero=True))


def nilpotent_params(rng: random.Random, epsilon: int, fixed: dict | None = None):
    from .complexgeo import NilpotentFamilyParams

    fixed = fixed or {}
    rho = fixed.get("rho", rng.randint(0, 1))
    vals = {k: Scalar.coerce(fixed[k]) if k in fixed else gaussian(rng) for k in ("A", "B", "C", "D")}
    if epsilon == 0:
        return NilpotentFamilyParams.reduced(rho, vals["B"], vals["D"])
    return NilpotentFamilyParams(1, rho, vals["A"], vals["B"], vals["C"], vals["D"])


# -- almost abelian data -------------------------------------------------------

def _complex_block(entries: list[list[Scalar]]) -> list[list[Fraction]]:
    """Real matrix of a complex matrix for the complex structure ``e_{2k} -> e_{2k+1}``."""
    m = len(entries)
    out = [[Fraction(0)] * (2 * m) for _ in range(2 * m)]
    for i in range(m):
        for j in range(m):
            c = entries[i][j]
            out[2 * i][2 * j] = c.re
            out[2 * i][2 * j + 1] = -c.im
            out[2 * i + 1][2 * j] = c.im
            out[2 * i + 1][2 * j + 1] = c.re
    return out


def rational_orthogonal(rng: random.Random, size: int) -> list[list[Fraction]]:
    """Cayley transform of a random skew matrix, times a random signed permutation."""
    k = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            if rng.random() < 0.5:
                x = small_rational(rng)
                k[i][j], k[j][i] = x, -x
    eye = linalg.identity(size, Fraction(1), Fraction(0))
    q = linalg.matmul(linalg.msub(eye, k), linalg.inverse(linalg.madd(eye, k)))
    perm = list(range(size))
    rng.shuffle(perm)
    signs = [rng.choice((1, -1)) for _ in range(size)]
    p = [[Fraction(signs[i]) if perm[i] == j else Fraction(0) for j in range(size)] for i in range(size)]
    return linalg.matmul(q, p)


ALMOST_ABELIAN_KINDS = ("generic", "degenerate", "normal", "skew", "balanced")


def almost_abelian(rng: random.Random, n: int = 3, kind: str | None = None):
    """Random :class:`AlmostAbelianData` of a given flavour.

    ``normal`` draws have eigenvalue real parts in ``{0, m}`` so that the
    LCSKT condition can actually be met; ``degenerate`` draws have a
    kernel; ``balanced`` draws have ``v = 0`` and traceless non-skew ``A``.
    """
    from .almost_abelian import AlmostAbelianData

    kind = kind or rng.choice(ALMOST_ABELIAN_KINDS)
    m = n - 1
    size = 2 * m

    def g(h=4):
        return Scalar(rational(rng, h), rational(rng, h))

    if kind == "generic":
        C = [[g() for _ in range(m)] for _ in range(m)]
    elif kind == "degenerate":
        u = [g() for _ in range(m)]
        w = [g() for _ in range(m)]
        C = [[u[i] * w[j] if rng.random() < 0.7 else ZERO for j in range(m)] for i in range(m)]
        C[rng.randrange(m)] = [ZERO] * m
    elif kind == "normal":
        re = small_rational(rng, nonzero=True)
        C = [[ZERO] * m for _ in range(m)]
        for i in range(m):
            C[i][i] = Scalar(re if (i == 0 or rng.random() < 0.5) else 0, small_rational(rng))
    elif kind == "skew":
        C = [[ZERO] * m for _ in range(m)]
        for i in range(m):
            C[i][i] = Scalar(0, small_rational(rng))
            for j in range(i + 1, m):
                c = g()
                C[i][j], C[j][i] = c, -c.conjugate()
    elif kind == "balanced":
        while True:
            C = [[g() for _ in range(m)] for _ in range(m)]
            shift = sum((C[i][i].re for i in range(m)), Fraction(0)) / m
            for i in range(m):
                C[i][i] = C[i][i] - shift
            if any(C[i][j] != -C[j][i].conjugate() for i in range(m) for j in range(m)):
                break
    else:
        raise ValueError(f"unknown kind {kind!r}")
    q = rational_orthogonal(rng, size)
    qt = linalg.transpose(q)
    A = linalg.matmul(linalg.matmul(q, _complex_block(C)), qt)
    J0 = _complex_block([[Scalar(0, 1) if i == j else ZERO for j in range(m)] for i in range(m)])
    J1 = linalg.matmul(linalg.matmul(q, J0), qt)
    a = small_rational(rng) if rng.random() < 0.7 else Fraction(0)
    if kind in ("balanced", "skew") or rng.random() < 0.3:
        v = [Fraction(0)] * size
    else:
        v = [small_rational(rng) for _ in range(size)]
    return AlmostAbelianData(n, a, v, A, J1)


__all__ = [
    "ALMOST_ABELIAN_KINDS",
    "HEIGHT",
    "almost_abelian",
    "gaussian",
    "make_rng",
    "nilpotent_metric",
    "nilpotent_params",
    "nonnilpotent_params",
    "rational",
    "rational_orthogonal",
    "small_rational",
    "unit_gaussian",
]
