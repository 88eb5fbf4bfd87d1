"""Split-complex (para-complex) numbers ``x + tau*y`` with ``tau**2 == 1``."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ArgumentBranchError, NullArgument, TimelikeArgument


@dataclass(frozen=True)
class ParaComplex:
    re: float
    im: float = 0.0

    def __add__(self, other):
        other = _coerce(other)
        return ParaComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return ParaComplex(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        return mul(self, _coerce(other))

    __rmul__ = __mul__

    def conj(self) -> "ParaComplex":
        return ParaComplex(self.re, -self.im)

    def sq_norm(self) -> float:
        return sq_norm(self)

    def __iter__(self):
        yield self.re
        yield self.im

    def __repr__(self):
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re!r} {sign} {abs(self.im)!r}τ"


TAU = ParaComplex(0.0, 1.0)
ONE = ParaComplex(1.0, 0.0)


def _coerce(z) -> ParaComplex:
    if isinstance(z, ParaComplex):
        return z
    if isinstance(z, (int, float)):
        return ParaComplex(float(z), 0.0)
    return NotImplemented


def mul(a: ParaComplex, b: ParaComplex) -> ParaComplex:
    return ParaComplex(a.re * b.re + a.im * b.im, a.re * b.im + a.im * b.re)


def conj(z: ParaComplex) -> ParaComplex:
    return z.conj()


def sq_norm(z: ParaComplex) -> float:
    """Indefinite square norm ``z * conj(z) = re**2 - im**2``."""
    return z.re * z.re - z.im * z.im


def arg(z: ParaComplex) -> float:
    """Hyperbolic argument on the right wedge ``re > |im|``.

    Returns ``beta`` with ``tanh(beta) = im / re``, so that
    ``z = sqrt(|z|^2) * (cosh(beta) + tau*sinh(beta))``.

    Raises
    ------
    NullArgument
        if ``re**2 == im**2`` (zero divisor / light cone).
    TimelikeArgument
        if ``re**2 < im**2``.
    ArgumentBranchError
        for the left wedge ``re < -|im|``; callers multiply by -1 first.
    """
    n = sq_norm(z)
    scale = max(abs(z.re), abs(z.im))
    if scale == 0.0 or abs(n) <= 1e-14 * scale * scale:
        raise NullArgument(f"{z!r} lies on the light cone")
    if n < 0:
        raise TimelikeArgument(f"{z!r} is timelike; no argument on the right wedge")
    if z.re < 0:
        raise ArgumentBranchError(f"{z!r} lies in the left wedge; multiply by -1 first")
    return math.atanh(z.im / z.re)


def from_polar(modulus: float, beta: float) -> ParaComplex:
    return ParaComplex(modulus * math.cosh(beta), modulus * math.sinh(beta))
