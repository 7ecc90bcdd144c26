"""Expression trees for holomorphic maps with exact symbolic derivatives.

A :class:`HolomorphicMap` is an immutable tree over the nodes below. Trees
are built through the module-level constructors (``add``, ``mul``, ...),
which fold constant subtrees and drop trivial identities; this keeps
derivative trees small and makes ``parse(str(h)) == h`` hold for every tree
built through them.

Evaluation comes in three flavours:

* ``h(z)`` for a single point, raising :class:`EvaluationError` at poles
  and on branch cuts,
* ``h.evaluate_array(Z)`` vectorised over numpy arrays, returning inf/nan
  instead of raising,
* ``h.evaluate_mp(z)`` with mpmath, for points too close to the unit
  circle for double precision.

``log`` and real powers use the principal branch, with the cut on
``(-inf, 0]``.
"""

from __future__ import annotations

import cmath
import math
import numbers
from dataclasses import dataclass
from functools import cached_property

import mpmath
import numpy as np


class EvaluationError(ArithmeticError):
    """Evaluation hit a pole, a branch cut or overflowed."""


class _ScalarOps:
    exact = True

    @staticmethod
    def exp(x):
        try:
            return cmath.exp(x)
        except OverflowError as exc:
            raise EvaluationError(f"exp overflow at {x!r}") from exc

    @staticmethod
    def log(x):
        x = complex(x)
        if x.imag == 0 and x.real <= 0:
            raise EvaluationError(f"log evaluated on its branch cut at {x!r}")
        return cmath.log(x)

    @staticmethod
    def div(a, b):
        if b == 0:
            raise EvaluationError("division by zero (pole)")
        return a / b

    @staticmethod
    def rpow(x, p):
        x = complex(x)
        if x.imag == 0 and x.real < 0:
            raise EvaluationError(f"real power evaluated on its branch cut at {x!r}")
        if x == 0:
            if p > 0:
                return 0j
            raise EvaluationError("negative power of zero (pole)")
        return cmath.exp(p * cmath.log(x))

    @staticmethod
    def ipow(x, n):
        if n < 0 and x == 0:
            raise EvaluationError("negative power of zero (pole)")
        return complex(x) ** n


class _ArrayOps:
    exact = False
    exp = staticmethod(np.exp)
    log = staticmethod(np.log)

    @staticmethod
    def div(a, b):
        return a / b

    @staticmethod
    def rpow(x, p):
        return np.power(x, p)

    @staticmethod
    def ipow(x, n):
        return np.power(x, n)


class _MpOps:
    exact = False
    exp = staticmethod(mpmath.exp)
    log = staticmethod(mpmath.log)

    @staticmethod
    def div(a, b):
        return a / b

    @staticmethod
    def rpow(x, p):
        return mpmath.power(x, p)

    @staticmethod
    def ipow(x, n):
        return x ** n


_SCALAR = _ScalarOps()
_ARRAY = _ArrayOps()
_MP = _MpOps()


def _fmt_real(x: float) -> str:
    return repr(float(x))


def _fmt_const(c: complex) -> str:
    re, im = c.real, c.imag
    if im == 0:
        return _fmt_real(re)
    if re == 0:
        return f"({_fmt_real(im)}*i)"
    sign = "+" if im >= 0 else "-"
    return f"({_fmt_real(re)}{sign}{_fmt_real(abs(im))}*i)"


class HolomorphicMap:
    """Base class of all expression nodes."""

    __slots__ = ()
    precedence = 100

    # evaluation ---------------------------------------------------------

    def _ev(self, z, ops):
        raise NotImplementedError

    def __call__(self, z) -> complex:
        try:
            value = complex(self._ev(complex(z), _SCALAR))
        except ZeroDivisionError as exc:
            raise EvaluationError(f"pole of {self} at {z!r}") from exc
        except (OverflowError, ValueError) as exc:
            raise EvaluationError(f"cannot evaluate {self} at {z!r}: {exc}") from exc
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise EvaluationError(f"non-finite value of {self} at {z!r}")
        return value

    def evaluate(self, z) -> complex:
        return self(z)

    def evaluate_array(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        with np.errstate(all="ignore"):
            out = self._ev(z, _ARRAY)
        return np.broadcast_to(np.asarray(out, dtype=complex), z.shape).copy()

    def evaluate_mp(self, z):
        return mpmath.mpc(self._ev(mpmath.mpc(z), _MP))

    # calculus and composition --------------------------------------------

    def _diff(self) -> "HolomorphicMap":
        raise NotImplementedError

    @cached_property
    def _derivative(self) -> "HolomorphicMap":
        return self._diff()

    def derivative(self) -> "HolomorphicMap":
        """Exact symbolic derivative with respect to ``z``."""
        return self._derivative

    def compose(self, inner: "HolomorphicMap") -> "HolomorphicMap":
        """The map ``z -> self(inner(z))``."""
        return self._subst(as_map(inner))

    def _subst(self, inner):
        raise NotImplementedError

    def children(self) -> tuple:
        return ()

    def depends_on_z(self) -> bool:
        return any(c.depends_on_z() for c in self.children())

    # arithmetic sugar ----------------------------------------------------

    def __add__(self, other):
        return add(self, as_map(other))

    def __radd__(self, other):
        return add(as_map(other), self)

    def __sub__(self, other):
        return sub(self, as_map(other))

    def __rsub__(self, other):
        return sub(as_map(other), self)

    def __mul__(self, other):
        return mul(self, as_map(other))

    def __rmul__(self, other):
        return mul(as_map(other), self)

    def __truediv__(self, other):
        return div(self, as_map(other))

    def __rtruediv__(self, other):
        return div(as_map(other), self)

    def __neg__(self):
        return mul(Const(-1.0), self)

    def __pow__(self, p):
        return power(self, as_map(p))

    def __repr__(self):
        return f"HolomorphicMap({str(self)!r})"


@dataclass(frozen=True, repr=False)
class Const(HolomorphicMap):
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))

    def _ev(self, z, ops):
        return self.value

    def _diff(self):
        return ZERO

    def _subst(self, inner):
        return self

    def __str__(self):
        return _fmt_const(self.value)


@dataclass(frozen=True, repr=False)
class Var(HolomorphicMap):
    def _ev(self, z, ops):
        return z

    def _diff(self):
        return ONE

    def _subst(self, inner):
        return inner

    def depends_on_z(self):
        return True

    def __str__(self):
        return "z"


@dataclass(frozen=True, repr=False)
class Add(HolomorphicMap):
    left: HolomorphicMap
    right: HolomorphicMap

    def _ev(self, z, ops):
        return self.left._ev(z, ops) + self.right._ev(z, ops)

    def _diff(self):
        return add(self.left.derivative(), self.right.derivative())

    def _subst(self, inner):
        return add(self.left._subst(inner), self.right._subst(inner))

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        return f"({self.left} + {self.right})"


@dataclass(frozen=True, repr=False)
class Sub(HolomorphicMap):
    left: HolomorphicMap
    right: HolomorphicMap

    def _ev(self, z, ops):
        return self.left._ev(z, ops) - self.right._ev(z, ops)

    def _diff(self):
        return sub(self.left.derivative(), self.right.derivative())

    def _subst(self, inner):
        return sub(self.left._subst(inner), self.right._subst(inner))

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        return f"({self.left} - {self.right})"


@dataclass(frozen=True, repr=False)
class Mul(HolomorphicMap):
    left: HolomorphicMap
    right: HolomorphicMap

    def _ev(self, z, ops):
        return self.left._ev(z, ops) * self.right._ev(z, ops)

    def _diff(self):
        a, b = self.left, self.right
        return add(mul(a.derivative(), b), mul(a, b.derivative()))

    def _subst(self, inner):
        return mul(self.left._subst(inner), self.right._subst(inner))

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        return f"({self.left} * {self.right})"


@dataclass(frozen=True, repr=False)
class Div(HolomorphicMap):
    left: HolomorphicMap
    right: HolomorphicMap

    def _ev(self, z, ops):
        return ops.div(self.left._ev(z, ops), self.right._ev(z, ops))

    def _diff(self):
        a, b = self.left, self.right
        num = sub(mul(a.derivative(), b), mul(a, b.derivative()))
        return div(num, ipow(b, 2))

    def _subst(self, inner):
        return div(self.left._subst(inner), self.right._subst(inner))

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        return f"({self.left} / {self.right})"


@dataclass(frozen=True, repr=False)
class IntPow(HolomorphicMap):
    base: HolomorphicMap
    exponent: int

    def _ev(self, z, ops):
        return ops.ipow(self.base._ev(z, ops), self.exponent)

    def _diff(self):
        n = self.exponent
        return mul(mul(Const(n), ipow(self.base, n - 1)), self.base.derivative())

    def _subst(self, inner):
        return ipow(self.base._subst(inner), self.exponent)

    def children(self):
        return (self.base,)

    def __str__(self):
        n = self.exponent
        return f"({self.base}^{n})" if n >= 0 else f"({self.base}^({n}))"


@dataclass(frozen=True, repr=False)
class RealPow(HolomorphicMap):
    """Principal branch ``exp(p log base)`` for a real, non-integer ``p``."""

    base: HolomorphicMap
    exponent: float

    def _ev(self, z, ops):
        return ops.rpow(self.base._ev(z, ops), self.exponent)

    def _diff(self):
        p = self.exponent
        return mul(mul(Const(p), rpow(self.base, p - 1)), self.base.derivative())

    def _subst(self, inner):
        return rpow(self.base._subst(inner), self.exponent)

    def children(self):
        return (self.base,)

    def __str__(self):
        return f"({self.base}^({self.exponent!r}))"


@dataclass(frozen=True, repr=False)
class Exp(HolomorphicMap):
    arg: HolomorphicMap

    def _ev(self, z, ops):
        return ops.exp(self.arg._ev(z, ops))

    def _diff(self):
        return mul(self, self.arg.derivative())

    def _subst(self, inner):
        return exp(self.arg._subst(inner))

    def children(self):
        return (self.arg,)

    def __str__(self):
        return f"exp({self.arg})"


@dataclass(frozen=True, repr=False)
class Log(HolomorphicMap):
    """Principal logarithm."""

    arg: HolomorphicMap

    def _ev(self, z, ops):
        return ops.log(self.arg._ev(z, ops))

    def _diff(self):
        return div(self.arg.derivative(), self.arg)

    def _subst(self, inner):
        return log(self.arg._subst(inner))

    def children(self):
        return (self.arg,)

    def __str__(self):
        return f"log({self.arg})"


@dataclass(frozen=True, repr=False)
class Mobius(HolomorphicMap):
    """``(a u + b) / (c u + d)`` applied to a subexpression ``u``."""

    a: complex
    b: complex
    c: complex
    d: complex
    arg: HolomorphicMap

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate Mobius coefficients (ad - bc = 0)")

    def _ev(self, z, ops):
        u = self.arg._ev(z, ops)
        return ops.div(self.a * u + self.b, self.c * u + self.d)

    def _diff(self):
        det = self.a * self.d - self.b * self.c
        den = ipow(add(mul(Const(self.c), self.arg), Const(self.d)), 2)
        return mul(div(Const(det), den), self.arg.derivative())

    def _subst(self, inner):
        return Mobius(self.a, self.b, self.c, self.d, self.arg._subst(inner))

    def children(self):
        return (self.arg,)

    def __str__(self):
        coeffs = ", ".join(_fmt_const(v) for v in (self.a, self.b, self.c, self.d))
        return f"mobius({coeffs}, {self.arg})"


ZERO = Const(0.0)
ONE = Const(1.0)
Z = Var()


# --------------------------------------------------------------------------
# constructors with constant folding


def as_map(x) -> HolomorphicMap:
    if isinstance(x, HolomorphicMap):
        return x
    if isinstance(x, numbers.Number):
        return Const(complex(x))
    raise TypeError(f"cannot interpret {x!r} as a holomorphic map")


def _const(x):
    return x.value if isinstance(x, Const) else None


def add(a: HolomorphicMap, b: HolomorphicMap) -> HolomorphicMap:
    ca, cb = _const(a), _const(b)
    if ca is not None and cb is not None:
        return Const(ca + cb)
    if ca == 0:
        return b
    if cb == 0:
        return a
    return Add(a, b)


def sub(a: HolomorphicMap, b: HolomorphicMap) -> HolomorphicMap:
    ca, cb = _const(a), _const(b)
    if ca is not None and cb is not None:
        return Const(ca - cb)
    if cb == 0:
        return a
    return Sub(a, b)


def mul(a: HolomorphicMap, b: HolomorphicMap) -> HolomorphicMap:
    ca, cb = _const(a), _const(b)
    if ca is not None and cb is not None:
        return Const(ca * cb)
    if ca == 0 or cb == 0:
        return ZERO
    if ca == 1:
        return b
    if cb == 1:
        return a
    return Mul(a, b)


def div(a: HolomorphicMap, b: HolomorphicMap) -> HolomorphicMap:
    ca, cb = _const(a), _const(b)
    if cb == 0:
        raise ZeroDivisionError("division by the constant zero")
    if ca is not None and cb is not None:
        return Const(ca / cb)
    if ca == 0:
        return ZERO
    if cb == 1:
        return a
    return Div(a, b)


def ipow(base: HolomorphicMap, n: int) -> HolomorphicMap:
    n = int(n)
    cb = _const(base)
    if n == 0:
        return ONE
    if n == 1:
        return base
    if cb is not None:
        return Const(cb ** n)
    return IntPow(base, n)


def rpow(base: HolomorphicMap, p: float) -> HolomorphicMap:
    p = float(p)
    if p == int(p):
        return ipow(base, int(p))
    cb = _const(base)
    if cb is not None:
        return Const(cmath.exp(p * cmath.log(cb)) if cb != 0 else 0.0)
    return RealPow(base, p)


def power(base: HolomorphicMap, exponent: HolomorphicMap) -> HolomorphicMap:
    """``base ** exponent``; non-real or non-constant exponents use ``exp(e log b)``."""
    ce = _const(exponent)
    if ce is not None and ce.imag == 0:
        return rpow(base, ce.real)
    cb = _const(base)
    if cb is not None and ce is not None:
        return Const(cb ** ce)
    return exp(mul(exponent, log(base)))


def exp(a: HolomorphicMap) -> HolomorphicMap:
    ca = _const(a)
    if ca is not None:
        return Const(cmath.exp(ca))
    return Exp(a)


def log(a: HolomorphicMap) -> HolomorphicMap:
    ca = _const(a)
    if ca is not None:
        if ca == 0:
            raise EvaluationError("log of the constant zero")
        return Const(cmath.log(ca))
    return Log(a)


def mobius(a, b, c, d, arg: HolomorphicMap = Z) -> HolomorphicMap:
    return Mobius(a, b, c, d, as_map(arg))


def const(value) -> Const:
    return Const(complex(value))


# --------------------------------------------------------------------------
# built-in maps


def cayley_map(sigma: complex = 1.0) -> HolomorphicMap:
    """``C_sigma(z) = (sigma + z) / (sigma - z)`` as a Mobius node."""
    sigma = complex(sigma)
    return Mobius(1, sigma, -1, sigma, Z)


def cayley_inverse_map(sigma: complex = 1.0, arg: HolomorphicMap = Z) -> HolomorphicMap:
    """``w -> sigma (w - 1) / (w + 1)`` applied to ``arg``."""
    sigma = complex(sigma)
    return Mobius(sigma, -sigma, 1, 1, as_map(arg))


def walk(h: HolomorphicMap):
    """Yield every node of ``h`` in prefix order."""
    yield h
    for c in h.children():
        yield from walk(c)
