"""Exact rational-function arithmetic in named parameters.

A Scalar is a quotient of two integer-coefficient polynomials in a finite
set of named parameters, held in a canonical reduced form:

* gcd(numerator, denominator) = 1 (including integer content),
* the denominator's leading coefficient under graded-lex order is positive,
* zero is 0/1,
* the underlying polynomial ring mentions exactly the parameters that occur.

Equality, hashing and ``is_zero`` are therefore decidable by direct
comparison of the stored polynomials.

The name ``s`` is reserved: it stands for the square root of two.  Every
result is reduced via s^2 -> 2, and denominators are rationalized so they
never contain ``s``.  Because of that, ``s`` cannot be bound to a value.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

from sympy.polys.domains import ZZ
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring as _sympy_ring

SQRT2_NAME = "s"

ScalarLike = Union["Scalar", int, Fraction, str]


@lru_cache(maxsize=None)
def _ring_for(names: tuple[str, ...]):
    """Polynomial ring ZZ[names] with graded-lex order; names must be sorted."""
    R = _sympy_ring(",".join(names), ZZ, grlex)[0]
    R._scalar_names = names
    R._scalar_gen_index = {n: i for i, n in enumerate(names)}
    return R


_R0 = _ring_for(())


def _fold_sqrt2(p, R):
    # reduce every monomial's s-exponent below 2 using s^2 = 2
    idx = R._scalar_gen_index.get(SQRT2_NAME)
    if idx is None:
        return p
    if all(m[idx] < 2 for m, _ in p.terms()):
        return p
    acc: dict[tuple, int] = {}
    for monom, coeff in p.terms():
        e = monom[idx]
        if e >= 2:
            coeff = coeff * (2 ** (e // 2))
            monom = monom[:idx] + (e % 2,) + monom[idx + 1 :]
        acc[monom] = acc.get(monom, 0) + coeff
    return R.from_dict({m: c for m, c in acc.items() if c})


def _split_sqrt2(p, R):
    # p = A + s*B with A, B free of s; requires folded input
    idx = R._scalar_gen_index[SQRT2_NAME]
    a: dict[tuple, int] = {}
    b: dict[tuple, int] = {}
    for monom, coeff in p.terms():
        if monom[idx]:
            b[monom[:idx] + (0,) + monom[idx + 1 :]] = coeff
        else:
            a[monom] = coeff
    return R.from_dict(a), R.from_dict(b)


def _shrink(num, den, R):
    # move to the ring of exactly the occurring parameters
    names = R._scalar_names
    used = set()
    for poly in (num, den):
        for monom, _ in poly.terms():
            for i, e in enumerate(monom):
                if e:
                    used.add(i)
    if len(used) == len(names):
        return num, den, R
    kept = tuple(names[i] for i in sorted(used))
    target = _ring_for(kept)
    return num.set_ring(target), den.set_ring(target), target


def _canonical(num, den, R) -> "Scalar":
    num = _fold_sqrt2(num, R)
    den = _fold_sqrt2(den, R)
    if not den:
        raise ZeroDivisionError("division by the zero polynomial")
    if not num:
        return ZERO
    if SQRT2_NAME in R._scalar_gen_index:
        a, b = _split_sqrt2(den, R)
        if b:
            conj = a - R.gens[R._scalar_gen_index[SQRT2_NAME]] * b
            num = _fold_sqrt2(num * conj, R)
            den = _fold_sqrt2(den * conj, R)
    g = num.gcd(den)
    if g != 1:
        num = num.exquo(g)
        den = den.exquo(g)
    if den.LC < 0:
        num, den = -num, -den
    num, den, R = _shrink(num, den, R)
    return Scalar._make(num, den)


def _unify(a: "Scalar", b: "Scalar"):
    Ra = a._num.ring
    Rb = b._num.ring
    if Ra is Rb:
        return a._num, a._den, b._num, b._den, Ra
    names = tuple(sorted(set(Ra._scalar_names) | set(Rb._scalar_names)))
    R = _ring_for(names)
    return (
        a._num.set_ring(R),
        a._den.set_ring(R),
        b._num.set_ring(R),
        b._den.set_ring(R),
        R,
    )


class Scalar:
    """Immutable exact rational function; see module docstring."""

    __slots__ = ("_num", "_den", "_hash")

    @classmethod
    def _make(cls, num, den) -> "Scalar":
        self = object.__new__(cls)
        self._num = num
        self._den = den
        self._hash = None
        return self

    @classmethod
    def from_int(cls, value: int) -> "Scalar":
        if value == 0:
            return ZERO
        if value == 1:
            return ONE
        return cls._make(_R0(value), _R0.one)

    @classmethod
    def from_fraction(cls, value: Fraction) -> "Scalar":
        value = Fraction(value)
        if value.denominator == 1:
            return cls.from_int(value.numerator)
        return cls._make(_R0(value.numerator), _R0(value.denominator))

    @classmethod
    def param(cls, name: str) -> "Scalar":
        if not name.isidentifier():
            raise ValueError(f"not a valid parameter name: {name!r}")
        R = _ring_for((name,))
        return cls._make(R.gens[0], R.one)

    @classmethod
    def sqrt2(cls) -> "Scalar":
        return cls.param(SQRT2_NAME)

    # -- inspection ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self._num

    def is_one(self) -> bool:
        return self._num == 1 and self._den == 1

    def is_constant(self) -> bool:
        """True when no parameter occurs (the reserved ``s`` counts as one)."""
        return not self._num.ring._scalar_names

    def free_params(self) -> frozenset[str]:
        """Bindable parameter names occurring in this value (``s`` excluded)."""
        return frozenset(n for n in self._num.ring._scalar_names if n != SQRT2_NAME)

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"not a rational constant: {self}")
        nt = self._num.terms()
        dt = self._den.terms()
        return Fraction(int(nt[0][1]) if nt else 0, int(dt[0][1]))

    @property
    def numerator_terms(self) -> list[tuple[tuple[int, ...], int]]:
        return [(m, int(c)) for m, c in self._num.terms()]

    @property
    def denominator_terms(self) -> list[tuple[tuple[int, ...], int]]:
        return [(m, int(c)) for m, c in self._den.terms()]

    @property
    def param_names(self) -> tuple[str, ...]:
        return self._num.ring._scalar_names

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: ScalarLike) -> "Scalar":
        other = as_scalar(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        n1, d1, n2, d2, R = _unify(self, other)
        return _canonical(n1 * d2 + n2 * d1, d1 * d2, R)

    __radd__ = __add__

    def __sub__(self, other: ScalarLike) -> "Scalar":
        return self + (-as_scalar(other))

    def __rsub__(self, other: ScalarLike) -> "Scalar":
        return as_scalar(other) + (-self)

    def __mul__(self, other: ScalarLike) -> "Scalar":
        other = as_scalar(other)
        if self.is_zero() or other.is_zero():
            return ZERO
        if self.is_one():
            return other
        if other.is_one():
            return self
        n1, d1, n2, d2, R = _unify(self, other)
        return _canonical(n1 * n2, d1 * d2, R)

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "Scalar":
        other = as_scalar(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero Scalar")
        if other.is_one():
            return self
        if self.is_zero():
            return ZERO
        n1, d1, n2, d2, R = _unify(self, other)
        return _canonical(n1 * d2, d1 * n2, R)

    def __rtruediv__(self, other: ScalarLike) -> "Scalar":
        return as_scalar(other) / self

    def __neg__(self) -> "Scalar":
        if self.is_zero():
            return ZERO
        return Scalar._make(-self._num, self._den)

    def __pos__(self) -> "Scalar":
        return self

    def __pow__(self, exponent: int) -> "Scalar":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return (ONE / self) ** (-exponent)
        if exponent == 0:
            return ONE
        if exponent == 1:
            return self
        R = self._num.ring
        return _canonical(self._num**exponent, self._den**exponent, R)

    # -- substitution and evaluation ------------------------------------

    def substitute(self, binding: "ParamBinding | Mapping") -> "Scalar":
        """Exact substitution of rational values; unbound parameters stay."""
        binding = ParamBinding.coerce(binding)
        if not binding.exact:
            raise TypeError("substitute needs exact rational values, not floats")
        relevant = {
            n: binding[n] for n in self._num.ring._scalar_names if n in binding
        }
        if not relevant:
            return self
        num_p, num_d = _substitute_poly(self._num, relevant)
        den_p, den_d = _substitute_poly(self._den, relevant)
        if not den_p:
            raise ZeroDivisionError(
                f"denominator {_poly_text(self._den)} vanishes under binding"
            )
        R = num_p.ring
        return _canonical(num_p * den_d, den_p * num_d, R)

    def evaluate(self, binding: "ParamBinding | Mapping | None" = None) -> float:
        """Float value; every parameter must be bound (``s`` is sqrt(2))."""
        binding = ParamBinding.coerce(binding or {})
        missing = self.free_params() - set(binding)
        if missing:
            raise ValueError(f"unbound parameters: {sorted(missing)}")
        values = {n: float(binding[n]) for n in binding}
        values[SQRT2_NAME] = math.sqrt(2.0)
        num = _eval_poly(self._num, values)
        den = _eval_poly(self._den, values)
        if den == 0.0:
            raise ZeroDivisionError("denominator vanishes under binding")
        return num / den

    def __float__(self) -> float:
        return self.evaluate({})

    # -- comparison ------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, str)):
            try:
                other = as_scalar(other)
            except (ValueError, ZeroDivisionError):
                return NotImplemented
        if not isinstance(other, Scalar):
            return NotImplemented
        if self._num.ring is not other._num.ring:
            return False
        return self._num == other._num and self._den == other._den

    def __hash__(self) -> int:
        if self._hash is None:
            key = (
                self._num.ring._scalar_names,
                tuple((m, int(c)) for m, c in self._num.terms()),
                tuple((m, int(c)) for m, c in self._den.terms()),
            )
            self._hash = hash(key)
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- printing --------------------------------------------------------

    def __str__(self) -> str:
        num = _poly_text(self._num)
        if self._den == 1:
            return num
        if len(self._num) > 1:
            num = f"({num})"
        den = _poly_text(self._den)
        if not _atomic_denominator(self._den):
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"


ZERO = Scalar._make(_R0.zero, _R0.one)
ONE = Scalar._make(_R0.one, _R0.one)


def as_scalar(value: ScalarLike) -> Scalar:
    """Coerce an int, Fraction, expression string, or Scalar."""
    if isinstance(value, Scalar):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a Scalar value")
    if isinstance(value, int):
        return Scalar.from_int(value)
    if isinstance(value, Fraction):
        return Scalar.from_fraction(value)
    if isinstance(value, str):
        return parse_expr(value)
    raise TypeError(f"cannot interpret {type(value).__name__} as Scalar")


def _substitute_poly(p, bind: dict[str, Fraction]):
    """Return (polynomial over the remaining parameters, common denominator)."""
    names = p.ring._scalar_names
    kept = tuple(n for n in names if n not in bind)
    target = _ring_for(kept)
    kept_pos = [i for i, n in enumerate(names) if n not in bind]
    acc: dict[tuple, Fraction] = {}
    for monom, coeff in p.terms():
        c = Fraction(int(coeff))
        for i, n in enumerate(names):
            e = monom[i]
            if e and n in bind:
                c *= bind[n] ** e
        key = tuple(monom[i] for i in kept_pos)
        acc[key] = acc.get(key, Fraction(0)) + c
    acc = {m: c for m, c in acc.items() if c}
    common = math.lcm(*(c.denominator for c in acc.values())) if acc else 1
    poly = target.from_dict(
        {m: int(c * common) for m, c in acc.items()}
    )
    return poly, target(common)


def _eval_poly(p, values: dict[str, float]) -> float:
    names = p.ring._scalar_names
    total = 0.0
    for monom, coeff in p.terms():
        term = float(int(coeff))
        for i, e in enumerate(monom):
            if e:
                term *= values[names[i]] ** e
        total += term
    return total


# -- binding ------------------------------------------------------------


class ParamBinding(Mapping):
    """Parameter values: exact rationals, or floats for the numeric path."""

    __slots__ = ("_values",)

    def __init__(self, values: Mapping[str, Fraction | float | int | str]):
        norm: dict[str, Fraction | float] = {}
        for name, value in values.items():
            if name == SQRT2_NAME:
                raise ValueError(f"{SQRT2_NAME!r} is reserved for sqrt(2)")
            if not name.isidentifier():
                raise ValueError(f"not a valid parameter name: {name!r}")
            if isinstance(value, float):
                norm[name] = value
            else:
                norm[name] = Fraction(value)
        self._values = norm

    @classmethod
    def coerce(cls, value: "ParamBinding | Mapping") -> "ParamBinding":
        if isinstance(value, ParamBinding):
            return value
        return cls(value)

    @property
    def exact(self) -> bool:
        return all(not isinstance(v, float) for v in self._values.values())

    def __getitem__(self, name: str):
        return self._values[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self._values.items())
        return f"ParamBinding({inner})"


# -- printing helpers -----------------------------------------------------


def _monomial_factors(monom, names) -> list[str]:
    return [
        f"{names[i]}^{e}" if e > 1 else names[i] for i, e in enumerate(monom) if e
    ]


def _poly_text(p) -> str:
    if not p:
        return "0"
    names = p.ring._scalar_names
    pieces: list[str] = []
    for k, (monom, coeff) in enumerate(p.terms()):
        c = int(coeff)
        factors = _monomial_factors(monom, names)
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        if k == 0:
            pieces.append(body if c > 0 else f"-{body}")
        else:
            pieces.append(f" + {body}" if c > 0 else f" - {body}")
    return "".join(pieces)


def _atomic_denominator(p) -> bool:
    # safe to print unparenthesized after '/': a bare uint or a single power
    if len(p) != 1:
        return False
    (monom, coeff), = p.terms()
    if not any(monom):
        return int(coeff) > 0
    return int(coeff) == 1 and sum(1 for e in monom if e) == 1


# -- parser ---------------------------------------------------------------


class ScalarSyntaxError(ValueError):
    """Malformed expression text; ``position`` is a 0-based character index."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_MAX_EXPONENT = 2**31


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def next_token(self) -> tuple[str, str, int]:
        text, n = self.text, len(self.text)
        while self.pos < n and text[self.pos].isspace():
            self.pos += 1
        if self.pos >= n:
            return ("end", "", self.pos)
        start = self.pos
        ch = text[start]
        if ch.isdigit():
            while self.pos < n and text[self.pos].isdigit():
                self.pos += 1
            return ("int", text[start : self.pos], start)
        if ch.isalpha() or ch == "_":
            while self.pos < n and (text[self.pos].isalnum() or text[self.pos] == "_"):
                self.pos += 1
            return ("ident", text[start : self.pos], start)
        if ch in "+-*/^()":
            self.pos += 1
            return (ch, ch, start)
        raise ScalarSyntaxError(f"unexpected character {ch!r}", start)


class _Parser:
    """Recursive descent for:

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('-')? atom ('^' uint)?
    atom   := rational | ident | '(' expr ')'
    rational := int ('/' uint)?
    """

    def __init__(self, text: str):
        self._tokens: list[tuple[str, str, int]] = []
        tok = _Tokenizer(text)
        while True:
            t = tok.next_token()
            self._tokens.append(t)
            if t[0] == "end":
                break
        self._i = 0

    def _peek(self, ahead: int = 0) -> tuple[str, str, int]:
        return self._tokens[min(self._i + ahead, len(self._tokens) - 1)]

    def _advance(self) -> tuple[str, str, int]:
        t = self._tokens[self._i]
        if t[0] != "end":
            self._i += 1
        return t

    def parse(self) -> Scalar:
        value = self._expr()
        kind, text, pos = self._peek()
        if kind != "end":
            raise ScalarSyntaxError(f"unexpected {text!r}", pos)
        return value

    def _expr(self) -> Scalar:
        value = self._term()
        while self._peek()[0] in ("+", "-"):
            op = self._advance()[0]
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self) -> Scalar:
        value = self._factor()
        while self._peek()[0] in ("*", "/"):
            op, _, pos = self._advance()
            rhs = self._factor()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ZeroDivisionError(
                        f"division by the zero polynomial (at position {pos})"
                    )
                value = value / rhs
        return value

    def _factor(self) -> Scalar:
        negate = False
        if self._peek()[0] == "-":
            self._advance()
            negate = True
        value = self._atom()
        if self._peek()[0] == "^":
            self._advance()
            kind, text, pos = self._advance()
            if kind != "int":
                raise ScalarSyntaxError("exponent must be a nonnegative integer", pos)
            exponent = int(text)
            if exponent > _MAX_EXPONENT:
                raise ScalarSyntaxError("exponent too large", pos)
            value = value**exponent
        return -value if negate else value

    def _atom(self) -> Scalar:
        kind, text, pos = self._advance()
        if kind == "int":
            numerator = int(text)
            # rational literal: int '/' uint, bound more tightly than term division
            if self._peek()[0] == "/" and self._peek(1)[0] == "int":
                self._advance()
                _, dtext, dpos = self._advance()
                denominator = int(dtext)
                if denominator == 0:
                    raise ZeroDivisionError(
                        f"division by zero in rational literal (at position {dpos})"
                    )
                return Scalar.from_fraction(Fraction(numerator, denominator))
            return Scalar.from_int(numerator)
        if kind == "ident":
            return Scalar.param(text)
        if kind == "(":
            value = self._expr()
            kind2, _, pos2 = self._advance()
            if kind2 != ")":
                raise ScalarSyntaxError("expected ')'", pos2)
            return value
        if kind == "end":
            raise ScalarSyntaxError("unexpected end of input", pos)
        raise ScalarSyntaxError(f"unexpected {text!r}", pos)


def parse_expr(text: str) -> Scalar:
    """Parse an expression string into a canonical Scalar."""
    return _Parser(text).parse()


# -- operation aliases -----------------------------------------------------


def add(a: ScalarLike, b: ScalarLike) -> Scalar:
    return as_scalar(a) + as_scalar(b)


def sub(a: ScalarLike, b: ScalarLike) -> Scalar:
    return as_scalar(a) - as_scalar(b)


def mul(a: ScalarLike, b: ScalarLike) -> Scalar:
    return as_scalar(a) * as_scalar(b)


def div(a: ScalarLike, b: ScalarLike) -> Scalar:
    return as_scalar(a) / as_scalar(b)


def neg(a: ScalarLike) -> Scalar:
    return -as_scalar(a)


def pow_int(a: ScalarLike, exponent: int) -> Scalar:
    return as_scalar(a) ** exponent


def substitute(a: ScalarLike, binding: ParamBinding | Mapping) -> Scalar:
    return as_scalar(a).substitute(binding)


def is_zero(a: ScalarLike) -> bool:
    return as_scalar(a).is_zero()
