"""Exact scalar coefficient functions of the momenta.

Expression trees are immutable; evaluation is deterministic, complex-valued
and numpy-vectorised, so the same tree evaluated twice at the same points
returns bit-identical arrays.  Differentiation is exact (no simplification
beyond constant folding in the constructors, which keeps trees from growing
during repeated products and derivatives).

Variables are plain strings; the algebra layers use "pL"/"pR" for the two
momenta, "p" for an identified momentum and "p1"/"p2" for two-site momenta.
"""
from __future__ import annotations

from typing import Dict, FrozenSet, Iterable, Mapping, Union

import numpy as np

from .errors import BranchError, DomainError, PoleError

_POLE_EPS = 1e-14
_IMAG_EPS = 1e-12

Number = Union[int, float, complex]
EnvValue = Union[complex, np.ndarray]


def _worst_point(env: Mapping[str, EnvValue], mask) -> dict:
    """Extract the first offending sample from a boolean mask."""
    idx = int(np.argmax(mask))
    point = {}
    for name, val in env.items():
        arr = np.asarray(val)
        point[name] = complex(arr.flat[idx % arr.size]) if arr.ndim else complex(arr)
    return point


class Expr:
    __slots__ = ()
    kind = "?"

    # -- construction sugar -------------------------------------------------
    def __add__(self, other):
        return add(self, coerce(other))

    def __radd__(self, other):
        return add(coerce(other), self)

    def __sub__(self, other):
        return add(self, neg(coerce(other)))

    def __rsub__(self, other):
        return add(coerce(other), neg(self))

    def __mul__(self, other):
        return mul(self, coerce(other))

    def __rmul__(self, other):
        return mul(coerce(other), self)

    def __truediv__(self, other):
        return quot(self, coerce(other))

    def __rtruediv__(self, other):
        return quot(coerce(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return pow_(self, exponent)

    # -- interface ----------------------------------------------------------
    def children(self) -> tuple:
        return ()

    def diff(self, v: str) -> "Expr":
        raise NotImplementedError

    def _eval(self, env, memo):
        raise NotImplementedError

    def eval(self, env: Mapping[str, EnvValue], memo: dict | None = None) -> EnvValue:
        # The memo is keyed by the node object itself (identity hashing);
        # keeping the key alive prevents id-reuse across temporaries.
        if memo is None:
            memo = {}
        hit = memo.get(self)
        if hit is not None:
            return hit
        val = self._eval(env, memo)
        memo[self] = val
        return val

    def eval_at(self, **point: Number) -> complex:
        env = {k: complex(v) for k, v in point.items()}
        return complex(self.eval(env))

    def variables(self) -> FrozenSet[str]:
        out: set[str] = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, Var):
                out.add(node.name)
            stack.extend(node.children())
        return frozenset(out)

    def substitute(self, mapping: Mapping[str, "Expr"]) -> "Expr":
        return _substitute(self, mapping, {})

    def __repr__(self):
        return self._repr()

    def _repr(self) -> str:
        raise NotImplementedError


class Const(Expr):
    __slots__ = ("value",)
    kind = "const"

    def __init__(self, value: Number):
        object.__setattr__(self, "value", complex(value))

    def __setattr__(self, *a):
        raise AttributeError("expressions are immutable")

    def diff(self, v):
        return ZERO

    def _eval(self, env, memo):
        return self.value

    def _repr(self):
        v = self.value
        if v.imag == 0:
            return repr(v.real)
        return repr(v)


class Var(Expr):
    __slots__ = ("name",)
    kind = "var"

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def __setattr__(self, *a):
        raise AttributeError("expressions are immutable")

    def diff(self, v):
        return ONE if v == self.name else ZERO

    def _eval(self, env, memo):
        try:
            val = env[self.name]
        except KeyError:
            raise KeyError(f"no value supplied for momentum variable {self.name!r}")
        if isinstance(val, np.ndarray):
            return val.astype(np.complex128, copy=False)
        return complex(val)

    def _repr(self):
        return self.name


class _NAry(Expr):
    __slots__ = ("args",)

    def __init__(self, args: Iterable[Expr]):
        object.__setattr__(self, "args", tuple(args))

    def __setattr__(self, *a):
        raise AttributeError("expressions are immutable")

    def children(self):
        return self.args


class Add(_NAry):
    kind = "add"

    def diff(self, v):
        return add(*(a.diff(v) for a in self.args))

    def _eval(self, env, memo):
        total = self.args[0].eval(env, memo)
        for a in self.args[1:]:
            total = total + a.eval(env, memo)
        return total

    def _repr(self):
        return "(" + " + ".join(a._repr() for a in self.args) + ")"


class Mul(_NAry):
    kind = "mul"

    def diff(self, v):
        terms = []
        for i, a in enumerate(self.args):
            da = a.diff(v)
            if isinstance(da, Const) and da.value == 0:
                continue
            terms.append(mul(*self.args[:i], da, *self.args[i + 1:]))
        return add(*terms)

    def _eval(self, env, memo):
        total = self.args[0].eval(env, memo)
        for a in self.args[1:]:
            total = total * a.eval(env, memo)
        return total

    def _repr(self):
        return "(" + "*".join(a._repr() for a in self.args) + ")"


class Quot(Expr):
    __slots__ = ("num", "den")
    kind = "quot"

    def __init__(self, num: Expr, den: Expr):
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("expressions are immutable")

    def children(self):
        return (self.num, self.den)

    def diff(self, v):
        u, w = self.num, self.den
        return quot(add(mul(u.diff(v), w), neg(mul(u, w.diff(v)))), mul(w, w))

    def _eval(self, env, memo):
        n = self.num.eval(env, memo)
        d = self.den.eval(env, memo)
        bad = np.abs(d) < _POLE_EPS
        if np.any(bad):
            raise PoleError(
                f"division by ~0 in {self.den!r}",
                point=_worst_point(env, np.atleast_1d(bad)),
            )
        return n / d

    def _repr(self):
        return f"({self.num._repr()}/{self.den._repr()})"


class Pow(Expr):
    """Power with a fixed real exponent; principal branch on complex bases."""

    __slots__ = ("base", "exponent")
    kind = "pow"

    def __init__(self, base: Expr, exponent: float):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", float(exponent))

    def __setattr__(self, *a):
        raise AttributeError("expressions are immutable")

    def children(self):
        return (self.base,)

    def diff(self, v):
        r = self.exponent
        return mul(Const(r), pow_(self.base, r - 1.0), self.base.diff(v))

    def _eval(self, env, memo):
        b = self.base.eval(env, memo)
        r = self.exponent
        if r < 0:
            bad = np.abs(b) < _POLE_EPS
            if np.any(bad):
                raise PoleError(
                    f"negative power of ~0 in {self.base!r}",
                    point=_worst_point(env, np.atleast_1d(bad)),
                )
        return np.power(np.asarray(b, dtype=np.complex128), r) if isinstance(b, np.ndarray) \
            else complex(b) ** r

    def _repr(self):
        return f"({self.base._repr()}^{self.exponent})"


class _Unary(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        object.__setattr__(self, "arg", arg)

    def __setattr__(self, *a):
        raise AttributeError("expressions are immutable")

    def children(self):
        return (self.arg,)

    def _repr(self):
        return f"{self.kind}({self.arg._repr()})"


class Sin(_Unary):
    kind = "sin"

    def diff(self, v):
        return mul(Cos(self.arg), self.arg.diff(v))

    def _eval(self, env, memo):
        return np.sin(self.arg.eval(env, memo))


class Cos(_Unary):
    kind = "cos"

    def diff(self, v):
        return mul(Const(-1), Sin(self.arg), self.arg.diff(v))

    def _eval(self, env, memo):
        return np.cos(self.arg.eval(env, memo))


class Tan(_Unary):
    kind = "tan"

    def diff(self, v):
        return quot(self.arg.diff(v), mul(Cos(self.arg), Cos(self.arg)))

    def _eval(self, env, memo):
        a = self.arg.eval(env, memo)
        c = np.cos(a)
        bad = np.abs(c) < _POLE_EPS
        if np.any(bad):
            raise PoleError(f"tan pole in {self!r}", point=_worst_point(env, np.atleast_1d(bad)))
        return np.sin(a) / c


class Cot(_Unary):
    kind = "cot"

    def diff(self, v):
        return neg(quot(self.arg.diff(v), mul(Sin(self.arg), Sin(self.arg))))

    def _eval(self, env, memo):
        a = self.arg.eval(env, memo)
        s = np.sin(a)
        bad = np.abs(s) < _POLE_EPS
        if np.any(bad):
            raise PoleError(f"cot pole in {self!r}", point=_worst_point(env, np.atleast_1d(bad)))
        return np.cos(a) / s


class Arccot(_Unary):
    """Principal branch, values in (0, pi) for real arguments."""

    kind = "arccot"

    def diff(self, v):
        return neg(quot(self.arg.diff(v), add(ONE, mul(self.arg, self.arg))))

    def _eval(self, env, memo):
        a = self.arg.eval(env, memo)
        return np.pi / 2 - np.arctan(a)


class ExpNode(_Unary):
    kind = "exp"

    def diff(self, v):
        return mul(ExpNode(self.arg), self.arg.diff(v))

    def _eval(self, env, memo):
        return np.exp(self.arg.eval(env, memo))


class AbsNode(_Unary):
    kind = "abs"

    def diff(self, v):
        raise BranchError(
            "cannot differentiate through abs(); resolve the branch first "
            "(restrict momenta so the argument has a fixed sign)"
        )

    def _eval(self, env, memo):
        a = self.arg.eval(env, memo)
        im = np.abs(np.imag(np.atleast_1d(a)))
        scale = np.maximum(np.abs(np.atleast_1d(a)), 1.0)
        bad = im > _IMAG_EPS * scale
        if np.any(bad):
            raise DomainError(f"abs() of a non-real value in {self!r}")
        return np.abs(a) + 0j


ZERO = Const(0)
ONE = Const(1)
I = Const(1j)


def coerce(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, complex)):
        return Const(x)
    raise TypeError(f"cannot use {type(x).__name__} as an expression")


def const(x: Number) -> Const:
    return Const(x)


def var(name: str) -> Var:
    return Var(name)


def is_const(e: Expr, value: Number | None = None) -> bool:
    if not isinstance(e, Const):
        return False
    return True if value is None else e.value == complex(value)


def add(*args) -> Expr:
    flat: list[Expr] = []
    c = 0j
    for a in map(coerce, args):
        if isinstance(a, Const):
            c += a.value
        elif isinstance(a, Add):
            for sub in a.args:
                if isinstance(sub, Const):
                    c += sub.value
                else:
                    flat.append(sub)
        else:
            flat.append(a)
    if c != 0:
        flat.append(Const(c))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(flat)


def mul(*args) -> Expr:
    flat: list[Expr] = []
    c = 1 + 0j
    for a in map(coerce, args):
        if isinstance(a, Const):
            c *= a.value
        elif isinstance(a, Mul):
            for sub in a.args:
                if isinstance(sub, Const):
                    c *= sub.value
                else:
                    flat.append(sub)
        else:
            flat.append(a)
    if c == 0:
        return ZERO
    if c != 1:
        flat.insert(0, Const(c))
    if not flat:
        return ONE
    if len(flat) == 1:
        return flat[0]
    return Mul(flat)


def neg(x) -> Expr:
    return mul(Const(-1), coerce(x))


def quot(num, den) -> Expr:
    num, den = coerce(num), coerce(den)
    if isinstance(den, Const):
        if den.value == 0:
            raise ZeroDivisionError("constant zero denominator")
        return mul(num, Const(1 / den.value))
    if is_const(num, 0):
        return ZERO
    return Quot(num, den)


def pow_(base, exponent: float) -> Expr:
    base = coerce(base)
    exponent = float(exponent)
    if exponent == 1.0:
        return base
    if exponent == 0.0:
        return ONE
    if isinstance(base, Const):
        return Const(complex(base.value) ** exponent)
    return Pow(base, exponent)


def sqrt(x) -> Expr:
    return pow_(x, 0.5)


def sin(x) -> Expr:
    x = coerce(x)
    return Const(np.sin(x.value)) if isinstance(x, Const) else Sin(x)


def cos(x) -> Expr:
    x = coerce(x)
    return Const(np.cos(x.value)) if isinstance(x, Const) else Cos(x)


def tan(x) -> Expr:
    return Tan(coerce(x))


def cot(x) -> Expr:
    return Cot(coerce(x))


def arccot(x) -> Expr:
    return Arccot(coerce(x))


def exp(x) -> Expr:
    x = coerce(x)
    return Const(np.exp(x.value)) if isinstance(x, Const) else ExpNode(x)


def absval(x) -> Expr:
    return AbsNode(coerce(x))


def _substitute(e: Expr, mapping: Mapping[str, Expr], memo: dict) -> Expr:
    key = id(e)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if isinstance(e, Var):
        out = mapping.get(e.name, e)
    elif isinstance(e, Const):
        out = e
    elif isinstance(e, Add):
        out = add(*(_substitute(a, mapping, memo) for a in e.args))
    elif isinstance(e, Mul):
        out = mul(*(_substitute(a, mapping, memo) for a in e.args))
    elif isinstance(e, Quot):
        out = quot(_substitute(e.num, mapping, memo), _substitute(e.den, mapping, memo))
    elif isinstance(e, Pow):
        out = pow_(_substitute(e.base, mapping, memo), e.exponent)
    elif isinstance(e, Sin):
        out = sin(_substitute(e.arg, mapping, memo))
    elif isinstance(e, Cos):
        out = cos(_substitute(e.arg, mapping, memo))
    elif isinstance(e, Tan):
        out = tan(_substitute(e.arg, mapping, memo))
    elif isinstance(e, Cot):
        out = cot(_substitute(e.arg, mapping, memo))
    elif isinstance(e, Arccot):
        out = arccot(_substitute(e.arg, mapping, memo))
    elif isinstance(e, ExpNode):
        out = exp(_substitute(e.arg, mapping, memo))
    elif isinstance(e, AbsNode):
        out = absval(_substitute(e.arg, mapping, memo))
    else:  # pragma: no cover
        raise TypeError(f"unknown node {e.kind}")
    memo[key] = out
    return out


_DIFF_CACHE: Dict[tuple, tuple] = {}


def diff(e: Expr, v: str) -> Expr:
    """Exact partial derivative d e / d v as a new expression."""
    key = (id(e), v)
    hit = _DIFF_CACHE.get(key)
    if hit is not None and hit[0] is e:
        return hit[1]
    de = e.diff(v)
    _DIFF_CACHE[key] = (e, de)
    return de


def convective_diff(e: Expr, v: str, jac: Expr, other: str | None = None) -> Expr:
    """Total derivative d e / d v = de/dv + jac * de/dw along a momentum constraint.

    ``jac`` is the Jacobian of the other momentum ``w`` with respect to ``v``.
    """
    if other is None:
        if v == "pL":
            other = "pR"
        elif v == "pR":
            other = "pL"
        else:
            raise ValueError(f"cannot infer the conjugate momentum of {v!r}")
    return add(diff(e, v), mul(jac, diff(e, other)))
