"""A small expression language for scenario files.

Grammar, loosest binding first::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := postfix ('^' unary)?          # right-associative; '**' is an alias
    postfix := primary ('.' NAME '(' ')')*   # x.dag() is sugar for dag(x)
    primary := NUMBER | NAME | NAME '(' [expr (',' expr)*] ')' | '(' expr ')'

Numbers may carry a trailing ``j`` for imaginary literals. The same syntax
serves time-dependent coefficients (names: t, parameters, pi; functions sin
cos exp sqrt) and operator expressions (factory functions plus tensor, dag,
expm, unit, ket2dm).
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ExpressionSyntaxError, QTypeError, UnknownIdentifierError

__all__ = [
    "Num", "Name", "Unary", "Binary", "Call", "parse", "unparse", "evaluate",
    "Coefficient", "parse_coefficient", "parse_operator_expr", "evaluate_operator",
    "COEFF_FUNCS", "OPERATOR_FUNCS",
]


@dataclass(frozen=True)
class Num:
    value: complex | float


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?j?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),.])
""", re.VERBOSE)


def _offset(src, pos):
    return len(src[:pos].encode("utf-8"))


def _tokenize(src):
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {src[pos]!r}", _offset(src, pos))
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            toks.append(("op", "^", pos) if text == "**" else (kind, text, pos))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        what = "end of input" if tok[0] == "end" else repr(tok[1])
        raise ExpressionSyntaxError(f"{msg}, found {what}", _offset(self.src, tok[2]))

    def expect(self, text):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != text:
            self.fail(f"expected {text!r}")
        return self.take()

    def at(self, *ops):
        tok = self.peek()
        return tok[0] == "op" and tok[1] in ops

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return node

    def expr(self):
        node = self.term()
        while self.at("+", "-"):
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at("*", "/"):
            op = self.take()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        if self.at("-", "+"):
            op = self.take()[1]
            return Unary(op, self.unary())
        return self.power()

    def power(self):
        base = self.postfix()
        if self.at("^"):
            self.take()
            return Binary("^", base, self.unary())
        return base

    def postfix(self):
        node = self.primary()
        while self.at("."):
            self.take()
            tok = self.take()
            if tok[0] != "name":
                self.fail("expected a method name", tok)
            self.expect("(")
            self.expect(")")
            node = Call(tok[1], (node,))
        return node

    def primary(self):
        tok = self.peek()
        if tok[0] == "num":
            self.take()
            text = tok[1]
            return Num(complex(0, float(text[:-1])) if text.endswith("j") else float(text))
        if tok[0] == "name":
            self.take()
            if not self.at("("):
                return Name(tok[1])
            self.take()
            args = []
            if not self.at(")"):
                args.append(self.expr())
                while self.at(","):
                    self.take()
                    args.append(self.expr())
            self.expect(")")
            return Call(tok[1], tuple(args))
        if self.at("("):
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        self.fail("expected a number, name or '('")


def parse(src):
    if not isinstance(src, str):
        raise ExpressionSyntaxError(f"expression must be text, got {type(src).__name__}", 0)
    return _Parser(src).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_UNARY = 3
_ATOM = 5


def _prec(node):
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary):
        return _UNARY
    return _ATOM


def _num_text(v):
    if isinstance(v, complex):
        if v.real == 0:
            return f"{_real_text(v.imag)}j"
        return f"({_real_text(v.real)}{'+' if v.imag >= 0 else '-'}{_real_text(abs(v.imag))}j)"
    return _real_text(v)


def _real_text(x):
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def unparse(node):
    """Source text that parses back to an equal tree, with minimal parentheses."""
    def wrap(child, needed):
        s = unparse(child)
        return f"({s})" if needed else s

    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Name):
        return node.id
    if isinstance(node, Call):
        return f"{node.func}({', '.join(unparse(a) for a in node.args)})"
    if isinstance(node, Unary):
        return node.op + wrap(node.operand, _prec(node.operand) < _UNARY)
    if isinstance(node, Binary):
        p = _PREC[node.op]
        if node.op == "^":
            left = wrap(node.left, _prec(node.left) <= p)
            right = wrap(node.right, _prec(node.right) < _UNARY)
        else:
            left = wrap(node.left, _prec(node.left) < p)
            right = wrap(node.right, _prec(node.right) <= p)
        return f"{left}{node.op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


def _power(a, b):
    if hasattr(a, "dims"):
        if isinstance(b, complex) and b.imag == 0:
            b = b.real
        if float(b) != int(b):
            raise QTypeError("operators can only be raised to integer powers")
        return a ** int(b)
    return a ** b


_BINOPS = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
    "^": _power,
}


def evaluate(node, names, funcs):
    """Evaluate a tree against name and function tables."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        if node.id not in names:
            raise UnknownIdentifierError(node.id)
        return names[node.id]
    if isinstance(node, Unary):
        v = evaluate(node.operand, names, funcs)
        return -v if node.op == "-" else v
    if isinstance(node, Binary):
        return _BINOPS[node.op](evaluate(node.left, names, funcs),
                                evaluate(node.right, names, funcs))
    if isinstance(node, Call):
        if node.func not in funcs:
            raise UnknownIdentifierError(node.func)
        return funcs[node.func](*[evaluate(a, names, funcs) for a in node.args])
    raise TypeError(f"not an expression node: {node!r}")


def _scalar(f):
    def g(x):
        v = f(x)
        return v.item() if isinstance(v, np.generic) else v
    return g


def _sqrt(x):
    if isinstance(x, complex) or x < 0:
        return complex(np.sqrt(complex(x)))
    return float(np.sqrt(x))


COEFF_FUNCS = {
    "sin": _scalar(np.sin), "cos": _scalar(np.cos),
    "exp": _scalar(np.exp), "sqrt": _sqrt,
}


class Coefficient:
    """A parsed coefficient expression, callable as ``coeff(t, params)``."""

    def __init__(self, src):
        self.src = src
        self.ast = parse(src)

    def __call__(self, t, params=None):
        names = {"pi": np.pi}
        names.update(params or {})
        names["t"] = t
        return evaluate(self.ast, names, COEFF_FUNCS)

    def depends_on_t(self):
        return _mentions(self.ast, "t")

    def __repr__(self):
        return f"Coefficient({self.src!r})"


def _mentions(node, name):
    if isinstance(node, Name):
        return node.id == name
    if isinstance(node, Unary):
        return _mentions(node.operand, name)
    if isinstance(node, Binary):
        return _mentions(node.left, name) or _mentions(node.right, name)
    if isinstance(node, Call):
        return any(_mentions(a, name) for a in node.args)
    return False


def parse_coefficient(src):
    return Coefficient(src)


def _operator_funcs():
    from . import metrics, operators, states
    from .qobj import Qobj, tensor

    def _method(name):
        def call(q):
            if not isinstance(q, Qobj):
                raise QTypeError(f"{name}() needs a quantum object")
            return getattr(q, name)()
        return call

    funcs = dict(COEFF_FUNCS)
    funcs.update({
        "destroy": operators.destroy, "create": operators.create, "num": operators.num,
        "qeye": operators.qeye, "displace": operators.displace, "squeeze": operators.squeeze,
        "sigmax": operators.sigmax, "sigmay": operators.sigmay, "sigmaz": operators.sigmaz,
        "sigmap": operators.sigmap, "sigmam": operators.sigmam,
        "basis": states.basis, "fock": states.fock, "fock_dm": states.fock_dm,
        "coherent": states.coherent, "coherent_dm": states.coherent_dm,
        "thermal_dm": states.thermal_dm,
        "tensor": lambda *qs: tensor(*qs), "ket2dm": metrics.ket2dm,
        "dag": _method("dag"), "expm": _method("expm"), "unit": _method("unit"),
        "conj": _method("conj"), "trans": _method("trans"),
    })
    return funcs


OPERATOR_FUNCS = None


def evaluate_operator(node, names):
    global OPERATOR_FUNCS
    if OPERATOR_FUNCS is None:
        OPERATOR_FUNCS = _operator_funcs()
    env = {"pi": np.pi}
    env.update(names)
    return evaluate(node, env, OPERATOR_FUNCS)


def parse_operator_expr(src, dims=None, names=None, where="expression"):
    """Evaluate an operator or state expression and check it against ``dims``.

    ``dims`` is the scenario's subsystem list; an operator must have dims
    [dims, dims] and a ket [dims, [1, ...]]. ``where`` names the location for
    error messages.
    """
    from .qobj import Qobj

    node = parse(src) if isinstance(src, str) else src
    value = evaluate_operator(node, names or {})
    if dims is not None and isinstance(value, Qobj):
        dims = [int(d) for d in dims]
        ok = value.dims[0] == dims and (value.isket or value.dims[1] == dims)
        if not ok:
            raise DimensionError(f"{where}: dims {value.dims} do not match subsystems {dims}")
    return value
