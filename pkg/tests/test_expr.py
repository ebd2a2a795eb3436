import numpy as np
import pytest

from oqsim import basis, destroy, qeye, sigmax, tensor
from oqsim.errors import DimensionError, ExpressionSyntaxError, QTypeError, UnknownIdentifierError
from oqsim.expr import (COEFF_FUNCS, Binary, Call, Name, Num, Unary, evaluate,
                        parse, parse_coefficient, parse_operator_expr, unparse)


def ev(src, **names):
    return evaluate(parse(src), names, COEFF_FUNCS)


@pytest.mark.parametrize("src,value", [
    ("2*3+4", 10),
    ("2+3*4", 14),
    ("2-3-4", -5),
    ("8/4/2", 1),
    ("2^3^2", 512),
    ("2**3", 8),
    ("-2^2", -4),
    ("(-2)^2", 4),
    ("2^-1", 0.5),
    ("--3", 3),
    ("-3*-2", 6),
    ("1.5e1 + .5", 15.5),
    ("2j*2j", -4),
])
def test_precedence_and_associativity(src, value):
    assert ev(src) == pytest.approx(value)


def test_tree_shapes():
    assert parse("a-b-c") == Binary("-", Binary("-", Name("a"), Name("b")), Name("c"))
    assert parse("a^b^c") == Binary("^", Name("a"), Binary("^", Name("b"), Name("c")))
    assert parse("-a^b") == Unary("-", Binary("^", Name("a"), Name("b")))
    assert parse("x.dag()") == Call("dag", (Name("x"),))
    assert parse("f()") == Call("f", ())


def test_coefficient_examples():
    c = parse_coefficient("v/2 * t")
    assert c(1.0, {"v": 4 * np.pi}) == pytest.approx(2 * np.pi)
    assert c.depends_on_t()
    one = parse_coefficient("1")
    assert one(0.0) == 1 and one(123.0) == 1 and not one.depends_on_t()
    wave = parse_coefficient("A*sin(w*t) + exp(-t)*sqrt(4)")
    p = {"A": 2.0, "w": 3.0}
    assert wave(0.7, p) == pytest.approx(2 * np.sin(2.1) + 2 * np.exp(-0.7))
    assert wave(0.7, p) == wave(0.7, p)


@pytest.mark.parametrize("src,offset", [
    ("sin(", 4),
    ("1 + * 2", 4),
    ("(1+2", 4),
    ("1 2", 2),
    ("a $ b", 2),
    ("x.", 2),
    ("", 0),
    ("1 + é", 4),
])
def test_syntax_error_offsets(src, offset):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse(src)
    assert info.value.offset == offset


def test_unknown_identifier_carries_name():
    with pytest.raises(UnknownIdentifierError) as info:
        parse_coefficient("gamma*t")(1.0, {})
    assert info.value.name == "gamma"
    with pytest.raises(UnknownIdentifierError) as info:
        ev("cosh(1)")
    assert info.value.name == "cosh"


def random_tree(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        k = rng.integers(3)
        if k == 0:
            return Num(float(rng.choice([0.0, 1.0, 2.5, 1e-5, 3e20])))
        if k == 1:
            return Num(complex(0, float(rng.choice([1.0, 0.5]))))
        return Name(str(rng.choice(["t", "g", "kappa", "x1"])))
    k = rng.integers(4)
    if k == 0:
        return Unary(str(rng.choice(["-", "+"])), random_tree(rng, depth - 1))
    if k == 1:
        args = tuple(random_tree(rng, depth - 1) for _ in range(rng.integers(0, 3)))
        return Call(str(rng.choice(["sin", "f", "dag"])), args)
    op = str(rng.choice(["+", "-", "*", "/", "^"]))
    return Binary(op, random_tree(rng, depth - 1), random_tree(rng, depth - 1))


@pytest.mark.parametrize("seed", range(40))
def test_unparse_round_trip(seed):
    rng = np.random.default_rng(seed)
    tree = random_tree(rng, 5)
    text = unparse(tree)
    assert parse(text) == tree
    assert unparse(parse(text)) == text


@pytest.mark.parametrize("src,expected", [
    ("(a+b)*c", "(a+b)*c"),
    ("a+(b*c)", "a+b*c"),
    ("a-(b-c)", "a-(b-c)"),
    ("(a^b)^c", "(a^b)^c"),
    ("a^(b^c)", "a^b^c"),
    ("(-a)^2", "(-a)^2"),
    ("-(a*b)", "-(a*b)"),
    ("2.0*x", "2*x"),
])
def test_minimal_parentheses(src, expected):
    assert unparse(parse(src)) == expected


def test_operator_expressions():
    a = parse_operator_expr("tensor(destroy(N), qeye(2))", [5, 2], {"N": 5})
    assert a == tensor(destroy(5), qeye(2))
    assert parse_operator_expr("sigmax()", [2]) == sigmax()
    h = parse_operator_expr("g*(a.dag()*a) + 1", [3], {"g": 0.5, "a": destroy(3)})
    assert h == 0.5 * destroy(3).dag() * destroy(3) + 1
    assert parse_operator_expr("a^2", [3], {"a": destroy(3)}) == destroy(3) * destroy(3)
    ket = parse_operator_expr("unit(basis(2,0) + basis(2,1))", [2])
    assert ket.norm() == pytest.approx(1.0)


def test_operator_expression_errors():
    with pytest.raises(QTypeError):
        parse_operator_expr("basis(2,0)*basis(2,0)", [2])
    with pytest.raises(DimensionError) as info:
        parse_operator_expr("destroy(3)", [2], where="hamiltonian[1]")
    assert "hamiltonian[1]" in str(info.value)
    with pytest.raises(QTypeError):
        parse_operator_expr("destroy(3)^0.5", [3])
    with pytest.raises(UnknownIdentifierError):
        parse_operator_expr("tensor(b, qeye(2))", [2, 2])
    assert parse_operator_expr("basis(2,1)", [2]) == basis(2, 1)
